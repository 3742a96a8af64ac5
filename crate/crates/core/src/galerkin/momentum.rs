use super::{GalerkinState, RegularizationParams, XnSpace};
use crate::error::{Error, Result};
use crate::pressure::PressureLaw;
use crate::torus::{pointwise_apply, product, SpectralField, VectorField};

/// The ten contributions to the momentum right-hand side, in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentumTerm {
    /// `rho grad Phi`
    PotentialForce,
    /// `-div(rho u (x) u)`
    Convection,
    /// `+div(rho D u)`
    Viscous,
    /// `-mu Delta^2 u`
    Hyperviscosity,
    /// `-eps (grad rho . grad) u`
    EpsilonCross,
    /// `-grad P(rho)`
    Pressure,
    /// `+eta grad rho^-6`
    ColdPressure,
    /// `-r0 u`
    LinearDrag,
    /// `-r1 rho |u| u`
    QuadraticDrag,
    /// `+delta rho grad Delta^3 rho`
    Capillarity,
}

pub const TERM_NAMES: [&str; 10] = [
    "potential_force",
    "convection",
    "viscous",
    "hyperviscosity",
    "epsilon_cross",
    "pressure",
    "cold_pressure",
    "linear_drag",
    "quadratic_drag",
    "capillarity",
];

impl MomentumTerm {
    pub const ALL: [MomentumTerm; 10] = [
        MomentumTerm::PotentialForce,
        MomentumTerm::Convection,
        MomentumTerm::Viscous,
        MomentumTerm::Hyperviscosity,
        MomentumTerm::EpsilonCross,
        MomentumTerm::Pressure,
        MomentumTerm::ColdPressure,
        MomentumTerm::LinearDrag,
        MomentumTerm::QuadraticDrag,
        MomentumTerm::Capillarity,
    ];

    pub fn name(self) -> &'static str {
        TERM_NAMES[self as usize]
    }
}

fn d(f: &SpectralField, axis: usize) -> SpectralField {
    f.derivative(axis, 1).expect("axis in range")
}

fn finite(term: MomentumTerm, v: VectorField) -> Result<VectorField> {
    let ok = v
        .components()
        .iter()
        .all(|c| c.coeffs().iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    if ok {
        Ok(v)
    } else {
        Err(Error::NonFiniteTerm { term: term.name() })
    }
}

fn tag<T>(term: MomentumTerm, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::NonFinite { .. } => Error::NonFiniteTerm { term: term.name() },
        other => other,
    })
}

/// Evaluates one term as a vector field (before projection onto X_n).
pub fn momentum_term(
    term: MomentumTerm,
    rho: &SpectralField,
    u: &VectorField,
    phi: &SpectralField,
    params: &RegularizationParams,
    law: &PressureLaw,
) -> Result<VectorField> {
    let grid = rho.grid();
    let dim = grid.dim();
    let zero = || VectorField::zeros(grid);
    let comps = |f: &dyn Fn(usize) -> Result<SpectralField>| -> Result<VectorField> {
        VectorField::new((0..dim).map(f).collect::<Result<Vec<_>>>()?)
    };
    let v = match term {
        MomentumTerm::PotentialForce => comps(&|i| Ok(product(rho, &d(phi, i))))?,
        MomentumTerm::Convection => {
            let flux: Vec<SpectralField> = u.components().iter().map(|c| product(rho, c)).collect();
            comps(&|i| {
                let mut acc = SpectralField::zeros(grid);
                for (j, m) in flux.iter().enumerate() {
                    acc = &acc - &d(&product(m, u.component(i)), j);
                }
                Ok(acc)
            })?
        }
        MomentumTerm::Viscous => comps(&|i| {
            let mut acc = SpectralField::zeros(grid);
            for j in 0..dim {
                let strain = (&d(u.component(i), j) + &d(u.component(j), i)).scale(0.5);
                acc = &acc + &d(&product(rho, &strain), j);
            }
            Ok(acc)
        })?,
        MomentumTerm::Hyperviscosity => {
            if params.mu == 0.0 {
                zero()
            } else {
                u.map(|c| c.laplacian_pow_unchecked(2).scale(-params.mu))
            }
        }
        MomentumTerm::EpsilonCross => {
            if params.epsilon == 0.0 {
                zero()
            } else {
                let grad_rho = rho.gradient();
                comps(&|i| {
                    let mut acc = SpectralField::zeros(grid);
                    for j in 0..dim {
                        acc = &acc + &product(grad_rho.component(j), &d(u.component(i), j));
                    }
                    Ok(acc.scale(-params.epsilon))
                })?
            }
        }
        MomentumTerm::Pressure => {
            let p = tag(term, pointwise_apply(&[rho], |z| law.p_unchecked(z[0])))?;
            comps(&|i| Ok(d(&p, i).scale(-1.0)))?
        }
        MomentumTerm::ColdPressure => {
            if params.eta == 0.0 {
                zero()
            } else {
                let c = tag(term, pointwise_apply(&[rho], |z| z[0].powi(-6)))?;
                comps(&|i| Ok(d(&c, i).scale(params.eta)))?
            }
        }
        MomentumTerm::LinearDrag => u.scale(-params.r0),
        MomentumTerm::QuadraticDrag => {
            if params.r1 == 0.0 {
                zero()
            } else {
                let mut args: Vec<&SpectralField> = vec![rho];
                args.extend(u.components());
                comps(&|i| {
                    tag(
                        term,
                        pointwise_apply(&args, |v| {
                            let speed = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                            -params.r1 * v[0] * speed * v[1 + i]
                        }),
                    )
                })?
            }
        }
        MomentumTerm::Capillarity => {
            if params.delta == 0.0 {
                zero()
            } else {
                let l3 = rho.laplacian_pow_unchecked(3);
                comps(&|i| Ok(product(rho, &d(&l3, i)).scale(params.delta)))?
            }
        }
    };
    finite(term, v)
}

/// All ten terms, in [`MomentumTerm::ALL`] order.
pub fn momentum_terms(
    rho: &SpectralField,
    u: &VectorField,
    phi: &SpectralField,
    params: &RegularizationParams,
    law: &PressureLaw,
) -> Result<Vec<VectorField>> {
    MomentumTerm::ALL
        .iter()
        .map(|&t| momentum_term(t, rho, u, phi, params, law))
        .collect()
}

/// `<N, e_j>` for every velocity component and every X_n basis function.
pub(crate) fn momentum_functional(
    space: &XnSpace,
    rho: &SpectralField,
    u: &VectorField,
    phi: &SpectralField,
    params: &RegularizationParams,
    law: &PressureLaw,
) -> Result<Vec<Vec<f64>>> {
    let grid = rho.grid();
    let mut total = VectorField::zeros(grid);
    for t in momentum_terms(rho, u, phi, params, law)? {
        total = &total + &t;
    }
    Ok(total.components().iter().map(|c| space.coeffs_of(c)).collect())
}

/// The X_n functional of the full right-hand side at `state`.
pub fn momentum_rhs(state: &GalerkinState, params: &RegularizationParams, law: &PressureLaw) -> Result<Vec<Vec<f64>>> {
    let space = XnSpace::new(state.rho.grid(), state.n_modes)?;
    momentum_functional(&space, &state.rho, &state.u, &state.phi, params, law)
}
