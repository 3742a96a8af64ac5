use super::momentum::momentum_functional;
use super::{build_mass_operator, mass_solve, GalerkinState, RegularizationParams, XnSpace};
use crate::continuity::{step_continuity, ContinuityStepConfig};
use crate::error::{Error, Result};
use crate::poisson::solve_poisson;
use crate::pressure::PressureLaw;
use crate::torus::VectorField;

pub const PICARD_TOL: f64 = 1e-10;
pub const PICARD_MAX_ITER: usize = 50;

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub state: GalerkinState,
    pub iterations: usize,
    /// `||u^{k+1} - u^k||_{L^2}` per iteration.
    pub residuals: Vec<f64>,
}

/// One time step of the coupled continuity / Poisson / momentum system.
///
/// Iterates `rho^k = S(rho_old, u^k)`, `Phi^k = Poisson(rho^k)`,
/// `M[rho^k] u^{k+1} = M[rho_old] u_old + dt N(rho^k, u^k)` from `u^0 = u_old`
/// until successive velocities agree to `tol` in L^2.
pub fn picard_step(
    state: &GalerkinState,
    dt: f64,
    params: &RegularizationParams,
    law: &PressureLaw,
    tol: f64,
    max_iter: usize,
) -> Result<PicardOutcome> {
    let grid = state.rho.grid();
    let n = state.n_modes;
    let space = XnSpace::new(grid, n)?;
    let cont = ContinuityStepConfig::new(params.epsilon, dt)?;
    let poisson = params.poisson();

    let old = build_mass_operator(&state.rho, n)?;
    let carried: Vec<Vec<f64>> = state.u.components().iter().map(|c| old.apply(&space.coeffs_of(c))).collect();

    let mut u_k = state.u.clone();
    let mut a_k: Vec<Vec<f64>> = state.u_coeffs();
    let mut residuals = Vec::new();
    for iter in 1..=max_iter {
        let rho_k = match step_continuity(&state.rho, &u_k, &cont) {
            Ok(r) => r,
            Err(e @ Error::PositivityLoss { .. }) if iter == 1 => return Err(e),
            Err(Error::PositivityLoss { .. }) => {
                return Err(Error::NoContraction {
                    iterations: iter,
                    residual: residuals.last().copied().unwrap_or(f64::INFINITY),
                })
            }
            Err(e) => return Err(e),
        };
        let phi_k = solve_poisson(&rho_k, &poisson);
        let forcing = momentum_functional(&space, &rho_k, &u_k, &phi_k, params, law)?;
        let op = build_mass_operator(&rho_k, n)?;
        let mut a_next = Vec::with_capacity(forcing.len());
        let mut sq = 0.0;
        for ((b, f), a) in carried.iter().zip(&forcing).zip(&a_k) {
            let rhs: Vec<f64> = b.iter().zip(f).map(|(b, f)| b + dt * f).collect();
            let x = mass_solve(&op, &rhs)?;
            sq += x.iter().zip(a).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
            a_next.push(x);
        }
        let residual = sq.sqrt();
        residuals.push(residual);
        if !residual.is_finite() {
            return Err(Error::NoContraction { iterations: iter, residual });
        }
        u_k = VectorField::new(a_next.iter().map(|a| space.field_of(a)).collect())?;
        a_k = a_next;
        if residual < tol {
            let rho = step_continuity(&state.rho, &u_k, &cont)?;
            let phi = solve_poisson(&rho, &poisson);
            return Ok(PicardOutcome {
                state: GalerkinState {
                    rho,
                    u: u_k,
                    phi,
                    time: state.time + dt,
                    n_modes: n,
                },
                iterations: iter,
                residuals,
            });
        }
    }
    Err(Error::NoContraction {
        iterations: max_iter,
        residual: residuals.last().copied().unwrap_or(f64::INFINITY),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{SpectralField, TorusGrid};

    #[test]
    fn equilibrium_converges_in_one_iteration() {
        let g = TorusGrid::cubic(2, 12).unwrap();
        let params = RegularizationParams {
            epsilon: 1e-3,
            mu: 1e-3,
            eta: 1e-4,
            delta: 1e-4,
            r0: 1e-3,
            r1: 0.1,
            lambda_sign: 1,
            g: 1.0,
        };
        let law = PressureLaw::pure_power(5.0 / 3.0, 1.0).unwrap();
        let s = GalerkinState::new(
            SpectralField::constant(&g, 1.0),
            &VectorField::zeros(&g),
            9,
            &params.poisson(),
            0.0,
        )
        .unwrap();
        let out = picard_step(&s, 0.05, &params, &law, PICARD_TOL, PICARD_MAX_ITER).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.state.rho.max_abs_coeff_diff(&s.rho) < 1e-12);
        assert!((out.state.time - 0.05).abs() < 1e-15);
    }
}
