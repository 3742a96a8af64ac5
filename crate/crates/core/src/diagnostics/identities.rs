use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{fluctuation_sq, Samples};
use crate::continuity::flux_divergence;
use crate::error::{Error, Result};
use crate::galerkin::RegularizationParams;
use crate::poisson::solve_poisson;
use crate::pressure::PressureLaw;
use crate::torus::{SpectralField, TorusGrid, VectorField, Wavevector};

/// Instantaneous integration-by-parts identities behind the energy estimate,
/// with the density's time derivative replaced by `eps Delta rho - div(rho u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityKind {
    /// `int grad P . u = int Pi'(rho) rho_t + eps int P'(rho) |grad rho|^2 / rho`
    PressureWork,
    /// `-eta int grad rho^-6 . u = -(6 eta / 7) int rho^-7 rho_t + (2/3) eta eps int |grad rho^-3|^2`
    ColdPressure,
    /// `delta int div(rho u) Delta^3 rho = delta int grad Delta rho . grad Delta rho_t + delta eps int |Delta^2 rho|^2`
    HyperDiffusion,
    /// `-int div(rho u) Phi = -(lambda / 4 pi G) int grad Phi . grad Phi_t - (4 pi G eps / lambda) int (rho - mean)^2`
    PoissonWork,
    /// `1/2 int rho_t |u|^2 + int div(rho u) |u|^2 + int rho (u . grad u) . u = -eps int (grad rho . grad u) . u`
    ConvectionSkew,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 5] = [
        IdentityKind::PressureWork,
        IdentityKind::ColdPressure,
        IdentityKind::HyperDiffusion,
        IdentityKind::PoissonWork,
        IdentityKind::ConvectionSkew,
    ];
}

/// Both sides of an identity.
pub fn identity_sides(
    kind: IdentityKind,
    rho: &SpectralField,
    u: &VectorField,
    params: &RegularizationParams,
    law: &PressureLaw,
) -> Result<(f64, f64)> {
    if rho.grid() != u.grid() {
        return Err(Error::GridMismatch);
    }
    let s = Samples::new(rho, u)?;
    let dim = s.dim();
    let eps = params.epsilon;
    let flux_div = flux_divergence(rho, u);
    let rho_t_field = &rho.laplacian().scale(eps) - &flux_div;
    let rho_t: Vec<f64> = (0..s.len()).map(|i| eps * s.lap_rho[i] - s.div_rho_u[i]).collect();
    let div_u: Vec<f64> = (0..s.len())
        .map(|i| (0..dim).map(|a| s.grad_u[a][a][i]).sum())
        .collect();
    Ok(match kind {
        IdentityKind::PressureWork => {
            let lhs = -s.quad(|i| law.p_unchecked(s.rho[i]) * div_u[i]);
            let rhs = s.quad(|i| {
                let z = s.rho[i];
                let dpi = (law.pi_unchecked(z) + law.p_unchecked(z)) / z;
                dpi * rho_t[i] + eps * law.dp_unchecked(z) * s.grad_rho_sq(i) / z
            });
            (lhs, rhs)
        }
        IdentityKind::ColdPressure => {
            let eta = params.eta;
            let lhs = eta * s.quad(|i| s.rho[i].powi(-6) * div_u[i]);
            let rhs = s.quad(|i| {
                let z = s.rho[i];
                -(6.0 * eta / 7.0) * z.powi(-7) * rho_t[i] + 6.0 * eta * eps * z.powi(-8) * s.grad_rho_sq(i)
            });
            (lhs, rhs)
        }
        IdentityKind::HyperDiffusion => {
            let delta = params.delta;
            let lhs = delta * flux_div.inner(&rho.laplacian_pow_unchecked(3));
            let grad_lap = rho.laplacian().gradient();
            let grad_lap_t = rho_t_field.laplacian().gradient();
            let bilap = rho.laplacian_pow_unchecked(2);
            let rhs = delta * grad_lap.inner(&grad_lap_t) + delta * eps * bilap.inner(&bilap);
            (lhs, rhs)
        }
        IdentityKind::PoissonWork => {
            let pc = params.poisson();
            let phi = solve_poisson(rho, &pc);
            let phi_t = solve_poisson(&rho_t_field, &pc);
            let c = pc.coupling();
            let lhs = -flux_div.inner(&phi);
            let rhs = -phi.gradient().inner(&phi_t.gradient()) / c - c * eps * fluctuation_sq(rho);
            (lhs, rhs)
        }
        IdentityKind::ConvectionSkew => {
            let lhs = s.quad(|i| {
                let speed = s.speed_sq(i);
                let mut adv = 0.0;
                for a in 0..dim {
                    let mut ua = 0.0;
                    for b in 0..dim {
                        ua += s.u[b][i] * s.grad_u[a][b][i];
                    }
                    adv += ua * s.u[a][i];
                }
                0.5 * rho_t[i] * speed + s.div_rho_u[i] * speed + s.rho[i] * adv
            });
            let rhs = -eps
                * s.quad(|i| {
                    let mut t = 0.0;
                    for a in 0..dim {
                        for b in 0..dim {
                            t += s.grad_rho[b][i] * s.grad_u[a][b][i] * s.u[a][i];
                        }
                    }
                    t
                });
            (lhs, rhs)
        }
    })
}

/// `|LHS - RHS| / (1 + |LHS|)` for the named identity.
pub fn check_identity(
    kind: IdentityKind,
    rho: &SpectralField,
    u: &VectorField,
    params: &RegularizationParams,
    law: &PressureLaw,
) -> Result<f64> {
    let (l, r) = identity_sides(kind, rho, u, params, law)?;
    Ok((l - r).abs() / (1.0 + l.abs()))
}

fn modes_up_to(grid: &TorusGrid, max: i64) -> Vec<Wavevector> {
    let dim = grid.dim();
    let r = |a: usize| if a < dim { max } else { 0 };
    let mut out = Vec::new();
    for k0 in -r(0)..=r(0) {
        for k1 in -r(1)..=r(1) {
            for k2 in -r(2)..=r(2) {
                let k = [k0, k1, k2];
                if k.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
                    out.push(k);
                }
            }
        }
    }
    out
}

/// A seeded smooth pair: `rho = 1 + (modes |k_i| <= 1)` with total amplitude
/// at most 0.5 (so `rho >= 0.5`), and `u` with modes `|k_i| <= 2`.
pub fn random_smooth_pair(grid: &TorusGrid, seed: u64) -> (SpectralField, VectorField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho_modes = modes_up_to(grid, 1);
    let u_modes = modes_up_to(grid, 2);
    let mut random_field = |modes: &[Wavevector], budget: f64| {
        let raw: Vec<(f64, f64)> = modes.iter().map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        // a cos + b sin has sup at most |a| + |b|
        let total: f64 = raw.iter().map(|(a, b)| a.abs() + b.abs()).sum();
        let scale = budget * rng.gen_range(0.5..1.0) / total;
        let mut f = SpectralField::zeros(grid);
        for (k, (a, b)) in modes.iter().zip(raw) {
            f.set_mode(k, Complex64::new(a * scale, -b * scale) * 0.5);
        }
        f
    };
    let fluct = random_field(&rho_modes, 0.5);
    let rho = &SpectralField::constant(grid, 1.0) + &fluct;
    let comps = (0..grid.dim()).map(|_| random_field(&u_modes, 0.5)).collect();
    (rho, VectorField::new(comps).expect("matching grid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> RegularizationParams {
        RegularizationParams {
            epsilon: 0.3,
            mu: 0.1,
            eta: 0.2,
            delta: 0.05,
            r0: 0.1,
            r1: 0.5,
            lambda_sign: -1,
            g: 0.8,
        }
    }

    #[test]
    fn convection_skew_vanishes_at_rest() {
        let g = TorusGrid::cubic(2, 16).unwrap();
        let (rho, _) = random_smooth_pair(&g, 3);
        let law = PressureLaw::pure_power(5.0 / 3.0, 1.0).unwrap();
        let (l, r) = identity_sides(IdentityKind::ConvectionSkew, &rho, &VectorField::zeros(&g), &params(), &law).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn identities_hold_in_one_dimension() {
        let g = TorusGrid::cubic(1, 64).unwrap();
        let law = PressureLaw::perturbed(1.4, 1.0, 0.3, 0.3, 2.0).unwrap();
        for seed in 0..4 {
            let (rho, u) = random_smooth_pair(&g, seed);
            assert!(rho.min_physical().0 >= 0.5);
            for kind in IdentityKind::ALL {
                let res = check_identity(kind, &rho, &u, &params(), &law).unwrap();
                assert!(res < 1e-8, "{kind:?} seed {seed}: {res}");
            }
        }
    }

    #[test]
    fn random_pair_is_deterministic() {
        let g = TorusGrid::cubic(2, 8).unwrap();
        assert_eq!(random_smooth_pair(&g, 9), random_smooth_pair(&g, 9));
        assert_ne!(random_smooth_pair(&g, 9).0, random_smooth_pair(&g, 10).0);
    }
}
