//! Semi-implicit stepping of `rho_t + div(rho u) = eps Delta rho` with a given velocity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{product, SpectralField, TorusGrid, VectorField};

/// Safety factor in the CFL-style rule `dt <= 0.25 h / (max|u| + 1)`.
pub const STABILITY_FACTOR: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityStepConfig {
    pub epsilon: f64,
    pub dt: f64,
}

impl ContinuityStepConfig {
    pub fn new(epsilon: f64, dt: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidParams(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParams(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { epsilon, dt })
    }

    /// With `epsilon = 0` the step is pure advection (post-limit replay) and
    /// only strict negativity is an error.
    pub fn is_replay(&self) -> bool {
        self.epsilon == 0.0
    }
}

/// Largest stable `dt` for a velocity of sup-norm `max_u` on `grid`.
pub fn stability_bound(grid: &TorusGrid, max_u: f64) -> f64 {
    STABILITY_FACTOR * grid.min_spacing() / (max_u + 1.0)
}

/// Dealiased mass flux divergence `div P(rho u)`.
pub fn flux_divergence(rho: &SpectralField, u: &VectorField) -> SpectralField {
    let mut div = SpectralField::zeros(rho.grid());
    for (axis, c) in u.components().iter().enumerate() {
        div = &div + &product(rho, c).derivative(axis, 1).expect("axis in range");
    }
    div
}

fn implicit_solve(explicit: &SpectralField, cfg: &ContinuityStepConfig) -> SpectralField {
    let grid = explicit.grid();
    let ed = cfg.epsilon * cfg.dt;
    explicit.map_modes(|k, c| c / (1.0 + ed * grid.wavenumber_sq(k)))
}

fn check_positive(rho: &SpectralField, cfg: &ContinuityStepConfig) -> Result<()> {
    let (min, idx) = rho.min_physical();
    let bad = if cfg.is_replay() { min < 0.0 } else { min <= 0.0 };
    if bad || !min.is_finite() {
        return Err(Error::PositivityLoss { point: rho.grid().point(idx), value: min });
    }
    Ok(())
}

/// One step of `(rho_new - rho)/dt + div P(rho u) = eps Delta rho_new`.
///
/// The zero mode is untouched, so mass is conserved bit for bit.
pub fn step_continuity(
    rho: &SpectralField,
    u: &VectorField,
    cfg: &ContinuityStepConfig,
) -> Result<SpectralField> {
    if rho.grid() != u.grid() {
        return Err(Error::GridMismatch);
    }
    let div = flux_divergence(rho, u);
    let explicit = rho - &div.scale(cfg.dt);
    let next = implicit_solve(&explicit, cfg);
    check_positive(&next, cfg)?;
    Ok(next)
}

/// As [`step_continuity`] with a source term `f` evaluated at the new time level.
pub fn step_continuity_forced(
    rho: &SpectralField,
    u: &VectorField,
    forcing: &SpectralField,
    cfg: &ContinuityStepConfig,
) -> Result<SpectralField> {
    if rho.grid() != u.grid() || rho.grid() != forcing.grid() {
        return Err(Error::GridMismatch);
    }
    let div = flux_divergence(rho, u);
    let explicit = &(rho - &div.scale(cfg.dt)) + &forcing.scale(cfg.dt);
    let next = implicit_solve(&explicit, cfg);
    check_positive(&next, cfg)?;
    Ok(next)
}

/// `(rho_min e^{-D}, rho_max e^{D})` with `D = int ||div u||_inf dt`.
pub fn comparison_bounds(rho0_min: f64, rho0_max: f64, divu_linf_time_integral: f64) -> Result<(f64, f64)> {
    if !(rho0_min > 0.0) {
        return Err(Error::NonPositiveArgument(rho0_min));
    }
    if rho0_max < rho0_min {
        return Err(Error::InvalidParams(format!(
            "rho0_max {rho0_max} is below rho0_min {rho0_min}"
        )));
    }
    if !(divu_linf_time_integral >= 0.0) {
        return Err(Error::NegativeArgument(divu_linf_time_integral));
    }
    let e = divu_linf_time_integral.exp();
    Ok((rho0_min / e, rho0_max * e))
}

/// Sup-norm of `div u` over the physical grid.
pub fn divergence_linf(u: &VectorField) -> f64 {
    u.divergence().to_physical().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `sup_{t <= horizon} ||rho_1 - rho_2||_{H^1} / ||u_1 - u_2||_{L^2}` for
/// densities advected from a common start by two time-independent velocities.
///
/// The step `cfg.dt` is shrunk so an integer number of steps reaches `horizon`.
pub fn continuity_contraction_probe(
    rho0: &SpectralField,
    u1: &VectorField,
    u2: &VectorField,
    cfg: &ContinuityStepConfig,
    horizon: f64,
) -> Result<f64> {
    if rho0.grid() != u1.grid() || rho0.grid() != u2.grid() {
        return Err(Error::GridMismatch);
    }
    if !(horizon > 0.0) {
        return Err(Error::NonPositiveArgument(horizon));
    }
    let du = (u1 - u2).l2_norm();
    if du == 0.0 {
        return Err(Error::IdenticalVelocities);
    }
    let steps = (horizon / cfg.dt).ceil().max(1.0) as usize;
    let step_cfg = ContinuityStepConfig::new(cfg.epsilon, horizon / steps as f64)?;
    let (mut a, mut b) = (rho0.clone(), rho0.clone());
    let mut sup = 0.0f64;
    for _ in 0..steps {
        a = step_continuity(&a, u1, &step_cfg)?;
        b = step_continuity(&b, u2, &step_cfg)?;
        sup = sup.max((&a - &b).h1_norm());
    }
    Ok(sup / du)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1() -> TorusGrid {
        TorusGrid::cubic(1, 32).unwrap()
    }

    #[test]
    fn heat_decay_matches_scalar_recursion() {
        let g = grid1();
        let rho = SpectralField::from_fn(&g, |x| 1.0 + 0.1 * x[0].cos());
        let cfg = ContinuityStepConfig::new(0.3, 0.05).unwrap();
        let u = VectorField::zeros(&g);
        let mut r = rho.clone();
        for _ in 0..10 {
            r = step_continuity(&r, &u, &cfg).unwrap();
        }
        let factor = (1.0f64 / (1.0 + 0.3 * 0.05)).powi(10);
        let c = r.coeff(&[1, 0, 0]);
        assert!((c.re - 0.05 * factor).abs() < 1e-15);
        assert_eq!(r.mean(), 1.0);
    }

    #[test]
    fn equilibrium_and_pure_replay_identity() {
        let g = TorusGrid::cubic(2, 8).unwrap();
        let u = VectorField::zeros(&g);
        let c = SpectralField::constant(&g, 1.7);
        let cfg = ContinuityStepConfig::new(0.1, 0.1).unwrap();
        assert_eq!(step_continuity(&c, &u, &cfg).unwrap(), c);
        let rho = SpectralField::from_fn(&g, |x| 1.0 + 0.2 * x[1].sin());
        let replay = ContinuityStepConfig::new(0.0, 0.1).unwrap();
        assert_eq!(step_continuity(&rho, &u, &replay).unwrap(), rho);
    }

    #[test]
    fn mass_conserved_under_advection() {
        let g = TorusGrid::cubic(2, 16).unwrap();
        let rho = SpectralField::from_fn(&g, |x| 1.0 + 0.3 * (x[0] + x[1]).cos());
        let u = VectorField::new(vec![
            SpectralField::from_fn(&g, |x| 0.4 * x[1].sin()),
            SpectralField::from_fn(&g, |x| 0.2 * (2.0 * x[0]).cos()),
        ])
        .unwrap();
        let cfg = ContinuityStepConfig::new(0.01, 0.02).unwrap();
        let next = step_continuity(&rho, &u, &cfg).unwrap();
        assert!((next.integrate() - rho.integrate()).abs() < 1e-12);
    }

    #[test]
    fn positivity_loss_is_reported() {
        let g = grid1();
        let rho = SpectralField::from_fn(&g, |x| 1.0 + 0.9 * x[0].cos());
        let u = VectorField::new(vec![SpectralField::from_fn(&g, |x| 5.0 * x[0].sin())]).unwrap();
        let cfg = ContinuityStepConfig::new(0.0, 1.0).unwrap();
        assert!(matches!(step_continuity(&rho, &u, &cfg), Err(Error::PositivityLoss { .. })));
    }

    #[test]
    fn comparison_bound_values() {
        assert_eq!(comparison_bounds(1.0, 1.0, 0.0).unwrap(), (1.0, 1.0));
        let (lo, hi) = comparison_bounds(0.5, 2.0, 2f64.ln()).unwrap();
        assert!((lo - 0.25).abs() < 1e-15 && (hi - 4.0).abs() < 1e-15);
        assert!(comparison_bounds(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn probe_rejects_identical_velocities() {
        let g = grid1();
        let rho = SpectralField::constant(&g, 1.0);
        let u = VectorField::new(vec![SpectralField::constant(&g, 0.5)]).unwrap();
        let cfg = ContinuityStepConfig::new(0.1, 0.01).unwrap();
        assert!(matches!(
            continuity_contraction_probe(&rho, &u, &u, &cfg, 0.1),
            Err(Error::IdenticalVelocities)
        ));
    }

    #[test]
    fn stability_bound_formula() {
        let g = TorusGrid::cubic(3, 16).unwrap();
        let h = 2.0 * std::f64::consts::PI / 16.0;
        assert!((stability_bound(&g, 1.0) - 0.125 * h).abs() < 1e-15);
    }
}
