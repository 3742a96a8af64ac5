use nsp_core::continuity::{
    comparison_bounds, continuity_contraction_probe, divergence_linf, stability_bound, step_continuity,
    step_continuity_forced, ContinuityStepConfig,
};
use nsp_core::torus::{SpectralField, TorusGrid, VectorField};

/// `rho* = 2 + sin(x - t) e^{-t}` solves the forced equation with `u = 1` and
/// source `(eps - 1) sin(x - t) e^{-t}`.
fn manufactured_error(dt: f64, eps: f64) -> f64 {
    let grid = TorusGrid::cubic(1, 16).unwrap();
    let exact = |t: f64| SpectralField::from_fn(&grid, move |x| 2.0 + (x[0] - t).sin() * (-t).exp());
    let u = VectorField::new(vec![SpectralField::constant(&grid, 1.0)]).unwrap();
    assert!(dt <= stability_bound(&grid, 1.0));
    let cfg = ContinuityStepConfig::new(eps, dt).unwrap();
    let steps = (1.0 / dt).round() as usize;
    let mut rho = exact(0.0);
    for s in 1..=steps {
        let t = s as f64 * dt;
        let forcing = SpectralField::from_fn(&grid, |x| (eps - 1.0) * (x[0] - t).sin() * (-t).exp());
        rho = step_continuity_forced(&rho, &u, &forcing, &cfg).unwrap();
    }
    (&rho - &exact(1.0)).l2_norm()
}

#[test]
fn manufactured_solution_converges_first_order() {
    let errs: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|&dt| manufactured_error(dt, 0.1)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.0 - 0.05, "errors {errs:?}, order {order}");
    }
}

fn envelope_run(points: usize) -> (f64, f64, f64, f64) {
    let grid = TorusGrid::cubic(1, points).unwrap();
    let rho0 = SpectralField::from_fn(&grid, |x| 1.0 + 0.2 * x[0].cos());
    let u = VectorField::new(vec![SpectralField::from_fn(&grid, |x| 0.5 * x[0].sin())]).unwrap();
    let dt = 0.5 * stability_bound(&grid, 0.5);
    let steps = (1.0 / dt).ceil() as usize;
    let cfg = ContinuityStepConfig::new(0.01, 1.0 / steps as f64).unwrap();
    let mut rho = rho0.clone();
    let mut d = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..steps {
        d += cfg.dt * divergence_linf(&u);
        rho = step_continuity(&rho, &u, &cfg).unwrap();
        lo = lo.min(rho.min_physical().0);
        hi = hi.max(rho.max_physical().0);
    }
    let (bl, bh) = comparison_bounds(rho0.min_physical().0, rho0.max_physical().0, d).unwrap();
    (lo, hi, bl, bh)
}

#[test]
fn density_stays_inside_comparison_envelope_at_two_resolutions() {
    for points in [32, 64] {
        let (lo, hi, bl, bh) = envelope_run(points);
        assert!(lo >= bl - 1e-3, "N = {points}: min {lo} below {bl}");
        assert!(hi <= bh + 1e-3, "N = {points}: max {hi} above {bh}");
        assert!(lo >= 0.5 * bl);
    }
}

#[test]
fn contraction_ratio_scales_with_horizon() {
    let grid = TorusGrid::cubic(1, 32).unwrap();
    let rho0 = SpectralField::from_fn(&grid, |x| 1.0 + 0.3 * x[0].cos());
    let u1 = VectorField::new(vec![SpectralField::from_fn(&grid, |x| 0.4 * x[0].sin())]).unwrap();
    let u2 = VectorField::new(vec![SpectralField::from_fn(&grid, |x| 0.4 * x[0].sin() + 1e-6 * (2.0 * x[0]).cos())])
        .unwrap();
    let cfg = ContinuityStepConfig::new(0.05, 2.5e-3).unwrap();
    let ratios: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&tau| continuity_contraction_probe(&rho0, &u1, &u2, &cfg, tau).unwrap())
        .collect();
    for w in ratios.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 0.9, "ratios {ratios:?}");
    }
}
