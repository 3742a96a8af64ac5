mod common;

use std::f64::consts::PI;

use nsp_core::diagnostics::{
    check_energy_records, check_identity, compute_entropy, definition_norms_of, energy_slack_per_step,
    random_smooth_pair, DissipationLedger, IdentityKind,
};
use nsp_core::galerkin::{run_simulation, GalerkinState, Trajectory};
use nsp_core::torus::{pointwise_apply, SpectralField, TorusGrid, VectorField};

use common::{perturbed_law, rich_params, seeded_config, simpson, standard_law, standard_params};

fn short_run(seed: u64) -> Trajectory {
    let config = seeded_config(2, 16, 13, seed, 0.5);
    let (state, _) = config.prepare().unwrap();
    run_simulation(state, &config.params, &config.pressure, config.dt, config.t_end, 1).unwrap()
}

#[test]
fn corrupted_ledger_is_flagged_at_the_injected_step() {
    let traj = short_run(1);
    let slack = energy_slack_per_step(traj.meta.dt);
    assert!(check_energy_records(&traj.records, slack).passed);
    let mut records = traj.records.clone();
    records[3].visc = -1.0;
    let report = check_energy_records(&records, slack);
    assert!(!report.passed);
    let v = &report.ledger_violations[0];
    assert_eq!(v.step, records[3].step);
    assert_eq!(v.field, DissipationLedger::FIELDS[0]);
}

#[test]
fn poisson_work_identity_without_diffusion() {
    let mut params = rich_params();
    params.epsilon = 0.0;
    let grid = TorusGrid::cubic(2, 24).unwrap();
    for seed in 0..5 {
        let (rho, u) = random_smooth_pair(&grid, seed);
        let r = check_identity(IdentityKind::PoissonWork, &rho, &u, &params, &perturbed_law()).unwrap();
        assert!(r < 1e-8, "seed {seed}: {r:e}");
    }
}

#[test]
fn bd_core_at_rest_matches_quadrature() {
    let grid = TorusGrid::cubic(1, 64).unwrap();
    let rho = SpectralField::from_fn(&grid, |x| 1.0 + 0.1 * x[0].cos());
    let params = standard_params();
    let state = GalerkinState::new(rho, &VectorField::zeros(&grid), 5, &params.poisson(), 0.0).unwrap();
    let got = compute_entropy(&state, &params, &standard_law()).unwrap().bd_core;
    let oracle = 0.5 * simpson(&|x| (0.1 * x.sin()).powi(2) / (1.0 + 0.1 * x.cos()), 0.0, 2.0 * PI, 1e-15);
    assert!(((got - oracle) / oracle).abs() < 1e-10, "{got} vs {oracle}");
}

#[test]
fn lgamma_norm_matches_pointwise_quadrature() {
    let traj = short_run(2);
    let gamma = traj.meta.law.gamma;
    for (record, snap) in traj.records.iter().zip(&traj.snapshots) {
        let integral = pointwise_apply(&[&snap.rho], |v| v[0].powf(gamma)).unwrap().integrate();
        let want = integral.powf(1.0 / gamma);
        assert!((record.rho_lgamma - want).abs() < 1e-10 * want, "{} vs {want}", record.rho_lgamma);
    }
}

#[test]
fn definition_norms_grow_along_prefixes() {
    let traj = short_run(3);
    let mut prev = definition_norms_of(&traj.records[..1]).values();
    for end in 2..=traj.records.len() {
        let cur = definition_norms_of(&traj.records[..end]).values();
        for (c, p) in cur.iter().zip(&prev) {
            assert!(c >= p, "{cur:?} after {prev:?}");
        }
        prev = cur;
    }
    let first = &traj.records[0];
    assert!((definition_norms_of(&traj.records).sup_rho_l1 - first.rho_l1).abs() < 1e-12 * first.rho_l1);
}

#[test]
fn repulsive_energy_defect_shrinks_under_step_refinement() {
    let mut config = seeded_config(2, 16, 13, 5, 0.5);
    config.params.lambda_sign = 1;
    config.pressure = perturbed_law();
    config.dt = common::stable_dt(&config);
    let defect = |dt: f64| {
        let (state, _) = config.prepare().unwrap();
        let traj = run_simulation(state, &config.params, &config.pressure, dt, config.t_end, 1).unwrap();
        let report = check_energy_records(&traj.records, energy_slack_per_step(traj.meta.dt));
        assert!(report.passed, "{report:?}");
        report.max_abs_defect.abs()
    };
    let (d1, d2) = (defect(config.dt), defect(config.dt / 2.0));
    let ratio = d1 / d2;
    assert!((1.5..=3.0).contains(&ratio), "{d1:e} -> {d2:e}, ratio {ratio}");
}
