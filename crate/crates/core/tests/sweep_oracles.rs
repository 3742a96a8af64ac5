mod common;

use nsp_core::config::{InitialDataSpec, RunConfig};
use nsp_core::galerkin::{run_simulation, Trajectory};
use nsp_core::sweep::{cauchy_distance, run_sweep, run_sweep_detailed, BaseConfig, CauchyField, SweepPlan, SweepStage};

use common::{config_with, seeded_config};

fn plan(stage: SweepStage, values: Vec<f64>, base: RunConfig) -> SweepPlan {
    SweepPlan { stage, values, base_config: BaseConfig::Inline(Box::new(base)) }
}

fn run(config: &RunConfig) -> Trajectory {
    let (state, _) = config.prepare().unwrap();
    run_simulation(state, &config.params, &config.pressure, config.dt, config.t_end, config.diagnostics_every).unwrap()
}

fn exponent(report: &nsp_core::sweep::SweepReport, name: &str) -> f64 {
    let fit = report.scaling.iter().find(|f| f.quantity == name).unwrap();
    fit.exponent.unwrap_or_else(|| panic!("{name}: {:?}", fit.sequence))
}

#[test]
fn cauchy_distance_is_a_metric_on_perturbed_runs() {
    let base = seeded_config(2, 16, 13, 9, 0.5);
    let runs: Vec<Trajectory> = [1e-3, 5e-4, 2e-4]
        .iter()
        .map(|&eta| {
            let mut c = base.clone();
            c.params.eta = eta;
            run(&c)
        })
        .collect();
    for field in CauchyField::ALL {
        let d = |i: usize, j: usize| cauchy_distance(&runs[i], &runs[j], field).unwrap();
        assert_eq!(d(0, 0), 0.0);
        assert_eq!(d(0, 1), d(1, 0));
        assert!(d(0, 1) > 0.0);
        for (i, j, k) in [(0, 1, 2), (1, 0, 2), (0, 2, 1)] {
            assert!(d(i, k) <= d(i, j) + d(j, k) + 1e-12, "{field:?}");
        }
    }
}

#[test]
fn cauchy_distance_rejects_mismatched_runs() {
    let a = run(&seeded_config(2, 16, 13, 1, 0.5));
    let mut c = seeded_config(2, 16, 13, 1, 0.5);
    c.dt /= 2.0;
    let b = run(&c);
    assert!(cauchy_distance(&a, &b, CauchyField::Rho).is_err());
}

#[test]
fn mode_growth_on_equilibrium_is_degenerate() {
    let base = config_with(2, 16, 5, InitialDataSpec::uniform(1.0), 0.5);
    let report = run_sweep(&plan(SweepStage::ModeGrowth, vec![5.0, 9.0, 13.0], base)).unwrap();
    assert!(report.all_completed);
    assert!(report.uniform.iter().all(|f| f.uniform));
    for trend in &report.cauchy {
        assert!(trend.distances.iter().all(|d| *d == Some(0.0)), "{trend:?}");
    }
    assert!(report.scaling.is_empty());
}

#[test]
fn epsilon_weighted_dissipations_scale_linearly() {
    let base = seeded_config(2, 16, 13, 2, 0.5);
    let report = run_sweep(&plan(SweepStage::EpsilonMu, vec![1e-2, 5e-3, 2.5e-3], base)).unwrap();
    assert!(report.all_completed);
    for name in ["press_diff", "cold_diff", "biharm"] {
        let p = exponent(&report, name);
        assert!((0.8..=1.2).contains(&p), "{name}: exponent {p}");
    }
}

#[test]
fn linear_drag_dissipation_vanishes_with_r0() {
    let mut base = seeded_config(2, 16, 13, 2, 0.5);
    base.params.epsilon = 0.0;
    base.params.mu = 0.0;
    base.params.eta = 0.0;
    let report = run_sweep(&plan(SweepStage::DeltaR0, vec![1e-2, 5e-3, 2.5e-3], base)).unwrap();
    assert!(report.all_completed, "{:?}", report.levels);
    let p = exponent(&report, "drag0");
    assert!(p >= 0.9, "drag0 exponent {p}");
}

#[test]
fn repeated_sweeps_give_identical_reports() {
    let base = seeded_config(1, 32, 9, 4, 0.5);
    let p = plan(SweepStage::Eta, vec![1e-3, 5e-4, 2.5e-4], base);
    let a = serde_json::to_string(&run_sweep_detailed(&p).unwrap().report).unwrap();
    let b = serde_json::to_string(&run_sweep(&p).unwrap()).unwrap();
    assert_eq!(a, b);
}
