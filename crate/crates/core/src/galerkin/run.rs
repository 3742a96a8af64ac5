use serde::{Deserialize, Serialize};

use super::{picard_step, GalerkinState, RegularizationParams, PICARD_MAX_ITER, PICARD_TOL};
use crate::continuity::{divergence_linf, stability_bound};
use crate::diagnostics::{evaluate, Accumulators, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::pressure::{GammaFlags, PressureLaw};
use crate::torus::{SpectralField, TorusGrid, VectorField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub grid: TorusGrid,
    /// Set below three dimensions: a desk-scale reduction of the 3-torus.
    pub reduced_dimension: bool,
    pub n_modes: usize,
    pub params: RegularizationParams,
    pub law: PressureLaw,
    pub gamma_flags: GammaFlags,
    /// Requested step.
    pub dt_requested: f64,
    /// Step actually used: `t_end / steps`.
    pub dt: f64,
    pub t_end: f64,
    pub steps: usize,
    pub diagnostics_every: usize,
}

/// Fields at a record time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub rho: SpectralField,
    pub u: VectorField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub meta: TrajectoryMeta,
    pub records: Vec<DiagnosticsRecord>,
    /// One snapshot per record.
    pub snapshots: Vec<Snapshot>,
    /// Last successfully computed state.
    pub final_state: GalerkinState,
}

impl Trajectory {
    pub fn steps_completed(&self) -> usize {
        self.records.last().map(|r| r.step).unwrap_or(0)
    }
}

/// Advances `init` to `t_end` with repeated Picard steps.
///
/// The step is shrunk to `t_end / ceil(t_end / dt)` so the run ends exactly at
/// `t_end`. Diagnostics are recorded every `diagnostics_every` steps and at the
/// final step; the dissipation ledger is accumulated every step with the
/// left-endpoint rule. A failing step aborts with the partial trajectory.
pub fn run_simulation(
    init: GalerkinState,
    params: &RegularizationParams,
    law: &PressureLaw,
    dt: f64,
    t_end: f64,
    diagnostics_every: usize,
) -> Result<Trajectory> {
    params.validated()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParams(format!("t_end must be positive, got {t_end}")));
    }
    if diagnostics_every == 0 {
        return Err(Error::InvalidParams("diagnostics_every must be at least 1".into()));
    }
    let grid = init.rho.grid().clone();
    let bound = stability_bound(&grid, init.u.max_magnitude());
    if dt > bound {
        return Err(Error::StabilityViolation { dt, bound });
    }
    let steps = ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let dt_eff = t_end / steps as f64;
    let meta = TrajectoryMeta {
        reduced_dimension: grid.is_reduced(),
        grid,
        n_modes: init.n_modes,
        params: *params,
        law: law.clone(),
        gamma_flags: law.gamma_flags(),
        dt_requested: dt,
        dt: dt_eff,
        t_end,
        steps,
        diagnostics_every,
    };

    let t0 = init.time;
    let mut traj = Trajectory {
        meta,
        records: Vec::new(),
        snapshots: Vec::new(),
        final_state: init,
    };
    let mut acc = Accumulators::default();
    let mut kinetic0 = 0.0;
    let mut last_iterations = 0;

    let abort = |traj: Trajectory, e: Error| Error::Aborted {
        time: traj.final_state.time,
        source: Box::new(e),
        partial: Box::new(traj),
    };

    for step in 0..=steps {
        let eval = match evaluate(&traj.final_state, params, law) {
            Ok(e) => e,
            Err(e) => return Err(abort(traj, e)),
        };
        if step == 0 {
            kinetic0 = eval.energy.kinetic;
        }
        if step % diagnostics_every == 0 || step == steps {
            let s = &traj.final_state;
            traj.records.push(DiagnosticsRecord::assemble(step, s, &eval, &acc, kinetic0, last_iterations));
            traj.snapshots.push(Snapshot {
                step,
                time: s.time,
                rho: s.rho.clone(),
                u: s.u.clone(),
            });
        }
        if step == steps {
            break;
        }
        let outcome = match picard_step(&traj.final_state, dt_eff, params, law, PICARD_TOL, PICARD_MAX_ITER) {
            Ok(o) => o,
            Err(e) => return Err(abort(traj, e)),
        };
        acc.add(&eval.rates, dt_eff);
        acc.divu_linf_integral += dt_eff * divergence_linf(&outcome.state.u);
        last_iterations = outcome.iterations;
        let mut next = outcome.state;
        // keep the clock free of accumulated rounding
        next.time = t0 + (step + 1) as f64 * dt_eff;
        traj.final_state = next;
    }
    Ok(traj)
}
