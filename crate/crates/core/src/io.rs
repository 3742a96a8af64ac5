//! Run execution and persistence of configs, headers, diagnostics, snapshots
//! and summaries.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{InitialNorms, RunConfig};
use crate::diagnostics::{
    check_comparison_records, check_energy_records, check_entropy_records, definition_norms_of, energy_slack_per_step,
    max_mass_drift_per_step, read_diagnostics_csv, write_diagnostics_csv, ComparisonReport, DefinitionNorms,
    DiagnosticsRecord, EnergyInequalityReport, EntropyInequalityReport, ENERGY_SLACK_C,
};
use crate::error::{Error, Result};
use crate::galerkin::{run_simulation, Trajectory, TrajectoryMeta};
use crate::pressure::GammaFlags;
use crate::sweep::{SweepOutcome, SweepPlan};
use crate::torus::snapshot;

pub const FORMAT_VERSION: u32 = 1;

/// Absolute tolerance of the comparison-envelope check in summaries.
pub const COMPARISON_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub format_version: u32,
    pub meta: TrajectoryMeta,
    pub gamma_flags: GammaFlags,
    pub reduced_dimension: bool,
    pub initial_norms: InitialNorms,
    pub energy_slack_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub format_version: u32,
    pub completed: bool,
    pub failure: Option<String>,
    pub final_time: f64,
    pub steps_completed: usize,
    pub energy: EnergyInequalityReport,
    pub entropy: EntropyInequalityReport,
    pub comparison: ComparisonReport,
    pub max_mass_drift_per_step: f64,
    pub definition_norms: DefinitionNorms,
}

pub fn summarize(records: &[DiagnosticsRecord], dt: f64, failure: Option<String>) -> RunSummary {
    let last = records.last();
    RunSummary {
        format_version: FORMAT_VERSION,
        completed: failure.is_none(),
        failure,
        final_time: last.map(|r| r.time).unwrap_or(0.0),
        steps_completed: last.map(|r| r.step).unwrap_or(0),
        energy: check_energy_records(records, energy_slack_per_step(dt)),
        entropy: check_entropy_records(records),
        comparison: check_comparison_records(records, COMPARISON_TOL),
        max_mass_drift_per_step: max_mass_drift_per_step(records),
        definition_norms: definition_norms_of(records),
    }
}

/// A finished or aborted run.
#[derive(Debug)]
pub struct RunOutcome {
    pub header: RunHeader,
    pub trajectory: Trajectory,
    pub summary: RunSummary,
    /// Set when the run aborted; `trajectory` is then partial.
    pub failure: Option<RunAbort>,
}

#[derive(Debug)]
pub struct RunAbort {
    pub time: f64,
    pub source: Error,
}

impl std::fmt::Display for RunAbort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "run aborted at t = {}: {}", self.time, self.source)
    }
}

/// Validates `config`, builds the initial state and runs it. Validation errors
/// are returned; runtime aborts come back as an outcome with `failure` set.
pub fn execute_run(config: &RunConfig) -> Result<RunOutcome> {
    let (init, initial_norms) = config.prepare()?;
    let (trajectory, failure) = match run_simulation(
        init,
        &config.params,
        &config.pressure,
        config.dt,
        config.t_end,
        config.diagnostics_every,
    ) {
        Ok(t) => (t, None),
        Err(Error::Aborted { time, source, partial }) => (*partial, Some(RunAbort { time, source: *source })),
        Err(e) => return Err(e),
    };
    let meta = trajectory.meta.clone();
    let header = RunHeader {
        format_version: FORMAT_VERSION,
        gamma_flags: meta.gamma_flags,
        reduced_dimension: meta.reduced_dimension,
        meta,
        initial_norms,
        energy_slack_c: ENERGY_SLACK_C,
    };
    let summary = summarize(&trajectory.records, trajectory.meta.dt, failure.as_ref().map(|e| e.to_string()));
    Ok(RunOutcome { header, trajectory, summary, failure })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Writes the trajectory's CSV and snapshots into `dir`.
pub fn write_trajectory(dir: &Path, trajectory: &Trajectory) -> Result<()> {
    fs::create_dir_all(dir.join("snapshots"))?;
    write_diagnostics_csv(&trajectory.records, BufWriter::new(File::create(dir.join("diagnostics.csv"))?))?;
    for s in &trajectory.snapshots {
        snapshot::write(&dir.join(format!("snapshots/step_{:06}_rho.nspf", s.step)), &s.rho)?;
        for (a, c) in s.u.components().iter().enumerate() {
            snapshot::write(&dir.join(format!("snapshots/step_{:06}_u{a}.nspf", s.step)), c)?;
        }
    }
    Ok(())
}

/// `config.json`, `run_header.json`, `diagnostics.csv`, `snapshots/` and `summary.json`.
pub fn write_run_dir(dir: &Path, config: &RunConfig, outcome: &RunOutcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("config.json"), config)?;
    write_json(&dir.join("run_header.json"), &outcome.header)?;
    write_trajectory(dir, &outcome.trajectory)?;
    write_json(&dir.join("summary.json"), &outcome.summary)?;
    Ok(())
}

/// `plan.json`, `sweep_report.json`, and per level `level_<i>/{config.json, diagnostics.csv}`.
pub fn write_sweep_dir(dir: &Path, plan: &SweepPlan, outcome: &SweepOutcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("plan.json"), plan)?;
    write_json(&dir.join("sweep_report.json"), &outcome.report)?;
    let base = plan.base()?;
    for (i, traj) in outcome.trajectories.iter().enumerate() {
        let level = dir.join(format!("level_{i}"));
        fs::create_dir_all(&level)?;
        write_json(&level.join("config.json"), &plan.config_for(&base, i))?;
        if let Some(t) = traj {
            write_diagnostics_csv(&t.records, BufWriter::new(File::create(level.join("diagnostics.csv"))?))?;
        }
    }
    Ok(())
}

pub fn load_records(csv_path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    read_diagnostics_csv(File::open(csv_path)?)
}

/// Plot-ready columns: energy balance, entropy bound and density range per record.
pub const REPORT_COLUMNS: [&str; 11] = [
    "time",
    "total",
    "ledger_total",
    "energy_rhs",
    "energy_margin",
    "entropy",
    "entropy_bound",
    "min_rho",
    "max_rho",
    "mass",
    "picard_iterations",
];

pub fn report_csv(records: &[DiagnosticsRecord], dt: f64) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_COLUMNS)?;
    if let Some(first) = records.first() {
        let h0 = first.bd_core + first.log_term;
        let slack = energy_slack_per_step(dt);
        for r in records {
            let lhs = r.total + r.ledger().total();
            let rhs = first.total + r.energy_source + r.press_defect + slack * r.step as f64;
            w.write_record([
                r.time.to_string(),
                r.total.to_string(),
                r.ledger().total().to_string(),
                rhs.to_string(),
                (rhs - lhs).to_string(),
                (r.bd_core + r.log_term).to_string(),
                (h0 + h0.abs() + r.ent_source).to_string(),
                r.min_rho.to_string(),
                r.max_rho.to_string(),
                r.mass.to_string(),
                r.picard_iterations.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn report_text(records: &[DiagnosticsRecord], dt: f64) -> String {
    let s = summarize(records, dt, None);
    let mut out = String::new();
    let verdict = |b: bool| if b { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "records:              {}", records.len());
    let _ = writeln!(out, "final time:           {}", s.final_time);
    let _ = writeln!(out, "steps:                {}", s.steps_completed);
    let _ = writeln!(
        out,
        "energy inequality:    {} (worst margin {:e} at t = {}, largest defect {:e}, C = {})",
        verdict(s.energy.passed),
        s.energy.worst_margin,
        s.energy.worst_time,
        s.energy.max_abs_defect,
        ENERGY_SLACK_C
    );
    let _ = writeln!(
        out,
        "entropy bound:        {} (worst margin {:e}, worst ratio {})",
        verdict(s.entropy.passed),
        s.entropy.worst_margin,
        s.entropy.worst_ratio
    );
    let _ = writeln!(
        out,
        "comparison envelope:  {} (worst excursion {:e}, tol {:e})",
        verdict(s.comparison.passed),
        s.comparison.worst_excursion,
        COMPARISON_TOL
    );
    let _ = writeln!(out, "mass drift per step:  {:e}", s.max_mass_drift_per_step);
    for (name, v) in DefinitionNorms::NAMES.iter().zip(s.definition_norms.values()) {
        let _ = writeln!(out, "{name:<28}{v:e}");
    }
    out
}
