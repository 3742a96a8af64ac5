//! Regularization-limit sweeps: one run per parameter level, uniform-bound
//! flags on the definition norms, and Cauchy-distance proxies between levels.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::diagnostics::{definition_norms, DefinitionNorms, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::galerkin::{run_simulation, Trajectory};

/// Multiple of the first-level value a norm may reach and still count as uniform.
pub const UNIFORM_FACTOR: f64 = 3.0;

/// Environment variable capping sweep worker threads.
pub const THREADS_ENV: &str = "NSP_THREADS";

/// Label attached to every Cauchy trend in a report.
pub const PROXY_NOTE: &str =
    "Cauchy distances are convergence proxies between consecutive levels, not convergence certificates";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepStage {
    /// `n` increasing.
    ModeGrowth,
    /// `epsilon = mu` decreasing.
    EpsilonMu,
    /// `eta` decreasing.
    Eta,
    /// `delta = r0` decreasing, with `epsilon = mu = eta = 0`.
    DeltaR0,
}

impl SweepStage {
    pub fn name(self) -> &'static str {
        match self {
            SweepStage::ModeGrowth => "ModeGrowth",
            SweepStage::EpsilonMu => "EpsilonMu",
            SweepStage::Eta => "Eta",
            SweepStage::DeltaR0 => "DeltaR0",
        }
    }
}

/// Base configuration held inline or referenced by path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseConfig {
    Inline(Box<RunConfig>),
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub stage: SweepStage,
    pub values: Vec<f64>,
    pub base_config: BaseConfig,
}

impl SweepPlan {
    /// Reads a plan, resolving a relative `base_config` path against the plan's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut plan: SweepPlan = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if let BaseConfig::Path(p) = &plan.base_config {
            let resolved = if p.is_relative() {
                path.parent().unwrap_or(Path::new(".")).join(p)
            } else {
                p.clone()
            };
            let cfg: RunConfig = serde_json::from_str(&std::fs::read_to_string(resolved)?)?;
            plan.base_config = BaseConfig::Inline(Box::new(cfg));
        }
        Ok(plan)
    }

    pub fn base(&self) -> Result<RunConfig> {
        match &self.base_config {
            BaseConfig::Inline(c) => Ok((**c).clone()),
            BaseConfig::Path(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        }
    }

    pub fn validate(&self) -> Result<RunConfig> {
        let base = self.base()?;
        base.validate()?;
        if self.values.is_empty() {
            return Err(Error::InvalidPlan("no values".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidPlan(format!("non-finite value {v}")));
        }
        let pairs = self.values.windows(2);
        match self.stage {
            SweepStage::ModeGrowth => {
                if let Some(v) = self.values.iter().find(|&&v| v < 1.0 || v.fract() != 0.0 || (v as u64).is_multiple_of(2)) {
                    return Err(Error::InvalidPlan(format!("mode counts must be odd positive integers, got {v}")));
                }
                if pairs.clone().any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidPlan("mode counts must be strictly increasing".into()));
                }
            }
            _ => {
                if let Some(v) = self.values.iter().find(|&&v| v < 0.0) {
                    return Err(Error::InvalidPlan(format!("parameter values must be nonnegative, got {v}")));
                }
                if pairs.clone().any(|w| w[1] >= w[0]) {
                    return Err(Error::InvalidPlan("parameter values must be strictly decreasing".into()));
                }
            }
        }
        if self.stage == SweepStage::DeltaR0 {
            let p = &base.params;
            if p.epsilon != 0.0 || p.mu != 0.0 || p.eta != 0.0 {
                return Err(Error::InvalidPlan(
                    "a DeltaR0 sweep requires epsilon = mu = eta = 0 in the base config".into(),
                ));
            }
        }
        for i in 0..self.values.len() {
            self.config_for(&base, i).validate()?;
        }
        Ok(base)
    }

    /// The base configuration with the level-`i` parameters substituted.
    pub fn config_for(&self, base: &RunConfig, i: usize) -> RunConfig {
        let v = self.values[i];
        let mut c = base.clone();
        c.output_dir = None;
        match self.stage {
            SweepStage::ModeGrowth => c.n_modes = v as usize,
            SweepStage::EpsilonMu => {
                c.params.epsilon = v;
                c.params.mu = v;
            }
            SweepStage::Eta => c.params.eta = v,
            SweepStage::DeltaR0 => {
                c.params.delta = v;
                c.params.r0 = v;
            }
        }
        c
    }
}

/// Outcome of one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub value: f64,
    pub completed: bool,
    pub failure: Option<String>,
    pub failed_at: Option<f64>,
    pub steps_completed: usize,
    /// Norms over the (possibly partial) trajectory.
    pub norms: Option<DefinitionNorms>,
    pub final_record: Option<DiagnosticsRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformFlag {
    pub norm: String,
    pub baseline: f64,
    pub max: f64,
    pub uniform: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyTrend {
    pub field: CauchyField,
    /// Distance between levels `i` and `i + 1`; `None` if either run failed.
    pub distances: Vec<Option<f64>>,
    /// Strictly decreasing consecutive distances; `None` with fewer than two.
    pub decreasing: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub quantity: String,
    pub sequence: Vec<f64>,
    /// Least-squares slope of `log quantity` against `log value`.
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub format_version: u32,
    pub stage: SweepStage,
    pub values: Vec<f64>,
    pub levels: Vec<LevelResult>,
    pub all_completed: bool,
    pub uniform: Vec<UniformFlag>,
    pub cauchy: Vec<CauchyTrend>,
    pub cauchy_note: String,
    pub scaling: Vec<ScalingFit>,
}

pub struct SweepOutcome {
    pub report: SweepReport,
    /// Full or partial trajectory per level, `None` if the run never started.
    pub trajectories: Vec<Option<Trajectory>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CauchyField {
    Rho,
    Momentum,
    SqrtRhoU,
}

impl CauchyField {
    pub const ALL: [CauchyField; 3] = [CauchyField::Rho, CauchyField::Momentum, CauchyField::SqrtRhoU];
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))
}

fn run_level(config: &RunConfig) -> std::result::Result<Trajectory, (Option<Trajectory>, String, Option<f64>)> {
    let (init, _) = config.prepare().map_err(|e| (None, e.to_string(), None))?;
    match run_simulation(init, &config.params, &config.pressure, config.dt, config.t_end, config.diagnostics_every) {
        Ok(t) => Ok(t),
        Err(Error::Aborted { time, source, partial }) => Err((Some(*partial), source.to_string(), Some(time))),
        Err(e) => Err((None, e.to_string(), None)),
    }
}

pub fn run_sweep(plan: &SweepPlan) -> Result<SweepReport> {
    Ok(run_sweep_detailed(plan)?.report)
}

/// Runs every level concurrently; the report is assembled in plan order.
pub fn run_sweep_detailed(plan: &SweepPlan) -> Result<SweepOutcome> {
    let base = plan.validate()?;
    let configs: Vec<RunConfig> = (0..plan.values.len()).map(|i| plan.config_for(&base, i)).collect();
    let results: Vec<_> = thread_pool()?.install(|| configs.par_iter().map(run_level).collect());

    let mut levels = Vec::with_capacity(results.len());
    let mut trajectories = Vec::with_capacity(results.len());
    for (&value, r) in plan.values.iter().zip(results) {
        let (traj, failure, failed_at) = match r {
            Ok(t) => (Some(t), None, None),
            Err((t, msg, at)) => (t, Some(msg), at),
        };
        levels.push(LevelResult {
            value,
            completed: failure.is_none(),
            failure,
            failed_at,
            steps_completed: traj.as_ref().map(|t| t.steps_completed()).unwrap_or(0),
            norms: traj.as_ref().map(definition_norms),
            final_record: traj.as_ref().and_then(|t| t.records.last().cloned()),
        });
        trajectories.push(traj);
    }

    let cauchy = CauchyField::ALL
        .iter()
        .map(|&field| {
            let distances: Vec<Option<f64>> = (1..levels.len())
                .map(|i| match (&trajectories[i - 1], &trajectories[i]) {
                    (Some(a), Some(b)) if levels[i - 1].completed && levels[i].completed => {
                        cauchy_distance(a, b, field).ok()
                    }
                    _ => None,
                })
                .collect();
            CauchyTrend { field, decreasing: decreasing_trend(&distances), distances }
        })
        .collect();

    let report = SweepReport {
        format_version: 1,
        stage: plan.stage,
        values: plan.values.clone(),
        all_completed: levels.iter().all(|l| l.completed),
        uniform: uniform_flags(&levels.iter().map(|l| l.norms).collect::<Vec<_>>()),
        cauchy,
        cauchy_note: PROXY_NOTE.to_string(),
        scaling: scaling_fits(plan.stage, &levels),
        levels,
    };
    Ok(SweepOutcome { report, trajectories })
}

fn decreasing_trend(distances: &[Option<f64>]) -> Option<bool> {
    if distances.len() < 2 {
        return None;
    }
    let d: Option<Vec<f64>> = distances.iter().copied().collect();
    Some(d.is_some_and(|d| d.windows(2).all(|w| w[1] < w[0])))
}

/// Per-norm flags: every level's value at most [`UNIFORM_FACTOR`] times the
/// first available level's value. Levels without norms are skipped.
pub fn uniform_flags(norms: &[Option<DefinitionNorms>]) -> Vec<UniformFlag> {
    let present: Vec<[f64; 7]> = norms.iter().flatten().map(|n| n.values()).collect();
    DefinitionNorms::NAMES
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let baseline = present.first().map(|v| v[j]).unwrap_or(f64::NAN);
            let max = present.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max);
            UniformFlag {
                norm: name.to_string(),
                baseline,
                max,
                uniform: !present.is_empty() && max <= UNIFORM_FACTOR * baseline,
            }
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x` over pairs with both positive
/// and finite; `None` with fewer than two such pairs.
pub fn fit_exponent(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite() && **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn scaling_fits(stage: SweepStage, levels: &[LevelResult]) -> Vec<ScalingFit> {
    type Extract = fn(&DiagnosticsRecord, f64) -> f64;
    let quantities: Vec<(&str, Extract)> = match stage {
        SweepStage::ModeGrowth => return Vec::new(),
        SweepStage::EpsilonMu => vec![
            ("press_diff", |r, _| r.press_diff),
            ("cold_diff", |r, _| r.cold_diff),
            ("biharm", |r, _| r.biharm),
            ("ent_lap", |r, _| r.ent_lap),
            ("ent_log", |r, _| r.ent_log),
        ],
        SweepStage::Eta => vec![("eta_cold_time_integral", |r, eta| eta * r.cold_time_integral)],
        SweepStage::DeltaR0 => vec![("drag0", |r, _| r.drag0), ("ent_hyper", |r, _| r.ent_hyper)],
    };
    let x: Vec<f64> = levels.iter().map(|l| l.value).collect();
    quantities
        .into_iter()
        .map(|(name, f)| {
            let sequence: Vec<f64> = levels
                .iter()
                .map(|l| match (&l.final_record, l.completed) {
                    (Some(r), true) => f(r, l.value),
                    _ => f64::NAN,
                })
                .collect();
            ScalingFit {
                quantity: name.to_string(),
                exponent: fit_exponent(&x, &sequence),
                sequence,
            }
        })
        .collect()
}

/// Discrete `L^2(0,T; L^2)` distance between a derived field of two
/// trajectories: left-endpoint rule over the shared snapshot times.
pub fn cauchy_distance(a: &Trajectory, b: &Trajectory, field: CauchyField) -> Result<f64> {
    if a.meta.grid != b.meta.grid {
        return Err(Error::IncompatibleTrajectories("different grids".into()));
    }
    if a.meta.dt != b.meta.dt || a.meta.t_end != b.meta.t_end {
        return Err(Error::IncompatibleTrajectories("different time steps or horizons".into()));
    }
    if a.snapshots.len() != b.snapshots.len()
        || a.snapshots.iter().zip(&b.snapshots).any(|(x, y)| x.time != y.time)
    {
        return Err(Error::IncompatibleTrajectories("different snapshot times".into()));
    }
    let w = a.meta.grid.cell_volume();
    let mut total = 0.0;
    for j in 0..a.snapshots.len().saturating_sub(1) {
        let tau = a.snapshots[j + 1].time - a.snapshots[j].time;
        let (sa, sb) = (&a.snapshots[j], &b.snapshots[j]);
        let fa = derived(&sa.rho.to_physical(), &sa.u.to_physical(), field);
        let fb = derived(&sb.rho.to_physical(), &sb.u.to_physical(), field);
        let sq: f64 = fa
            .iter()
            .zip(&fb)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>())
            .sum();
        total += tau * w * sq;
    }
    Ok(total.sqrt())
}

fn derived(rho: &[f64], u: &[Vec<f64>], field: CauchyField) -> Vec<Vec<f64>> {
    match field {
        CauchyField::Rho => vec![rho.to_vec()],
        CauchyField::Momentum => u.iter().map(|c| c.iter().zip(rho).map(|(v, r)| r * v).collect()).collect(),
        CauchyField::SqrtRhoU => u
            .iter()
            .map(|c| c.iter().zip(rho).map(|(v, r)| r.max(0.0).sqrt() * v).collect())
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColdPressureTrend {
    pub etas: Vec<f64>,
    /// `eta_k * int int rho^-6` per level.
    pub sequence: Vec<f64>,
    pub verdict: Verdict,
    /// First index whose entry fails to decrease (or is not finite).
    pub offending_index: Option<usize>,
    /// Least-squares order in `eta`.
    pub order: Option<f64>,
}

/// Verdict on an externally supplied sequence: each entry finite, nonnegative
/// and not above its predecessor beyond a `1e-12` relative tolerance.
pub fn cold_pressure_trend(etas: &[f64], sequence: &[f64]) -> ColdPressureTrend {
    let scale = sequence.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;
    let offending_index = sequence.iter().enumerate().position(|(i, &v)| {
        !(v.is_finite() && v >= 0.0) || (i > 0 && !(v <= sequence[i - 1] + tol))
    });
    ColdPressureTrend {
        etas: etas.to_vec(),
        sequence: sequence.to_vec(),
        verdict: if offending_index.is_none() { Verdict::Pass } else { Verdict::Fail },
        offending_index,
        order: fit_exponent(etas, sequence),
    }
}

/// The vanishing-cold-pressure check on an `Eta` report with at least three levels.
pub fn cold_pressure_vanishing(report: &SweepReport) -> Result<ColdPressureTrend> {
    if report.stage != SweepStage::Eta {
        return Err(Error::WrongStage {
            expected: SweepStage::Eta.name().into(),
            got: report.stage.name().into(),
        });
    }
    if report.levels.len() < 3 {
        return Err(Error::InvalidPlan(format!(
            "cold pressure trend needs at least 3 levels, got {}",
            report.levels.len()
        )));
    }
    let sequence: Vec<f64> = report
        .levels
        .iter()
        .map(|l| match (&l.final_record, l.completed) {
            (Some(r), true) => l.value * r.cold_time_integral,
            _ => f64::NAN,
        })
        .collect();
    Ok(cold_pressure_trend(&report.values, &sequence))
}
