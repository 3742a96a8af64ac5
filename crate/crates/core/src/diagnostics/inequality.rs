use serde::{Deserialize, Serialize};

use super::{DiagnosticsRecord, DissipationLedger};
use crate::continuity::comparison_bounds;
use crate::galerkin::Trajectory;

/// A record at which an inequality failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordViolation {
    pub index: usize,
    pub step: usize,
    pub time: f64,
    pub margin: f64,
}

/// A ledger entry that went negative or decreased.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerViolation {
    pub index: usize,
    pub step: usize,
    pub field: String,
    pub value: f64,
    pub decreased: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyInequalityReport {
    pub passed: bool,
    /// `min_t [E0 + sources + slack * steps - E(t) - dissipations(t)]`.
    pub worst_margin: f64,
    pub worst_time: f64,
    pub first_violation: Option<RecordViolation>,
    /// Signed `E(t) + dissipations(t) - E0 - sources(t)` of largest magnitude
    /// (slack excluded); its dt-scaling measures the scheme's consistency.
    pub max_abs_defect: f64,
    pub ledger_violations: Vec<LedgerViolation>,
}

/// `E(t) + ledger(t) <= E(0) + source(t) + press_defect(t) + slack_per_step * steps`
/// at every record, plus nonnegativity and monotonicity of every ledger entry.
pub fn check_energy_records(records: &[DiagnosticsRecord], slack_per_step: f64) -> EnergyInequalityReport {
    let mut report = EnergyInequalityReport {
        passed: true,
        worst_margin: f64::INFINITY,
        worst_time: 0.0,
        first_violation: None,
        max_abs_defect: 0.0,
        ledger_violations: Vec::new(),
    };
    let Some(first) = records.first() else {
        return report;
    };
    let e0 = first.total;
    let mut prev: Option<DissipationLedger> = None;
    for (index, r) in records.iter().enumerate() {
        let lhs = r.total + r.ledger().total();
        let defect = lhs - (e0 + r.energy_source + r.press_defect);
        let margin = slack_per_step * r.step as f64 - defect;
        if defect.abs() > report.max_abs_defect.abs() {
            report.max_abs_defect = defect;
        }
        if margin < report.worst_margin {
            report.worst_margin = margin;
            report.worst_time = r.time;
        }
        if !(margin >= 0.0) && report.first_violation.is_none() {
            report.first_violation = Some(RecordViolation { index, step: r.step, time: r.time, margin });
        }
        let ledger = r.ledger();
        for (k, (&v, name)) in ledger.values().iter().zip(DissipationLedger::FIELDS).enumerate() {
            let decreased = prev.map(|p| v < p.values()[k]).unwrap_or(false);
            if v < 0.0 || decreased {
                report.ledger_violations.push(LedgerViolation {
                    index,
                    step: r.step,
                    field: name.to_string(),
                    value: v,
                    decreased,
                });
            }
        }
        prev = Some(ledger);
    }
    report.passed = report.first_violation.is_none() && report.ledger_violations.is_empty();
    report
}

pub fn check_energy_inequality(trajectory: &Trajectory, slack_per_step: f64) -> EnergyInequalityReport {
    check_energy_records(&trajectory.records, slack_per_step)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyInequalityReport {
    pub passed: bool,
    /// `min_t [2 H0^+ + S(t) - H(t)]` with `H = bd_core + log_term`.
    pub worst_margin: f64,
    pub first_violation: Option<RecordViolation>,
    /// Largest `H(t) / (2 H0^+ + S(t))`.
    pub worst_ratio: f64,
}

/// `bd_core + log_term <= (H0 + |H0|) + ent_source` at every record.
pub fn check_entropy_records(records: &[DiagnosticsRecord]) -> EntropyInequalityReport {
    let mut report = EntropyInequalityReport {
        passed: true,
        worst_margin: f64::INFINITY,
        first_violation: None,
        worst_ratio: 0.0,
    };
    let Some(first) = records.first() else {
        return report;
    };
    let h0 = first.bd_core + first.log_term;
    let base = h0 + h0.abs();
    for (index, r) in records.iter().enumerate() {
        let h = r.bd_core + r.log_term;
        let bound = base + r.ent_source;
        let margin = bound - h;
        report.worst_margin = report.worst_margin.min(margin);
        if bound > 0.0 {
            report.worst_ratio = report.worst_ratio.max(h / bound);
        }
        if !(margin >= 0.0) && report.first_violation.is_none() {
            report.first_violation = Some(RecordViolation { index, step: r.step, time: r.time, margin });
        }
    }
    report.passed = report.first_violation.is_none();
    report
}

pub fn check_entropy_inequality(trajectory: &Trajectory) -> EntropyInequalityReport {
    check_entropy_records(&trajectory.records)
}

/// Constant `C` in the per-step slack `C dt^2` of the discrete energy inequality.
pub const ENERGY_SLACK_C: f64 = 1.0;

pub fn energy_slack_per_step(dt: f64) -> f64 {
    ENERGY_SLACK_C * dt * dt
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub passed: bool,
    /// Largest excursion of `min rho` below, or `max rho` above, the envelope.
    pub worst_excursion: f64,
    pub first_violation: Option<RecordViolation>,
}

/// `rho_min(0) e^{-D(t)} - tol <= min rho(t)` and `max rho(t) <= rho_max(0) e^{D(t)} + tol`
/// with `D` the accumulated `||div u||_inf`.
pub fn check_comparison_records(records: &[DiagnosticsRecord], tol: f64) -> ComparisonReport {
    let mut report = ComparisonReport {
        passed: true,
        worst_excursion: f64::NEG_INFINITY,
        first_violation: None,
    };
    let Some(first) = records.first() else {
        return report;
    };
    for (index, r) in records.iter().enumerate() {
        let excursion = match comparison_bounds(first.min_rho, first.max_rho, r.divu_linf_integral) {
            Ok((lo, hi)) => (lo - r.min_rho).max(r.max_rho - hi),
            Err(_) => f64::INFINITY,
        };
        report.worst_excursion = report.worst_excursion.max(excursion);
        if !(excursion <= tol) && report.first_violation.is_none() {
            report.first_violation = Some(RecordViolation {
                index,
                step: r.step,
                time: r.time,
                margin: tol - excursion,
            });
        }
    }
    report.passed = report.first_violation.is_none();
    report
}

/// Largest `|mass_j - mass_{j-1}| / (|mass_0| (step_j - step_{j-1}))` over consecutive records.
pub fn max_mass_drift_per_step(records: &[DiagnosticsRecord]) -> f64 {
    let Some(first) = records.first() else {
        return 0.0;
    };
    let scale = first.mass.abs().max(f64::MIN_POSITIVE);
    records
        .windows(2)
        .map(|w| (w[1].mass - w[0].mass).abs() / (scale * (w[1].step - w[0].step).max(1) as f64))
        .fold(0.0, f64::max)
}
