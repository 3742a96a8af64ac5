//! Command-line surface: `run`, `sweep`, `check-identities`, `certify-pressure`, `report`.
//!
//! Exit codes: 0 success (including a FAIL certification verdict), 1 validation
//! or usage error, 2 runtime abort.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::RunConfig;
use crate::diagnostics::{check_identity, random_smooth_pair, IdentityKind};
use crate::error::{Error, Result};
use crate::galerkin::RegularizationParams;
use crate::io::{execute_run, load_records, read_json, report_csv, report_text, write_run_dir, write_sweep_dir, RunHeader};
use crate::pressure::PressureLaw;
use crate::sweep::{run_sweep_detailed, SweepPlan};
use crate::torus::{snapshot, TorusGrid, VectorField};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_ABORT: i32 = 2;

/// Residual threshold of the identity suite.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "nsp", version, about = "Faedo-Galerkin solver for compressible Navier-Stokes-Poisson on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one trajectory from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a regularization-limit sweep from a JSON plan.
    Sweep {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the integration-by-parts identities on a snapshot or on random smooth fields.
    CheckIdentities {
        /// Supplies regularization parameters and pressure law; defaults otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Density snapshot; requires `--velocity` once per component.
        #[arg(long, requires = "velocity")]
        density: Option<PathBuf>,
        #[arg(long, num_args = 1..)]
        velocity: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long, default_value_t = 20)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certify the pressure-derivative envelope on a log-uniform sample.
    CertifyPressure {
        /// Reads the law from a run config instead of the flags below.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 5.0 / 3.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.0)]
        b: f64,
        #[arg(long, default_value_t = 0.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 1.0)]
        frequency: f64,
        #[arg(long, default_value_t = 10.0)]
        z_max: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Summarize a run's diagnostics.
    Report {
        /// Run output directory.
        #[arg(long, conflicts_with = "csv", required_unless_present = "csv")]
        dir: Option<PathBuf>,
        /// Bare diagnostics CSV; `--dt` sets the slack step.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Csv,
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_ABORT
            }
        }
    }
}

// Unreadable inputs are a validation failure, not a runtime abort.
fn input<T>(path: &Path, loaded: Result<T>) -> Result<T> {
    loaded.map_err(|e| match e {
        Error::Io(_) | Error::Csv(_) => Error::InvalidParams(format!("{}: {e}", path.display())),
        other => other,
    })
}

// A closed stdout (e.g. piped into `head`) ends output quietly instead of panicking.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    emit(&format!("{}\n", serde_json::to_string_pretty(value)?));
    Ok(())
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Run { config, output } => run(&config, output),
        Command::Sweep { plan, output } => sweep(&plan, output),
        Command::CheckIdentities {
            config,
            density,
            velocity,
            dim,
            points,
            count,
            seed,
        } => check_identities(config.as_deref(), density, velocity, dim, points, count, seed),
        Command::CertifyPressure {
            config,
            gamma,
            a,
            b,
            amplitude,
            frequency,
            z_max,
            samples,
        } => {
            let law = match config {
                Some(p) => input(&p, read_json::<RunConfig>(&p))?.pressure,
                None if amplitude == 0.0 => PressureLaw::pure_power(gamma, a)?,
                None => PressureLaw::perturbed(gamma, a, b, amplitude, frequency)?,
            };
            let report = law.certify_envelope(z_max, samples)?;
            emit(&format!("verdict: {}\n", if report.passed { "PASS" } else { "FAIL" }));
            print_json(&report)?;
            Ok(EXIT_OK)
        }
        Command::Report { dir, csv, dt, format } => {
            let (records, dt) = match (dir, csv) {
                (Some(d), _) => {
                    let hp = d.join("run_header.json");
                    let header: RunHeader = input(&hp, read_json(&hp))?;
                    let cp = d.join("diagnostics.csv");
                    (input(&cp, load_records(&cp))?, dt.unwrap_or(header.meta.dt))
                }
                (None, Some(c)) => (input(&c, load_records(&c))?, dt.unwrap_or(0.0)),
                (None, None) => return Err(Error::InvalidParams("report needs --dir or --csv".into())),
            };
            match format {
                ReportFormat::Text => emit(&report_text(&records, dt)),
                ReportFormat::Csv => emit(&report_csv(&records, dt)?),
            }
            Ok(EXIT_OK)
        }
    }
}

fn run(config_path: &Path, output: Option<PathBuf>) -> Result<i32> {
    let config: RunConfig = input(config_path, read_json(config_path))?;
    let outcome = execute_run(&config)?;
    if let Some(dir) = output.or_else(|| config.output_dir.clone()) {
        write_run_dir(&dir, &config, &outcome)?;
        emit(&format!("wrote {}\n", dir.display()));
    }
    emit(&report_text(&outcome.trajectory.records, outcome.header.meta.dt));
    match &outcome.failure {
        Some(abort) => {
            eprintln!("error: {abort}");
            Ok(EXIT_ABORT)
        }
        None => Ok(EXIT_OK),
    }
}

fn sweep(plan_path: &Path, output: Option<PathBuf>) -> Result<i32> {
    let plan = input(plan_path, SweepPlan::load(plan_path))?;
    let outcome = run_sweep_detailed(&plan)?;
    if let Some(dir) = output {
        write_sweep_dir(&dir, &plan, &outcome)?;
        emit(&format!("wrote {}\n", dir.display()));
    }
    print_json(&outcome.report)?;
    Ok(if outcome.report.all_completed { EXIT_OK } else { EXIT_ABORT })
}

#[derive(Debug, Serialize)]
struct IdentityRow {
    kind: IdentityKind,
    max_residual: f64,
    passed: bool,
}

fn default_params() -> RegularizationParams {
    RegularizationParams {
        epsilon: 1e-3,
        mu: 1e-3,
        eta: 1e-4,
        delta: 1e-4,
        r0: 1e-3,
        r1: 0.1,
        lambda_sign: 1,
        g: 1.0,
    }
}

fn check_identities(
    config: Option<&Path>,
    density: Option<PathBuf>,
    velocity: Vec<PathBuf>,
    dim: usize,
    points: usize,
    count: u64,
    seed: u64,
) -> Result<i32> {
    let (params, law) = match config {
        Some(p) => {
            let c: RunConfig = input(p, read_json(p))?;
            (c.params, c.pressure)
        }
        None => (default_params(), PressureLaw::pure_power(5.0 / 3.0, 1.0)?),
    };
    let fields = match density {
        Some(d) => {
            let rho = input(&d, snapshot::read(&d))?;
            let comps = velocity.iter().map(|p| input(p, snapshot::read(p))).collect::<Result<Vec<_>>>()?;
            vec![(rho, VectorField::new(comps)?)]
        }
        None => {
            let grid = TorusGrid::cubic(dim, points)?;
            (seed..seed + count).map(|s| random_smooth_pair(&grid, s)).collect()
        }
    };
    let mut rows = Vec::new();
    for kind in IdentityKind::ALL {
        let mut worst = 0.0f64;
        for (rho, u) in &fields {
            worst = worst.max(check_identity(kind, rho, u, &params, &law)?);
        }
        rows.push(IdentityRow { kind, max_residual: worst, passed: worst < IDENTITY_TOL });
    }
    let all = rows.iter().all(|r| r.passed);
    emit(&format!("verdict: {}\n", if all { "PASS" } else { "FAIL" }));
    print_json(&rows)?;
    Ok(EXIT_OK)
}
