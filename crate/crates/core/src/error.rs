use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("axis {axis} out of range for a {dim}-dimensional torus")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("laplacian power must be 1, 2 or 3, got {0}")]
    InvalidLaplacianPower(u32),

    #[error("requested {requested} basis modes but only {available} are available")]
    ModeCountExceeded { requested: usize, available: usize },

    #[error("mode count {0} splits a conjugate pair; X_n sizes are 0 or odd")]
    SplitConjugatePair(usize),

    #[error("non-finite value {value} at grid point {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },

    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),

    #[error("argument must be strictly positive, got {0}")]
    NonPositiveArgument(f64),

    #[error("density lost positivity: value {value} at grid point {point:?}")]
    PositivityLoss { point: Vec<f64>, value: f64 },

    #[error("mass operator is not positive definite (min density {min_rho})")]
    NonPositiveDensity { min_rho: f64 },

    #[error("Picard iteration did not contract after {iterations} iterations (last residual {residual:e})")]
    NoContraction { iterations: usize, residual: f64 },

    #[error("momentum term `{term}` produced a non-finite value")]
    NonFiniteTerm { term: &'static str },

    #[error("velocities are identical; contraction ratio undefined")]
    IdenticalVelocities,

    #[error("time step {dt} violates the stability bound {bound}")]
    StabilityViolation { dt: f64, bound: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("initial density {value} at {point:?} is below the floor {floor}")]
    InitialFloorViolation { point: Vec<f64>, value: f64, floor: f64 },

    #[error("incompatible trajectories: {0}")]
    IncompatibleTrajectories(String),

    #[error("invalid sweep plan: {0}")]
    InvalidPlan(String),

    #[error("wrong sweep stage: expected {expected}, got {got}")]
    WrongStage { expected: String, got: String },

    #[error("snapshot {path:?}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error("run aborted at t = {time}: {source}")]
    Aborted {
        time: f64,
        #[source]
        source: Box<Error>,
        partial: Box<crate::galerkin::Trajectory>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Validation errors are reported before any stepping happens.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::InvalidParams(_)
                | Error::InvalidPlan(_)
                | Error::StabilityViolation { .. }
                | Error::InitialFloorViolation { .. }
                | Error::ModeCountExceeded { .. }
                | Error::SplitConjugatePair(_)
                | Error::Snapshot { .. }
                | Error::Json(_)
        )
    }
}
