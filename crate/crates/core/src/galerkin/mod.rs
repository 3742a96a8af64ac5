//! Faedo-Galerkin approximation: the finite space X_n, the density-weighted
//! mass operator, the momentum right-hand side, and the per-step fixed point.

mod mass;
mod momentum;
mod run;
mod space;
mod step;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poisson::{solve_poisson, PoissonConfig};
use crate::torus::{truncate_to_xn, SpectralField, VectorField};

pub use mass::{build_mass_operator, mass_solve, MassOperator};
pub use momentum::{momentum_rhs, momentum_term, momentum_terms, MomentumTerm, TERM_NAMES};
pub use run::{run_simulation, Snapshot, Trajectory, TrajectoryMeta};
pub use space::XnSpace;
pub use step::{picard_step, PicardOutcome, PICARD_MAX_ITER, PICARD_TOL};

/// Every regularization knob of the approximate system plus the Poisson coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizationParams {
    pub epsilon: f64,
    pub mu: f64,
    pub eta: f64,
    pub delta: f64,
    pub r0: f64,
    pub r1: f64,
    pub lambda_sign: i8,
    #[serde(rename = "G")]
    pub g: f64,
}

impl RegularizationParams {
    pub fn validated(self) -> Result<Self> {
        let named = [
            ("epsilon", self.epsilon),
            ("mu", self.mu),
            ("eta", self.eta),
            ("delta", self.delta),
            ("r0", self.r0),
            ("r1", self.r1),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be nonnegative, got {v}")));
            }
        }
        PoissonConfig::new(self.lambda_sign, self.g)?;
        Ok(self)
    }

    pub fn poisson(&self) -> PoissonConfig {
        PoissonConfig { lambda_sign: self.lambda_sign, g: self.g }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda_sign as f64
    }
}

/// One time level of the approximate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinState {
    pub rho: SpectralField,
    /// Velocity, supported in X_n.
    pub u: VectorField,
    /// Potential re-solved from `rho` after every density update.
    pub phi: SpectralField,
    pub time: f64,
    pub n_modes: usize,
}

impl GalerkinState {
    /// Projects `u` onto X_n and solves for the potential.
    pub fn new(rho: SpectralField, u: &VectorField, n_modes: usize, poisson: &PoissonConfig, time: f64) -> Result<Self> {
        if rho.grid() != u.grid() {
            return Err(Error::GridMismatch);
        }
        XnSpace::new(rho.grid(), n_modes)?;
        let projected = u
            .components()
            .iter()
            .map(|c| truncate_to_xn(c, n_modes))
            .collect::<Result<Vec<_>>>()?;
        let phi = solve_poisson(&rho, poisson);
        Ok(Self {
            rho,
            u: VectorField::new(projected)?,
            phi,
            time,
            n_modes,
        })
    }

    /// Real X_n coefficients of each velocity component.
    pub fn u_coeffs(&self) -> Vec<Vec<f64>> {
        let space = XnSpace::new(self.rho.grid(), self.n_modes).expect("validated at construction");
        self.u.components().iter().map(|c| space.coeffs_of(c)).collect()
    }
}
