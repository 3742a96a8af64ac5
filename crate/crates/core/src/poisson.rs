//! Spectral solve of `lambda Delta Phi = 4 pi G (rho - mean rho)` with zero-mean `Phi`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonConfig {
    /// `+1` repulsive (electrostatic), `-1` attractive (gravitational).
    pub lambda_sign: i8,
    #[serde(rename = "G")]
    pub g: f64,
}

impl PoissonConfig {
    pub fn new(lambda_sign: i8, g: f64) -> Result<Self> {
        if lambda_sign != 1 && lambda_sign != -1 {
            return Err(Error::InvalidParams(format!("lambda_sign must be +1 or -1, got {lambda_sign}")));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidParams(format!("G must be positive, got {g}")));
        }
        Ok(Self { lambda_sign, g })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda_sign as f64
    }

    /// `4 pi G / lambda`.
    pub fn coupling(&self) -> f64 {
        4.0 * PI * self.g / self.lambda()
    }
}

/// `Phi_hat(k) = -4 pi G rho_hat(k) / (lambda |2 pi k / L|^2)`, `Phi_hat(0) = 0`.
pub fn solve_poisson(rho: &SpectralField, cfg: &PoissonConfig) -> SpectralField {
    let grid = rho.grid();
    let c = cfg.coupling();
    rho.map_modes(|k, r| {
        let k2 = grid.wavenumber_sq(k);
        if k2 == 0.0 {
            Complex64::default()
        } else {
            -r * (c / k2)
        }
    })
}
