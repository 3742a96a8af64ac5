//! Barotropic pressure laws, their derivatives, and the internal-energy potential.
//!
//! Every admissible law satisfies `P(0) = 0` and the envelope
//! `z^(gamma-1)/a - b <= P'(z) <= a z^(gamma-1) + b` for `z >= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Absolute tolerance for the potential's quadrature.
pub const PI_QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PressureKind {
    /// `P(z) = z^gamma / (a gamma)`.
    PurePower,
    /// `P'(z) = z^(gamma-1)/a + A sin(omega z)`, integrated from `P(0) = 0`.
    PerturbedNonMonotone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureLaw {
    pub kind: PressureKind,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub perturbation_amplitude: f64,
    #[serde(default = "default_frequency")]
    pub perturbation_frequency: f64,
}

fn default_frequency() -> f64 {
    1.0
}

/// Which of the two gamma thresholds the law clears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaFlags {
    /// `gamma > 4/3`, the threshold for the attractive (lambda = -1) case.
    pub above_four_thirds: bool,
    /// `gamma > 6/5`, needed to absorb the Poisson source in the entropy estimate.
    pub above_six_fifths: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub passed: bool,
    /// `min_z min(P'(z) - lower(z), upper(z) - P'(z))`; negative means violation.
    pub worst_margin: f64,
    pub worst_z: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub samples: usize,
}

impl PressureLaw {
    pub fn pure_power(gamma: f64, a: f64) -> Result<Self> {
        Self {
            kind: PressureKind::PurePower,
            gamma,
            a,
            b: 0.0,
            perturbation_amplitude: 0.0,
            perturbation_frequency: 1.0,
        }
        .validated()
    }

    pub fn perturbed(gamma: f64, a: f64, b: f64, amplitude: f64, frequency: f64) -> Result<Self> {
        Self {
            kind: PressureKind::PerturbedNonMonotone,
            gamma,
            a,
            b,
            perturbation_amplitude: amplitude,
            perturbation_frequency: frequency,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return bad(format!("a must be positive, got {}", self.a));
        }
        if !(self.b.is_finite() && self.b >= 0.0) {
            return bad(format!("b must be nonnegative, got {}", self.b));
        }
        if !(self.perturbation_amplitude.is_finite() && self.perturbation_amplitude >= 0.0) {
            return bad(format!(
                "perturbation amplitude must be nonnegative, got {}",
                self.perturbation_amplitude
            ));
        }
        if !(self.perturbation_frequency.is_finite() && self.perturbation_frequency > 0.0) {
            return bad(format!(
                "perturbation frequency must be positive, got {}",
                self.perturbation_frequency
            ));
        }
        Ok(self)
    }

    pub fn gamma_flags(&self) -> GammaFlags {
        GammaFlags {
            above_four_thirds: self.gamma > 4.0 / 3.0,
            above_six_fifths: self.gamma > 6.0 / 5.0,
        }
    }

    fn amplitude(&self) -> f64 {
        match self.kind {
            PressureKind::PurePower => 0.0,
            PressureKind::PerturbedNonMonotone => self.perturbation_amplitude,
        }
    }

    /// `P(z)`; `z >= 0`.
    pub fn p(&self, z: f64) -> Result<f64> {
        if z < 0.0 {
            return Err(Error::NegativeArgument(z));
        }
        Ok(self.p_unchecked(z))
    }

    /// `P'(z)`; `z >= 0`.
    pub fn dp(&self, z: f64) -> Result<f64> {
        if z < 0.0 {
            return Err(Error::NegativeArgument(z));
        }
        Ok(self.dp_unchecked(z))
    }

    /// `Pi(z) = z int_1^z P(s)/s^2 ds`; `z > 0`.
    pub fn pi(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) {
            return Err(Error::NonPositiveArgument(z));
        }
        Ok(self.pi_unchecked(z))
    }

    /// `Pi'(z) = (Pi(z) + P(z)) / z`; `z > 0`.
    pub fn dpi(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) {
            return Err(Error::NonPositiveArgument(z));
        }
        Ok((self.pi_unchecked(z) + self.p_unchecked(z)) / z)
    }

    pub(crate) fn p_unchecked(&self, z: f64) -> f64 {
        let base = z.powf(self.gamma) / (self.a * self.gamma);
        let amp = self.amplitude();
        if amp == 0.0 {
            return base;
        }
        let w = self.perturbation_frequency;
        base + amp / w * (1.0 - (w * z).cos())
    }

    pub(crate) fn dp_unchecked(&self, z: f64) -> f64 {
        let base = z.powf(self.gamma - 1.0) / self.a;
        let amp = self.amplitude();
        if amp == 0.0 {
            return base;
        }
        base + amp * (self.perturbation_frequency * z).sin()
    }

    pub(crate) fn pi_unchecked(&self, z: f64) -> f64 {
        let g = self.gamma;
        let power = (z.powf(g) - z) / (self.a * g * (g - 1.0));
        let amp = self.amplitude();
        if amp == 0.0 {
            return power;
        }
        let w = self.perturbation_frequency;
        let integrand = |s: f64| {
            // (1 - cos ws)/s^2 written to stay accurate as s -> 0
            let h = (0.5 * w * s).sin();
            2.0 * h * h / (s * s)
        };
        let tail = quadrature::integrate(integrand, 1.0, z, PI_QUAD_TOL / z.max(1.0), 0.0);
        power + z * amp / w * tail
    }

    /// Lower and upper envelope of `P'` at `z`.
    pub fn envelope(&self, z: f64) -> (f64, f64) {
        let zg = z.powf(self.gamma - 1.0);
        (zg / self.a - self.b, self.a * zg + self.b)
    }

    /// Samples `P'` on a log-uniform grid over `[1e-6 z_max, z_max]`.
    pub fn certify_envelope(&self, z_max: f64, samples: usize) -> Result<EnvelopeReport> {
        if !(z_max > 0.0) {
            return Err(Error::NonPositiveArgument(z_max));
        }
        if samples < 2 {
            return Err(Error::InvalidParams(format!("need at least 2 samples, got {samples}")));
        }
        let z_min = z_max * 1e-6;
        let ratio = (z_max / z_min).ln();
        let mut worst = (f64::INFINITY, z_min);
        let mut passed = true;
        for i in 0..samples {
            let z = z_min * (ratio * i as f64 / (samples - 1) as f64).exp();
            let dp = self.dp_unchecked(z);
            let (lo, hi) = self.envelope(z);
            let margin = (dp - lo).min(hi - dp);
            if margin < -1e-12 * (1.0 + dp.abs()) {
                passed = false;
            }
            if margin < worst.0 {
                worst = (margin, z);
            }
        }
        Ok(EnvelopeReport {
            passed,
            worst_margin: worst.0,
            worst_z: worst.1,
            z_min,
            z_max,
            samples,
        })
    }
}
