//! Run configuration and construction of smooth, strictly positive initial data.

use std::f64::consts::PI;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::continuity::stability_bound;
use crate::error::{Error, Result};
use crate::galerkin::{GalerkinState, RegularizationParams, XnSpace};
use crate::pressure::PressureLaw;
use crate::torus::{snapshot, SpectralField, TorusGrid, VectorField, Wavevector};

fn two_pi() -> f64 {
    2.0 * PI
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub points_per_axis: usize,
    #[serde(default = "two_pi")]
    pub period: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<TorusGrid> {
        TorusGrid::new(vec![self.points_per_axis; self.dim], vec![self.period; self.dim])
    }
}

/// Profile of a single Fourier mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeShape {
    #[default]
    Cos,
    Sin,
}

/// `amplitude * cos(k . x)` or `amplitude * sin(k . x)`, with `k` in units of
/// the fundamental wavenumber of each axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub wavevector: Vec<i64>,
    pub amplitude: f64,
    #[serde(default)]
    pub shape: ModeShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityModeSpec {
    pub component: usize,
    pub wavevector: Vec<i64>,
    pub amplitude: f64,
    #[serde(default)]
    pub shape: ModeShape,
}

/// Seeded random perturbations on all modes with `|k_i| <= max_wavenumber`.
/// The sup norm of each added field is at most its amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomModes {
    pub max_wavenumber: i64,
    pub density_amplitude: f64,
    pub velocity_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum InitialDataSpec {
    UniformPlusModes {
        base_density: f64,
        #[serde(default)]
        density_modes: Vec<ModeSpec>,
        #[serde(default)]
        velocity_modes: Vec<VelocityModeSpec>,
        #[serde(default)]
        random: Option<RandomModes>,
        /// Pointwise lower bound required of the density; defaults to a tenth
        /// of the mean density.
        #[serde(default)]
        floor: Option<f64>,
    },
    FromSnapshot {
        density: PathBuf,
        velocity: Vec<PathBuf>,
        #[serde(default)]
        floor: Option<f64>,
    },
}

impl InitialDataSpec {
    /// Uniform density, no modes: a rest state.
    pub fn uniform(base_density: f64) -> Self {
        InitialDataSpec::UniformPlusModes {
            base_density,
            density_modes: Vec::new(),
            velocity_modes: Vec::new(),
            random: None,
            floor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub n_modes: usize,
    pub params: RegularizationParams,
    pub pressure: PressureLaw,
    pub initial: InitialDataSpec,
    pub dt: f64,
    pub t_end: f64,
    pub diagnostics_every: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Seeds randomized initial perturbations only.
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Checks everything that does not require building the initial state.
    pub fn validate(&self) -> Result<TorusGrid> {
        let grid = self.grid.build()?;
        self.params.validated()?;
        self.pressure.clone().validated()?;
        XnSpace::new(&grid, self.n_modes)?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParams(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParams(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.diagnostics_every == 0 {
            return Err(Error::InvalidParams("diagnostics_every must be at least 1".into()));
        }
        Ok(grid)
    }

    /// Validates, builds the initial state and checks the stability rule at t = 0.
    pub fn prepare(&self) -> Result<(GalerkinState, InitialNorms)> {
        let grid = self.validate()?;
        let (state, norms) = build_initial_state(&self.initial, &grid, self.n_modes, &self.params, &self.pressure, self.seed)?;
        let bound = stability_bound(&grid, state.u.max_magnitude());
        if self.dt > bound {
            return Err(Error::StabilityViolation { dt: self.dt, bound });
        }
        Ok((state, norms))
    }
}

/// Integrability of the initial datum, stored in the run header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialNorms {
    pub floor: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    pub mass: f64,
    pub rho_lgamma: f64,
    /// `int |m0|^2 / rho0 = int rho0 |u0|^2`
    pub momentum_energy: f64,
    pub grad_sqrt_rho_l2: f64,
    /// `int rho0^-6`
    pub cold_integral: f64,
    /// `int |log rho0|`
    pub log_rho_l1: f64,
}

fn wavevector(raw: &[i64], grid: &TorusGrid) -> Result<Wavevector> {
    if raw.is_empty() || raw.len() > grid.dim() {
        return Err(Error::InvalidParams(format!(
            "wavevector {raw:?} must have 1..={} entries",
            grid.dim()
        )));
    }
    let mut k = [0i64; 3];
    for (a, &c) in raw.iter().enumerate() {
        if 2 * c.unsigned_abs() as usize >= grid.points()[a] {
            return Err(Error::InvalidParams(format!("wavevector {raw:?} is not resolved by the grid")));
        }
        k[a] = c;
    }
    if k == [0; 3] {
        return Err(Error::InvalidParams("mode wavevector must be nonzero".into()));
    }
    Ok(k)
}

fn add_mode(f: &mut SpectralField, k: &Wavevector, amplitude: f64, shape: ModeShape) {
    // cos = (e^{ikx} + e^{-ikx}) / 2, sin = (e^{ikx} - e^{-ikx}) / 2i
    let c = match shape {
        ModeShape::Cos => Complex64::new(0.5 * amplitude, 0.0),
        ModeShape::Sin => Complex64::new(0.0, -0.5 * amplitude),
    };
    let neg = [-k[0], -k[1], -k[2]];
    let ck = f.coeff(k) + c;
    let cn = f.coeff(&neg) + c.conj();
    f.set_mode(k, ck);
    f.set_mode(&neg, cn);
}

fn random_modes(grid: &TorusGrid, max: i64, amplitude: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    let dim = grid.dim();
    let r = |a: usize| if a < dim { max } else { 0 };
    let mut modes = Vec::new();
    for k0 in -r(0)..=r(0) {
        for k1 in -r(1)..=r(1) {
            for k2 in -r(2)..=r(2) {
                let k = [k0, k1, k2];
                if k.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
                    modes.push(k);
                }
            }
        }
    }
    let raw: Vec<(f64, f64)> = modes.iter().map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let total: f64 = raw.iter().map(|(a, b)| a.abs() + b.abs()).sum();
    let mut f = SpectralField::zeros(grid);
    if total == 0.0 {
        return f;
    }
    let scale = amplitude / total;
    for (k, (a, b)) in modes.iter().zip(raw) {
        add_mode(&mut f, k, a * scale, ModeShape::Cos);
        add_mode(&mut f, k, b * scale, ModeShape::Sin);
    }
    f
}

/// Assembles `(rho0, u0)`, verifies `rho0 >= floor` on every grid point,
/// truncates `u0` to X_n and solves the potential.
pub fn build_initial_state(
    spec: &InitialDataSpec,
    grid: &TorusGrid,
    n_modes: usize,
    params: &RegularizationParams,
    law: &PressureLaw,
    seed: u64,
) -> Result<(GalerkinState, InitialNorms)> {
    let (rho, u, floor) = match spec {
        InitialDataSpec::UniformPlusModes {
            base_density,
            density_modes,
            velocity_modes,
            random,
            floor,
        } => {
            if !(base_density.is_finite() && *base_density > 0.0) {
                return Err(Error::InvalidParams(format!("base_density must be positive, got {base_density}")));
            }
            let mut rho = SpectralField::constant(grid, *base_density);
            for m in density_modes {
                let k = wavevector(&m.wavevector, grid)?;
                if (0..grid.dim()).any(|a| k[a].abs() > grid.dealias_cutoff(a)) {
                    return Err(Error::InvalidParams(format!(
                        "density mode {:?} lies outside the dealiased band",
                        m.wavevector
                    )));
                }
                add_mode(&mut rho, &k, m.amplitude, m.shape);
            }
            let mut comps = vec![SpectralField::zeros(grid); grid.dim()];
            for m in velocity_modes {
                if m.component >= grid.dim() {
                    return Err(Error::AxisOutOfRange { axis: m.component, dim: grid.dim() });
                }
                let k = wavevector(&m.wavevector, grid)?;
                add_mode(&mut comps[m.component], &k, m.amplitude, m.shape);
            }
            if let Some(r) = random {
                if r.max_wavenumber < 1 || 2 * r.max_wavenumber as usize >= grid.points().iter().copied().min().unwrap_or(0) {
                    return Err(Error::InvalidParams(format!("random max_wavenumber {} out of range", r.max_wavenumber)));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let band = (0..grid.dim()).map(|a| grid.dealias_cutoff(a)).min().unwrap_or(0);
                rho = &rho + &random_modes(grid, r.max_wavenumber.min(band), r.density_amplitude, &mut rng);
                for c in comps.iter_mut() {
                    *c = &*c + &random_modes(grid, r.max_wavenumber, r.velocity_amplitude, &mut rng);
                }
            }
            (rho, VectorField::new(comps)?, floor.unwrap_or(0.1 * base_density))
        }
        InitialDataSpec::FromSnapshot { density, velocity, floor } => {
            let rho = snapshot::read(density)?;
            if rho.grid() != grid {
                return Err(Error::GridMismatch);
            }
            if velocity.len() != grid.dim() {
                return Err(Error::InvalidParams(format!(
                    "expected {} velocity snapshots, got {}",
                    grid.dim(),
                    velocity.len()
                )));
            }
            let comps = velocity.iter().map(|p| snapshot::read(p)).collect::<Result<Vec<_>>>()?;
            let mean = rho.mean();
            (rho, VectorField::new(comps)?, floor.unwrap_or(0.1 * mean))
        }
    };
    if !(floor.is_finite() && floor > 0.0) {
        return Err(Error::InvalidParams(format!("density floor must be positive, got {floor}")));
    }
    let (min_rho, at) = rho.min_physical();
    if !(min_rho >= floor) {
        return Err(Error::InitialFloorViolation {
            point: grid.point(at),
            value: min_rho,
            floor,
        });
    }
    let state = GalerkinState::new(rho, &u, n_modes, &params.poisson(), 0.0)?;
    let norms = initial_norms(&state, law, floor);
    Ok((state, norms))
}

fn initial_norms(state: &GalerkinState, law: &PressureLaw, floor: f64) -> InitialNorms {
    let rho = state.rho.to_physical();
    let u: Vec<Vec<f64>> = state.u.to_physical();
    let grad_rho = state.rho.gradient().to_physical();
    let w = state.rho.grid().cell_volume();
    let mut n = InitialNorms {
        floor,
        min_rho: f64::INFINITY,
        max_rho: f64::NEG_INFINITY,
        mass: 0.0,
        rho_lgamma: 0.0,
        momentum_energy: 0.0,
        grad_sqrt_rho_l2: 0.0,
        cold_integral: 0.0,
        log_rho_l1: 0.0,
    };
    for (i, &z) in rho.iter().enumerate() {
        n.min_rho = n.min_rho.min(z);
        n.max_rho = n.max_rho.max(z);
        n.mass += w * z;
        n.rho_lgamma += w * z.powf(law.gamma);
        n.momentum_energy += w * z * u.iter().map(|c| c[i] * c[i]).sum::<f64>();
        // |grad sqrt(rho)|^2 = |grad rho|^2 / (4 rho)
        n.grad_sqrt_rho_l2 += w * grad_rho.iter().map(|c| c[i] * c[i]).sum::<f64>() / (4.0 * z);
        n.cold_integral += w * z.powi(-6);
        n.log_rho_l1 += w * z.ln().abs();
    }
    n.rho_lgamma = n.rho_lgamma.powf(1.0 / law.gamma);
    n.grad_sqrt_rho_l2 = n.grad_sqrt_rho_l2.sqrt();
    n
}
