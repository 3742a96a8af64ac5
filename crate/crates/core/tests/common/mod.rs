#![allow(dead_code)]

use std::f64::consts::PI;

use nsp_core::config::{GridSpec, InitialDataSpec, ModeShape, ModeSpec, RandomModes, RunConfig, VelocityModeSpec};
use nsp_core::continuity::stability_bound;
use nsp_core::galerkin::RegularizationParams;
use nsp_core::pressure::PressureLaw;

pub fn standard_params() -> RegularizationParams {
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

/// Nonzero, distinct coefficients so every term of an identity is exercised.
pub fn rich_params() -> RegularizationParams {
    RegularizationParams {
        epsilon: 0.3,
        mu: 0.1,
        eta: 0.2,
        delta: 0.05,
        r0: 0.1,
        r1: 0.5,
        lambda_sign: -1,
        g: 0.8,
    }
}

pub fn standard_law() -> PressureLaw {
    PressureLaw::pure_power(5.0 / 3.0, 1.0).unwrap()
}

pub fn perturbed_law() -> PressureLaw {
    PressureLaw::perturbed(1.4, 1.0, 0.3, 0.3, 2.0).unwrap()
}

/// `rho0 = 1 + 0.1 cos x`, `u0 = 0.1 sin x e_1`, on a `dim`-torus with `points` per axis.
pub fn standard_initial() -> InitialDataSpec {
    InitialDataSpec::UniformPlusModes {
        base_density: 1.0,
        density_modes: vec![ModeSpec { wavevector: vec![1], amplitude: 0.1, shape: ModeShape::Cos }],
        velocity_modes: vec![VelocityModeSpec {
            component: 0,
            wavevector: vec![1],
            amplitude: 0.1,
            shape: ModeShape::Sin,
        }],
        random: None,
        floor: None,
    }
}

/// Largest `t_end / k` within the stability bound of `config`'s initial state.
pub fn stable_dt(config: &RunConfig) -> f64 {
    let grid = config.grid.build().unwrap();
    let mut probe = config.clone();
    probe.dt = f64::MIN_POSITIVE;
    let (state, _) = probe.prepare().unwrap();
    let bound = stability_bound(&grid, state.u.max_magnitude());
    config.t_end / (config.t_end / bound).ceil()
}

pub fn config_with(dim: usize, points: usize, n_modes: usize, initial: InitialDataSpec, t_end: f64) -> RunConfig {
    let mut c = RunConfig {
        grid: GridSpec { dim, points_per_axis: points, period: 2.0 * PI },
        n_modes,
        params: standard_params(),
        pressure: standard_law(),
        initial,
        dt: 1.0,
        t_end,
        diagnostics_every: 1,
        output_dir: None,
        seed: 0,
    };
    c.dt = stable_dt(&c);
    c
}

/// The standard smooth run: 16^3, 33 modes, t_end = 1, dt from the stability rule.
pub fn standard_config() -> RunConfig {
    config_with(3, 16, 33, standard_initial(), 1.0)
}

pub fn seeded_config(dim: usize, points: usize, n_modes: usize, seed: u64, t_end: f64) -> RunConfig {
    let initial = InitialDataSpec::UniformPlusModes {
        base_density: 1.0,
        density_modes: vec![],
        velocity_modes: vec![],
        random: Some(RandomModes { max_wavenumber: 1, density_amplitude: 0.3, velocity_amplitude: 0.2 }),
        floor: Some(0.5),
    };
    let mut c = config_with(dim, points, n_modes, initial, t_end);
    c.seed = seed;
    c.dt = stable_dt(&c);
    c
}

/// Fourth-order centered first derivative on a uniform periodic sample.
pub fn fd1(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let at = |o: isize| v[((i as isize + o).rem_euclid(n as isize)) as usize];
            (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h)
        })
        .collect()
}

/// Fourth-order centered second derivative on a uniform periodic sample.
pub fn fd2(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let at = |o: isize| v[((i as isize + o).rem_euclid(n as isize)) as usize];
            (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / (12.0 * h * h)
        })
        .collect()
}

/// `max |a - b| / max |b|`.
pub fn rel_max_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    diff / scale
}

/// Adaptive Simpson quadrature, independent of the library's Gauss-Kronrod rule.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}
