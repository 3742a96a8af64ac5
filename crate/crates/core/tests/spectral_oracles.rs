mod common;

use std::f64::consts::PI;

use nsp_core::torus::{pointwise_apply, product, truncate_to_xn, FourierBasis, SpectralField, TorusGrid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::simpson;

/// A random real trigonometric polynomial in two variables with `|k_i| <= kmax`.
struct Trig {
    terms: Vec<([f64; 2], f64, f64)>,
}

impl Trig {
    fn random(seed: u64, kmax: i64, count: usize, amp: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..count)
            .map(|_| {
                let k = [rng.gen_range(-kmax..=kmax) as f64, rng.gen_range(0..=kmax) as f64];
                (k, amp * rng.gen_range(-1.0..1.0), amp * rng.gen_range(-1.0..1.0))
            })
            .collect();
        Self { terms }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, a, b)| {
                let p = k[0] * x + k[1] * y;
                a * p.cos() + b * p.sin()
            })
            .sum()
    }

    fn field(&self, grid: &TorusGrid) -> SpectralField {
        SpectralField::from_fn(grid, |x| self.eval(x[0], x[1]))
    }
}

#[test]
fn spectral_derivative_matches_refined_finite_differences() {
    let grid = TorusGrid::cubic(2, 16).unwrap();
    for seed in 0..5 {
        let f = Trig::random(seed, 4, 8, 1.0);
        let field = f.field(&grid);
        for axis in 0..2 {
            let d = field.derivative(axis, 1).unwrap().to_physical();
            // fourth-order stencil at spacing 1e-3 on the closed form
            let h = 1e-3;
            let shift = |x: f64, y: f64, o: f64| if axis == 0 { f.eval(x + o * h, y) } else { f.eval(x, y + o * h) };
            let oracle: Vec<f64> = (0..grid.total_points())
                .map(|i| {
                    let p = grid.point(i);
                    let (x, y) = (p[0], p[1]);
                    (-shift(x, y, 2.0) + 8.0 * shift(x, y, 1.0) - 8.0 * shift(x, y, -1.0) + shift(x, y, -2.0)) / (12.0 * h)
                })
                .collect();
            let err = common::rel_max_diff(&d, &oracle);
            assert!(err < 1e-6, "seed {seed} axis {axis}: {err:e}");
        }
    }
}

#[test]
fn bilaplacian_equals_fourfold_derivative_composition() {
    let grid = TorusGrid::cubic(2, 16).unwrap();
    let field = Trig::random(7, 2, 10, 0.5).field(&grid);
    let d = |f: &SpectralField, a: usize| f.derivative(a, 1).unwrap();
    let xxxx = d(&d(&d(&d(&field, 0), 0), 0), 0);
    let xxyy = d(&d(&d(&d(&field, 0), 0), 1), 1);
    let yyyy = d(&d(&d(&d(&field, 1), 1), 1), 1);
    let composed = &(&xxxx + &xxyy.scale(2.0)) + &yyyy;
    let direct = field.laplacian_power(2).unwrap();
    assert!(direct.max_abs_coeff_diff(&composed) < 1e-12);
}

#[test]
fn product_integral_matches_fine_grid_quadrature() {
    let grid = TorusGrid::cubic(2, 16).unwrap();
    let (f, g) = (Trig::random(11, 2, 6, 1.0), Trig::random(12, 2, 6, 1.0));
    let got = product(&f.field(&grid), &g.field(&grid)).integrate();
    let inner = f.field(&grid).inner(&g.field(&grid));
    // the periodic trapezoidal rule on a 64^2 grid is exact for this bandwidth
    let m = 64;
    let h = 2.0 * PI / m as f64;
    let mut oracle = 0.0;
    for i in 0..m {
        for j in 0..m {
            let (x, y) = (i as f64 * h, j as f64 * h);
            oracle += f.eval(x, y) * g.eval(x, y);
        }
    }
    oracle *= h * h;
    assert!((got - oracle).abs() < 1e-10 * oracle.abs().max(1.0), "{got} vs {oracle}");
    assert!((inner - oracle).abs() < 1e-10 * oracle.abs().max(1.0));
}

#[test]
fn inverse_sixth_power_integral_matches_adaptive_quadrature() {
    let grid = TorusGrid::cubic(1, 64).unwrap();
    let rho = SpectralField::from_fn(&grid, |x| 2.0 + x[0].cos());
    let got = pointwise_apply(&[&rho], |v| v[0].powi(-6)).unwrap().integrate();
    let oracle = simpson(&|x| (2.0 + x.cos()).powi(-6), 0.0, 2.0 * PI, 1e-14);
    assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
}

fn random_field(grid: &TorusGrid, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..grid.total_points()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SpectralField::from_physical(grid, &values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn truncation_norms_are_monotone_in_n(seed in any::<u64>()) {
        let grid = TorusGrid::cubic(2, 12).unwrap();
        let f = random_field(&grid, seed);
        let cap = FourierBasis::new(&grid).galerkin_capacity();
        let mut prev_kept = 0.0;
        let mut prev_err = f64::INFINITY;
        for n in (1..=cap).step_by(2) {
            let t = truncate_to_xn(&f, n).unwrap();
            let kept = t.l2_norm();
            let err = (&f - &t).l2_norm();
            prop_assert!(kept >= prev_kept - 1e-13);
            prop_assert!(err <= prev_err + 1e-13);
            prop_assert!(kept <= f.l2_norm() + 1e-13);
            prev_kept = kept;
            prev_err = err;
        }
    }
}
