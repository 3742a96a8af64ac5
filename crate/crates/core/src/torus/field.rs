use std::ops::{Add, Mul, Neg, Sub};

use rustfft::num_complex::Complex64;

use super::{fft, TorusGrid, Wavevector};
use crate::error::{Error, Result};

/// A real scalar field on the torus, `f(x) = sum_k c_k exp(i 2pi k.x / L)`.
///
/// Coefficients are stored in FFT order on the full grid. Hermitian symmetry
/// `c_{-k} = conj(c_k)` holds for every field built through this API.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &TorusGrid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.total_points()],
        }
    }

    pub fn constant(grid: &TorusGrid, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    pub fn from_coeffs(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.total_points() {
            return Err(Error::InvalidGrid(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.total_points()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite {
                point: grid.mode_at(i)[..grid.dim()].iter().map(|&k| k as f64).collect(),
                value: f64::NAN,
            });
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    pub fn from_physical(grid: &TorusGrid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.total_points() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.total_points()
            )));
        }
        check_finite(grid, values)?;
        Ok(Self {
            grid: grid.clone(),
            coeffs: fft::forward(values, grid.points()),
        })
    }

    /// Samples `f` on the grid and transforms.
    pub fn from_fn(grid: &TorusGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.total_points()).map(|i| f(&grid.point(i))).collect();
        Self {
            grid: grid.clone(),
            coeffs: fft::forward(&values, grid.points()),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of wavevector `k`; zero when `k` is not representable.
    pub fn coeff(&self, k: &Wavevector) -> Complex64 {
        self.grid
            .flat_index(k)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    /// Sets `c_k = c` and `c_{-k} = conj(c)`.
    pub fn set_mode(&mut self, k: &Wavevector, c: Complex64) {
        let neg = [-k[0], -k[1], -k[2]];
        if let (Some(i), Some(j)) = (self.grid.flat_index(k), self.grid.flat_index(&neg)) {
            if i == j {
                self.coeffs[i] = Complex64::new(c.re, 0.0);
            } else {
                self.coeffs[i] = c;
                self.coeffs[j] = c.conj();
            }
        }
    }

    pub fn to_physical(&self) -> Vec<f64> {
        fft::inverse(&self.coeffs, self.grid.points())
    }

    /// Applies `f(k, c_k)` to every coefficient.
    pub fn map_modes(&self, f: impl Fn(&Wavevector, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(&self.grid.mode_at(i), c))
            .collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// `d^order f / dx_axis^order`, computed exactly in Fourier space.
    pub fn derivative(&self, axis: usize, order: u32) -> Result<Self> {
        let dim = self.grid.dim();
        if axis >= dim {
            return Err(Error::AxisOutOfRange { axis, dim });
        }
        let scale = self.grid.wave_scale(axis);
        let grid = &self.grid;
        Ok(self.map_modes(|k, c| {
            // odd derivatives of the Nyquist mode are not real; drop them
            if order % 2 == 1 && grid.is_nyquist(axis, k[axis]) {
                return Complex64::default();
            }
            c * Complex64::new(0.0, k[axis] as f64 * scale).powu(order)
        }))
    }

    pub fn gradient(&self) -> VectorField {
        let components = (0..self.grid.dim())
            .map(|a| self.derivative(a, 1).expect("axis in range"))
            .collect();
        VectorField { components }
    }

    /// `Delta^p f` for p in {1, 2, 3}.
    pub fn laplacian_power(&self, p: u32) -> Result<Self> {
        if !(1..=3).contains(&p) {
            return Err(Error::InvalidLaplacianPower(p));
        }
        Ok(self.laplacian_pow_unchecked(p))
    }

    pub fn laplacian(&self) -> Self {
        self.laplacian_pow_unchecked(1)
    }

    pub(crate) fn laplacian_pow_unchecked(&self, p: u32) -> Self {
        let grid = &self.grid;
        self.map_modes(|k, c| c * (-grid.wavenumber_sq(k)).powi(p as i32))
    }

    /// Exact torus integral of the represented trigonometric polynomial.
    pub fn integrate(&self) -> f64 {
        self.grid.volume() * self.coeffs[0].re
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `int f g dx` by Parseval.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "inner product across grids");
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        self.grid.volume() * s
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// `(||f||^2 + ||grad f||^2)^(1/2)`.
    pub fn h1_norm(&self) -> f64 {
        let grid = &self.grid;
        let s: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.norm_sqr() * (1.0 + grid.wavenumber_sq(&grid.mode_at(i))))
            .sum();
        (grid.volume() * s).sqrt()
    }

    /// Zeroes every mode outside the 2/3-rule band.
    pub fn dealias(&self) -> Self {
        let grid = &self.grid;
        self.map_modes(|k, c| if grid.in_dealias_band(k) { c } else { Complex64::default() })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Largest `|c_{-k} - conj(c_k)|` over the grid.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.grid.mode_at(i);
            let neg = [-k[0], -k[1], -k[2]];
            if let Some(j) = self.grid.flat_index(&neg) {
                worst = worst.max((self.coeffs[j] - c.conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_coeff_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Minimum physical value and its grid index.
    pub fn min_physical(&self) -> (f64, usize) {
        extreme(&self.to_physical(), |a, b| a < b)
    }

    pub fn max_physical(&self) -> (f64, usize) {
        extreme(&self.to_physical(), |a, b| a > b)
    }
}

fn extreme(values: &[f64], better: impl Fn(f64, f64) -> bool) -> (f64, usize) {
    let mut best = (values[0], 0);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if better(v, best.0) {
            best = (v, i);
        }
    }
    best
}

fn check_finite(grid: &TorusGrid, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite { point: grid.point(i), value: values[i] }),
        None => Ok(()),
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: Self) -> SpectralField {
        assert_eq!(self.grid, rhs.grid, "adding fields across grids");
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: Self) -> SpectralField {
        assert_eq!(self.grid, rhs.grid, "subtracting fields across grids");
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

/// Evaluates `f` pointwise on the physical grid and returns the 2/3-dealiased result.
///
/// A non-finite output is reported with the offending grid point, which is
/// how vacuum or negative density surfaces in nonlinear terms.
pub fn pointwise_apply(
    fields: &[&SpectralField],
    f: impl Fn(&[f64]) -> f64,
) -> Result<SpectralField> {
    let grid = fields.first().map(|f| f.grid.clone()).ok_or(Error::GridMismatch)?;
    if fields.iter().any(|g| g.grid != grid) {
        return Err(Error::GridMismatch);
    }
    let physical: Vec<Vec<f64>> = fields.iter().map(|g| g.to_physical()).collect();
    let mut args = vec![0.0; fields.len()];
    let mut out = Vec::with_capacity(grid.total_points());
    for i in 0..grid.total_points() {
        for (slot, values) in args.iter_mut().zip(&physical) {
            *slot = values[i];
        }
        let y = f(&args);
        if !y.is_finite() {
            return Err(Error::NonFinite { point: grid.point(i), value: y });
        }
        out.push(y);
    }
    Ok(SpectralField {
        coeffs: fft::forward(&out, grid.points()),
        grid,
    }
    .dealias())
}

/// Dealiased product of two fields.
pub fn product(a: &SpectralField, b: &SpectralField) -> SpectralField {
    assert_eq!(a.grid, b.grid, "product across grids");
    let pa = a.to_physical();
    let pb = b.to_physical();
    let values: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    SpectralField {
        coeffs: fft::forward(&values, a.grid.points()),
        grid: a.grid.clone(),
    }
    .dealias()
}

/// A vector field with one scalar component per torus axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<SpectralField>,
}

impl VectorField {
    pub fn new(components: Vec<SpectralField>) -> Result<Self> {
        let first = components.first().ok_or(Error::GridMismatch)?;
        if components.iter().any(|c| c.grid != first.grid) {
            return Err(Error::GridMismatch);
        }
        if components.len() != first.grid.dim() {
            return Err(Error::InvalidGrid(format!(
                "{} components on a {}-dimensional grid",
                components.len(),
                first.grid.dim()
            )));
        }
        Ok(Self { components })
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        Self {
            components: (0..grid.dim()).map(|_| SpectralField::zeros(grid)).collect(),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SpectralField] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &SpectralField {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<SpectralField> {
        self.components
    }

    pub fn divergence(&self) -> SpectralField {
        let mut div = SpectralField::zeros(self.grid());
        for (axis, c) in self.components.iter().enumerate() {
            div = &div + &c.derivative(axis, 1).expect("axis in range");
        }
        div
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.components.iter().zip(&other.components).map(|(a, b)| a.inner(b)).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { components: self.components.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn map(&self, f: impl Fn(&SpectralField) -> SpectralField) -> Self {
        Self { components: self.components.iter().map(f).collect() }
    }

    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        self.components.iter().map(|c| c.to_physical()).collect()
    }

    /// Largest physical `|u|` over the grid.
    pub fn max_magnitude(&self) -> f64 {
        let phys = self.to_physical();
        (0..self.grid().total_points())
            .map(|i| phys.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: Self) -> VectorField {
        VectorField {
            components: self.components.iter().zip(&rhs.components).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: Self) -> VectorField {
        VectorField {
            components: self.components.iter().zip(&rhs.components).map(|(a, b)| a - b).collect(),
        }
    }
}
