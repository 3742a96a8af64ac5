//! Real fields on the periodic d-torus, stored as Fourier coefficients.

mod basis;
pub(crate) mod fft;
mod field;
pub mod snapshot;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use basis::{truncate_to_xn, FourierBasis};
pub use field::{pointwise_apply, product, SpectralField, VectorField};

/// Integer wavevector; unused trailing axes are zero.
pub type Wavevector = [i64; 3];

/// Uniform periodic grid on `[0, L_1) x ... x [0, L_d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    points: Vec<usize>,
    period: Vec<f64>,
}

impl TorusGrid {
    pub fn new(points: Vec<usize>, period: Vec<f64>) -> Result<Self> {
        let dim = points.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if period.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "{} periods given for a {dim}-dimensional grid",
                period.len()
            )));
        }
        for &n in &points {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "points per axis must be even and >= 4, got {n}"
                )));
            }
        }
        for &l in &period {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("period must be positive, got {l}")));
            }
        }
        Ok(Self { points, period })
    }

    /// `n` points per axis on `[0, 2pi)^dim`.
    pub fn cubic(dim: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; dim], vec![2.0 * PI; dim])
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn period(&self) -> &[f64] {
        &self.period
    }

    pub fn total_points(&self) -> usize {
        self.points.iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.period.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.total_points() as f64
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.period[axis] / self.points[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    /// True below three dimensions (desk-scale reduction of the 3-torus).
    pub fn is_reduced(&self) -> bool {
        self.dim() < 3
    }

    /// `2 pi / L` along `axis`.
    pub fn wave_scale(&self, axis: usize) -> f64 {
        2.0 * PI / self.period[axis]
    }

    /// Largest |k| kept by the 2/3 rule along `axis`.
    ///
    /// `3 K < N` so quadratic products of retained modes never alias back
    /// into the retained band, and triple products integrate exactly on the grid.
    pub fn dealias_cutoff(&self, axis: usize) -> i64 {
        (self.points[axis] as i64 - 1) / 3
    }

    pub(crate) fn signed_index(n: usize, i: usize) -> i64 {
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Wavevector stored at a flat (row-major) index.
    pub fn mode_at(&self, flat: usize) -> Wavevector {
        let mut k = [0i64; 3];
        let mut rem = flat;
        for axis in (0..self.dim()).rev() {
            let n = self.points[axis];
            k[axis] = Self::signed_index(n, rem % n);
            rem /= n;
        }
        k
    }

    /// Flat index of a wavevector, or `None` when it is not representable.
    pub fn flat_index(&self, k: &Wavevector) -> Option<usize> {
        let mut flat = 0usize;
        for axis in 0..self.dim() {
            let n = self.points[axis] as i64;
            if k[axis].abs() > n / 2 {
                return None;
            }
            flat = flat * n as usize + k[axis].rem_euclid(n) as usize;
        }
        if k[self.dim()..].iter().any(|&c| c != 0) {
            return None;
        }
        Some(flat)
    }

    /// Physical coordinates of a flat grid index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        let mut rem = flat;
        for axis in (0..self.dim()).rev() {
            let n = self.points[axis];
            x[axis] = (rem % n) as f64 * self.spacing(axis);
            rem /= n;
        }
        x
    }

    /// Squared physical wavenumber `|2 pi k / L|^2`.
    pub fn wavenumber_sq(&self, k: &Wavevector) -> f64 {
        (0..self.dim())
            .map(|a| {
                let w = k[a] as f64 * self.wave_scale(a);
                w * w
            })
            .sum()
    }

    pub(crate) fn is_nyquist(&self, axis: usize, k: i64) -> bool {
        k.unsigned_abs() as usize * 2 == self.points[axis]
    }

    pub(crate) fn in_dealias_band(&self, k: &Wavevector) -> bool {
        (0..self.dim()).all(|a| k[a].abs() <= self.dealias_cutoff(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_small_axes() {
        assert!(TorusGrid::cubic(2, 6).is_ok());
        assert!(TorusGrid::cubic(2, 7).is_err());
        assert!(TorusGrid::cubic(1, 2).is_err());
        assert!(TorusGrid::cubic(4, 8).is_err());
        assert!(TorusGrid::new(vec![8, 8], vec![1.0]).is_err());
    }

    #[test]
    fn cell_volume_times_points_is_volume() {
        let g = TorusGrid::new(vec![8, 12, 6], vec![1.0, 2.5, 3.0]).unwrap();
        let v = g.cell_volume() * g.total_points() as f64;
        assert!((v - g.volume()).abs() < 1e-12 * g.volume());
    }

    #[test]
    fn flat_index_inverts_mode_at() {
        let g = TorusGrid::cubic(3, 8).unwrap();
        for flat in 0..g.total_points() {
            let k = g.mode_at(flat);
            assert_eq!(g.flat_index(&k), Some(flat));
        }
        assert_eq!(g.flat_index(&[5, 0, 0]), None);
    }

    #[test]
    fn dealias_cutoff_keeps_three_k_below_n() {
        for n in [4usize, 6, 12, 16, 32, 64] {
            let g = TorusGrid::cubic(1, n).unwrap();
            assert!(3 * g.dealias_cutoff(0) < n as i64);
        }
        assert_eq!(TorusGrid::cubic(1, 16).unwrap().dealias_cutoff(0), 5);
    }
}
