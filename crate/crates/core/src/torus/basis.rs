use rustfft::num_complex::Complex64;

use super::{SpectralField, TorusGrid, Wavevector};
use crate::error::{Error, Result};

/// Fixed total ordering of Fourier modes defining the nested spaces X_n.
///
/// Order: the zero mode, then conjugate pairs `k, -k` sorted by integer
/// `|k|^2` and then lexicographically on the representative whose first
/// nonzero component is positive. Nyquist modes are excluded because they
/// have no real conjugate partner.
#[derive(Debug, Clone)]
pub struct FourierBasis {
    grid: TorusGrid,
    representatives: Vec<Wavevector>,
}

fn norm_sq(k: &Wavevector) -> i64 {
    k.iter().map(|c| c * c).sum()
}

fn is_canonical(k: &Wavevector) -> bool {
    match k.iter().find(|&&c| c != 0) {
        Some(&c) => c > 0,
        None => false,
    }
}

impl FourierBasis {
    pub fn new(grid: &TorusGrid) -> Self {
        let mut representatives = Vec::new();
        let dim = grid.dim();
        let half = |a: usize| if a < dim { grid.points()[a] as i64 / 2 - 1 } else { 0 };
        let (h0, h1, h2) = (half(0), half(1), half(2));
        for k0 in -h0..=h0 {
            for k1 in -h1..=h1 {
                for k2 in -h2..=h2 {
                    let k = [k0, k1, k2];
                    if is_canonical(&k) {
                        representatives.push(k);
                    }
                }
            }
        }
        representatives.sort_by(|a, b| norm_sq(a).cmp(&norm_sq(b)).then(a.cmp(b)));
        Self { grid: grid.clone(), representatives }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Total number of basis modes available on this grid.
    pub fn len(&self) -> usize {
        1 + 2 * self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Pair representatives in basis order.
    pub fn representatives(&self) -> &[Wavevector] {
        &self.representatives
    }

    /// The i-th basis wavevector.
    pub fn wavevector(&self, i: usize) -> Wavevector {
        if i == 0 {
            return [0; 3];
        }
        let k = self.representatives[(i - 1) / 2];
        if i % 2 == 1 {
            k
        } else {
            [-k[0], -k[1], -k[2]]
        }
    }

    /// Longest prefix of the ordering that lies inside the 2/3-rule band.
    pub fn galerkin_capacity(&self) -> usize {
        let inside = self
            .representatives
            .iter()
            .take_while(|k| self.grid.in_dealias_band(k))
            .count();
        1 + 2 * inside
    }

    /// Validates an X_n size: at most `len()` and never splitting a pair.
    pub fn check_mode_count(&self, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(Error::ModeCountExceeded { requested: n, available: self.len() });
        }
        if n != 0 && n.is_multiple_of(2) {
            return Err(Error::SplitConjugatePair(n));
        }
        Ok(())
    }
}

/// Orthogonal projection onto X_n = span of the first `n` basis modes.
pub fn truncate_to_xn(f: &SpectralField, n: usize) -> Result<SpectralField> {
    let basis = FourierBasis::new(f.grid());
    basis.check_mode_count(n)?;
    let grid = f.grid();
    let mut keep = vec![false; grid.total_points()];
    for i in 0..n {
        let k = basis.wavevector(i);
        if let Some(flat) = grid.flat_index(&k) {
            keep[flat] = true;
        }
    }
    let coeffs: Vec<Complex64> = f
        .coeffs()
        .iter()
        .zip(&keep)
        .map(|(&c, &k)| if k { c } else { Complex64::default() })
        .collect();
    SpectralField::from_coeffs(grid, coeffs)
}
