use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::torus::{FourierBasis, SpectralField, TorusGrid, Wavevector};

/// The real span of the first `n` basis modes, with the orthonormal real basis
/// `V^{-1/2}`, `sqrt(2/V) cos(k.x)`, `sqrt(2/V) sin(k.x)` in pair order.
#[derive(Debug, Clone)]
pub struct XnSpace {
    grid: TorusGrid,
    pairs: Vec<Wavevector>,
    n: usize,
}

impl XnSpace {
    /// Fails unless `n` is 0 or odd and fits inside the dealiasing band.
    pub fn new(grid: &TorusGrid, n: usize) -> Result<Self> {
        let basis = FourierBasis::new(grid);
        basis.check_mode_count(n)?;
        let capacity = basis.galerkin_capacity();
        if n > capacity {
            return Err(Error::ModeCountExceeded { requested: n, available: capacity });
        }
        let pairs = basis.representatives()[..n.saturating_sub(1) / 2].to_vec();
        Ok(Self { grid: grid.clone(), pairs, n })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(k, alpha)` terms with `e_i = sum alpha e^{i k.x}`.
    fn expansion(&self, i: usize) -> Vec<(Wavevector, Complex64)> {
        let v = self.grid.volume();
        if i == 0 {
            return vec![([0; 3], Complex64::new(v.powf(-0.5), 0.0))];
        }
        let k = self.pairs[(i - 1) / 2];
        let neg = [-k[0], -k[1], -k[2]];
        let s = (2.0 * v).powf(-0.5);
        if i % 2 == 1 {
            vec![(k, Complex64::new(s, 0.0)), (neg, Complex64::new(s, 0.0))]
        } else {
            vec![(k, Complex64::new(0.0, -s)), (neg, Complex64::new(0.0, s))]
        }
    }

    /// `<f, e_i>` for every basis function; these are also the coordinates of
    /// the orthogonal projection of `f` onto X_n.
    pub fn coeffs_of(&self, f: &SpectralField) -> Vec<f64> {
        let v = self.grid.volume();
        let mut out = Vec::with_capacity(self.n);
        if self.n == 0 {
            return out;
        }
        out.push(v.sqrt() * f.coeff(&[0; 3]).re);
        let s = (2.0 * v).sqrt();
        for k in &self.pairs {
            let c = f.coeff(k);
            out.push(s * c.re);
            out.push(-s * c.im);
        }
        out
    }

    /// Field with the given X_n coordinates.
    pub fn field_of(&self, a: &[f64]) -> SpectralField {
        assert_eq!(a.len(), self.n, "coordinate vector length");
        let mut f = SpectralField::zeros(&self.grid);
        if self.n == 0 {
            return f;
        }
        let v = self.grid.volume();
        f.set_mode(&[0; 3], Complex64::new(a[0] / v.sqrt(), 0.0));
        let s = (2.0 * v).sqrt();
        for (j, k) in self.pairs.iter().enumerate() {
            f.set_mode(k, Complex64::new(a[2 * j + 1], -a[2 * j + 2]) / s);
        }
        f
    }

    /// `G_ij = int rho e_i e_j`, evaluated exactly from the density's coefficients.
    pub fn gram(&self, rho: &SpectralField) -> DMatrix<f64> {
        let v = self.grid.volume();
        let terms: Vec<_> = (0..self.n).map(|i| self.expansion(i)).collect();
        let mut g = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..=i {
                let mut acc = Complex64::default();
                for (ks, a) in &terms[i] {
                    for (kt, b) in &terms[j] {
                        let m = [-(ks[0] + kt[0]), -(ks[1] + kt[1]), -(ks[2] + kt[2])];
                        acc += a * b * rho.coeff(&m);
                    }
                }
                g[(i, j)] = v * acc.re;
                g[(j, i)] = v * acc.re;
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_round_trip() {
        let g = TorusGrid::cubic(2, 16).unwrap();
        let s = XnSpace::new(&g, 9).unwrap();
        let a: Vec<f64> = (0..9).map(|i| 0.1 * i as f64 - 0.3).collect();
        let f = s.field_of(&a);
        let back = s.coeffs_of(&f);
        for (x, y) in a.iter().zip(&back) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!((f.l2_norm() - a.iter().map(|x| x * x).sum::<f64>().sqrt()).abs() < 1e-13);
    }

    #[test]
    fn capacity_and_parity_enforced() {
        let g = TorusGrid::cubic(1, 16).unwrap();
        assert!(XnSpace::new(&g, 11).is_ok());
        assert!(matches!(XnSpace::new(&g, 13), Err(Error::ModeCountExceeded { available: 11, .. })));
        assert!(matches!(XnSpace::new(&g, 4), Err(Error::SplitConjugatePair(4))));
    }

    #[test]
    fn unit_density_gram_is_identity() {
        let g = TorusGrid::cubic(3, 8).unwrap();
        let s = XnSpace::new(&g, 13).unwrap();
        let gram = s.gram(&SpectralField::constant(&g, 1.0));
        let eye = DMatrix::<f64>::identity(13, 13);
        assert!((gram - eye).amax() < 1e-14);
    }
}
