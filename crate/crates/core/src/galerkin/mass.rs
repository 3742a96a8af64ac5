use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::XnSpace;
use crate::error::{Error, Result};
use crate::torus::SpectralField;

/// `<M[rho] u, v> = int rho u v` on X_n, held with its Cholesky factor.
///
/// The same matrix acts on every velocity component.
#[derive(Debug, Clone)]
pub struct MassOperator {
    gram: DMatrix<f64>,
    factor: Cholesky<f64, Dyn>,
    min_rho: f64,
}

pub fn build_mass_operator(rho: &SpectralField, n: usize) -> Result<MassOperator> {
    let space = XnSpace::new(rho.grid(), n)?;
    let gram = space.gram(rho);
    let min_rho = rho.min_physical().0;
    let factor = gram
        .clone()
        .cholesky()
        .ok_or(Error::NonPositiveDensity { min_rho })?;
    Ok(MassOperator { gram, factor, min_rho })
}

/// Solves `G x = rhs`.
pub fn mass_solve(op: &MassOperator, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != op.gram.nrows() {
        return Err(Error::InvalidParams(format!(
            "right-hand side has {} entries for a {}-mode space",
            rhs.len(),
            op.gram.nrows()
        )));
    }
    let x = op.factor.solve(&DVector::from_column_slice(rhs));
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonPositiveDensity { min_rho: op.min_rho });
    }
    Ok(x.iter().copied().collect())
}

impl MassOperator {
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn n(&self) -> usize {
        self.gram.nrows()
    }

    /// Grid minimum of the density the operator was built from.
    pub fn min_rho(&self) -> f64 {
        self.min_rho
    }

    pub fn apply(&self, a: &[f64]) -> Vec<f64> {
        (&self.gram * DVector::from_column_slice(a)).iter().copied().collect()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.gram.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::TorusGrid;

    #[test]
    fn unit_density_solve_is_identity() {
        let g = TorusGrid::cubic(2, 12).unwrap();
        let op = build_mass_operator(&SpectralField::constant(&g, 1.0), 9).unwrap();
        let b: Vec<f64> = (0..9).map(|i| (i as f64).sin()).collect();
        let x = mass_solve(&op, &b).unwrap();
        for (p, q) in x.iter().zip(&b) {
            assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_density_fails_cholesky() {
        let g = TorusGrid::cubic(1, 16).unwrap();
        let rho = SpectralField::constant(&g, -1.0);
        assert!(matches!(build_mass_operator(&rho, 5), Err(Error::NonPositiveDensity { .. })));
    }

    #[test]
    fn eigenvalues_bracket_density_range() {
        let g = TorusGrid::cubic(1, 32).unwrap();
        let rho = SpectralField::from_fn(&g, |x| 1.0 + 0.5 * x[0].cos() + 0.2 * (2.0 * x[0]).sin());
        let op = build_mass_operator(&rho, 11).unwrap();
        let ev = op.eigenvalues();
        let (lo, hi) = (rho.min_physical().0, rho.max_physical().0);
        assert!(ev[0] >= lo - 1e-12);
        assert!(*ev.last().unwrap() <= hi + 1e-12);
    }
}
