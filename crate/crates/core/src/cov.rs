//! Two-mode covariance matrices in the quadrature order `(X_a, Y_a, X_c, Y_c)`.

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

/// Symmetric 4×4 covariance matrix of the quadratures `(X_a, Y_a, X_c, Y_c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    v: RealMatrix,
}

impl CovMatrix {
    /// Wraps a 4×4 matrix, symmetrizing away asymmetry at roundoff level.
    pub fn new(v: RealMatrix) -> Result<Self> {
        if v.dims() != (4, 4) {
            return Err(Error::DimensionMismatch(format!(
                "covariance matrix must be 4×4, got {:?}",
                v.dims()
            )));
        }
        let asym = v.max_asymmetry();
        if asym > 1e-12 * v.max_abs().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self { v: v.symmetrized() })
    }

    pub fn vacuum() -> Self {
        Self {
            v: RealMatrix::identity(4).scale(0.5),
        }
    }

    /// Product of thermal states with occupations `n_a` and `n_c`.
    pub fn thermal(n_a: f64, n_c: f64) -> Result<Self> {
        let (a, c) = (n_a + 0.5, n_c + 0.5);
        Self::new(RealMatrix::from_diag(&[a, a, c, c])?)
    }

    pub fn as_matrix(&self) -> &RealMatrix {
        &self.v
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.v
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.v[(i, j)]
    }

    /// Local block of mode a.
    pub fn a_block(&self) -> RealMatrix {
        self.v.submatrix(&[0, 1], &[0, 1])
    }

    /// Local block of mode c.
    pub fn c_block(&self) -> RealMatrix {
        self.v.submatrix(&[2, 3], &[2, 3])
    }

    /// Correlations between a (rows) and c (columns).
    pub fn cross_block(&self) -> RealMatrix {
        self.v.submatrix(&[0, 1], &[2, 3])
    }
}
