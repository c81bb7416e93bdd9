//! Minimal dense linear algebra for small symmetric positive-definite systems.
//!
//! The matrices handled here are tiny (N x N with N below ~64), so a plain
//! row-major `Vec<f64>` with hand-written Cholesky factorization beats pulling
//! in a full linear-algebra stack.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite: nonpositive pivot at column {col} ({pivot})")]
    NotPositiveDefinite { col: usize, pivot: f64 },
    #[error("dimension mismatch: matrix is {n}x{n}, vector has length {len}")]
    DimensionMismatch { n: usize, len: usize },
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Vec<f64>,
    n: usize,
}

impl Cholesky {
    /// Factor a row-major symmetric matrix `a` (n x n) as L L^T.
    ///
    /// Only the lower triangle of `a` is read.
    pub fn factor(a: &[f64], n: usize) -> Result<Self, LinalgError> {
        assert_eq!(a.len(), n * n, "matrix buffer must be n*n");
        let mut l = vec![0.0f64; n * n];
        for j in 0..n {
            let mut diag = a[j * n + j];
            for k in 0..j {
                diag -= l[j * n + k] * l[j * n + k];
            }
            if diag <= 0.0 || !diag.is_finite() {
                return Err(LinalgError::NotPositiveDefinite {
                    col: j,
                    pivot: diag,
                });
            }
            let root = diag.sqrt();
            l[j * n + j] = root;
            for i in (j + 1)..n {
                let mut sum = a[i * n + j];
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = sum / root;
            }
        }
        Ok(Self { l, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve A x = b given the factorization of A.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                n: self.n,
                len: b.len(),
            });
        }
        let n = self.n;
        // Forward: L y = b.
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l[i * n + k] * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        // Backward: L^T x = y.
        let mut x = y;
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.l[k * n + i] * x[k];
            }
            x[i] /= self.l[i * n + i];
        }
        Ok(x)
    }
}

/// Dot product of two equal-length slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
