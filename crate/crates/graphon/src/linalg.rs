//! Dense symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Used for the spectral embedding behind k-means initialization and for
//! exact small-matrix norm checks. Power iteration (the operator-norm
//! estimator proper) lives in [`crate::metrics`] and does not go through
//! this solver.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Eigenvalues and eigenvectors of a symmetric matrix.
pub struct EigenDecomposition {
    /// Eigenvalues, one per column of `vectors`, unsorted.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: DenseMatrix,
}

impl EigenDecomposition {
    /// Column indices sorted by |eigenvalue|, largest first; ties broken by
    /// signed value then index, so the order is deterministic.
    pub fn order_by_magnitude(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| {
            self.values[b]
                .abs()
                .partial_cmp(&self.values[a].abs())
                .unwrap()
                .then(self.values[b].partial_cmp(&self.values[a]).unwrap())
                .then(a.cmp(&b))
        });
        idx
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Cyclic Jacobi with a sweep budget. Errors if the off-diagonal mass has
/// not vanished after `max_sweeps` sweeps, which does not happen for the
/// sizes this crate works at (Jacobi converges quadratically).
pub fn jacobi_eigen(m: &DenseMatrix, max_sweeps: usize) -> Result<EigenDecomposition> {
    let n = m.n();
    debug_assert!(m.is_symmetric(1e-9));
    let mut a = m.clone();
    let mut v = DenseMatrix::from_fn(n, |i, j| (i == j) as u8 as f64);
    if n <= 1 {
        return Ok(EigenDecomposition {
            values: (0..n).map(|i| a.get(i, i)).collect(),
            vectors: v,
        });
    }

    let scale: f64 = m.frobenius_sq().sqrt().max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;

    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).powi(2);
            }
        }
        if (2.0 * off).sqrt() <= tol {
            return Ok(EigenDecomposition {
                values: (0..n).map(|i| a.get(i, i)).collect(),
                vectors: v,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol / (n * n) as f64 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                // rotation angle zeroing a[p][q]
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, c * aip - s * aiq);
                    a.set(i, q, s * aip + c * aiq);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, c * apj - s * aqj);
                    a.set(q, j, s * apj + c * aqj);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    Err(Error::Numerical(format!(
        "jacobi eigendecomposition did not converge in {max_sweeps} sweeps"
    )))
}

pub const DEFAULT_JACOBI_SWEEPS: usize = 64;
