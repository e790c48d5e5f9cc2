//! Tridiagonal systems.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tridiagonal matrix with `lower[i] = A[i+1][i]`, `diag[i] = A[i][i]`,
/// `upper[i] = A[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> Tridiagonal<T> {
    pub fn zeros(n: usize) -> Self {
        let off = n.saturating_sub(1);
        Self { lower: vec![T::zero(); off], diag: vec![T::zero(); n], upper: vec![T::zero(); off] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Adds `v` to entry `(i, j)`; `|i - j|` must be at most 1.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        if i == j {
            self.diag[i] = self.diag[i] + v;
        } else if i == j + 1 {
            self.lower[j] = self.lower[j] + v;
        } else if j == i + 1 {
            self.upper[i] = self.upper[i] + v;
        } else {
            panic!("entry ({i}, {j}) is outside the tridiagonal band");
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc = acc + self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc = acc + self.upper[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Thomas algorithm. Fails with [`Error::Singular`] on a zero pivot.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: rhs.len() });
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        let scale = self.scale();
        let mut pivot = self.diag[0];
        check_pivot(pivot, scale, 0)?;
        if n > 1 {
            c[0] = self.upper[0] / pivot;
        }
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i - 1] * c[i - 1];
            check_pivot(pivot, scale, i)?;
            if i + 1 < n {
                c[i] = self.upper[i] / pivot;
            }
            d[i] = (rhs[i] - self.lower[i - 1] * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] = d[i] - c[i] * d[i + 1];
        }
        Ok(d)
    }
}

impl<T: Scalar> Tridiagonal<T> {
    fn scale(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.lower)
            .chain(&self.upper)
            .fold(0.0, |m, v| m.max(v.as_f64().abs()))
    }
}

/// A pivot that is zero, or lost to cancellation relative to the matrix scale,
/// marks the system as singular.
fn check_pivot<T: Scalar>(pivot: T, scale: f64, row: usize) -> Result<()> {
    if pivot == T::zero() || pivot.as_f64().abs() <= 1e-13 * scale {
        Err(Error::Singular(format!("zero pivot in row {row}")))
    } else {
        Ok(())
    }
}
