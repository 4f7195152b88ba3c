//! Dense complex matrices with a finiteness guarantee.

use std::ops::Deref;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// A non-empty dense complex matrix whose entries are all finite.
///
/// Residuals throughout the crate are measured in the max-absolute-entry
/// norm, see [`ComplexMatrix::max_abs`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::Structural(format!(
                "matrix must be non-empty, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        for j in 0..inner.ncols() {
            for i in 0..inner.nrows() {
                let z = inner[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(inner))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::new(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a real matrix from row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Structural("ragged rows".into()));
        }
        Self::from_fn(nrows, ncols, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(rows, cols))
    }

    /// Wraps the result of an operation on finite inputs that cannot leave
    /// the finite range except by overflow.
    pub(crate) fn wrap(inner: DMatrix<C64>) -> Self {
        debug_assert!(inner.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self(inner)
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn is_square(&self) -> bool {
        self.0.nrows() == self.0.ncols()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    /// `max(1, max |entry|)`, the reference magnitude for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.max_abs().max(1.0)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `(M + M†) / 2`. The result is exactly Hermitian in floating point:
    /// mirrored entries are computed from the same two addends.
    pub fn hermitian_part(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Structural("hermitian part of a non-square matrix".into()));
        }
        Ok(Self(hermitize(&self.0)))
    }

    /// `max |M - M†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs_diff(&self.0, &self.0.adjoint())
    }

    pub fn column(&self, j: usize) -> DVector<C64> {
        self.0.column(j).into_owned()
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;

    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

impl From<ComplexMatrix> for DMatrix<C64> {
    fn from(m: ComplexMatrix) -> Self {
        m.0
    }
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Max-absolute-entry norm of `a - b`; panics on shape mismatch.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub(crate) fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let upper = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = upper;
            out[(j, i)] = upper.conj();
        }
    }
    out
}

#[cfg(test)]
fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}
