//! The diagonal ±1 metric `Q`, the conjugation `M‡ = Q M† Q` and the
//! indefinite forms `<u|Q|v>`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hamiltonian::{BlockPartition, Sign};
use crate::matrix::{max_abs_diff, ComplexMatrix, C64};

/// A diagonal involution `Q = diag(q_1, ..., q_D)` with `q_i = ±1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradingMetric {
    signature: Vec<Sign>,
}

impl GradingMetric {
    pub fn new(signature: Vec<Sign>) -> Result<Self> {
        if signature.is_empty() {
            return Err(Error::Structural("metric must have positive dimension".into()));
        }
        Ok(Self { signature })
    }

    /// From numeric diagonal entries; each must be exactly `+1` or `-1`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Sign::from_value(v)).collect::<Result<_>>()?)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![Sign::Plus; dim])
    }

    /// `m` leading `+1` followed by `n` trailing `-1`.
    pub fn canonical(m: usize, n: usize) -> Result<Self> {
        Self::new(std::iter::repeat_n(Sign::Plus, m).chain(std::iter::repeat_n(Sign::Minus, n)).collect())
    }

    /// Repeats the sign of partition `i` over its `d_i` basis vectors.
    pub fn from_partition_signs(eps: &[Sign], partition: &BlockPartition) -> Result<Self> {
        if eps.len() != partition.len() {
            return Err(Error::Structural(format!(
                "{} partition signs for {} partitions",
                eps.len(),
                partition.len()
            )));
        }
        Self::new(
            eps.iter()
                .zip(partition.dims())
                .flat_map(|(&s, &d)| std::iter::repeat_n(s, d))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.signature.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signature.is_empty()
    }

    pub fn signature(&self) -> &[Sign] {
        &self.signature
    }

    pub fn value(&self, i: usize) -> f64 {
        self.signature[i].value()
    }

    pub fn is_identity(&self) -> bool {
        self.signature.iter().all(|&s| s == Sign::Plus)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::wrap(DMatrix::from_diagonal(&DVector::from_iterator(
            self.len(),
            self.signature.iter().map(|s| C64::new(s.value(), 0.0)),
        )))
    }

    /// `Q v`.
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        DVector::from_iterator(v.len(), v.iter().zip(&self.signature).map(|(z, s)| z * s.value()))
    }

    fn check_square(&self, m: &DMatrix<C64>) -> Result<()> {
        if m.nrows() != m.ncols() || m.nrows() != self.len() {
            return Err(Error::Structural(format!(
                "matrix is {}x{}, metric has dimension {}",
                m.nrows(),
                m.ncols(),
                self.len()
            )));
        }
        Ok(())
    }
}

/// `M‡ = Q M† Q`, entrywise `q_i q_j conj(M_ji)`. An exact involution.
pub fn ddagger(m: &ComplexMatrix, q: &GradingMetric) -> Result<ComplexMatrix> {
    q.check_square(m)?;
    Ok(ComplexMatrix::wrap(conjugated(m, q)))
}

fn conjugated(m: &DMatrix<C64>, q: &GradingMetric) -> DMatrix<C64> {
    let d = m.nrows();
    DMatrix::from_fn(d, d, |i, j| {
        let z = m[(j, i)].conj();
        if q.signature[i] == q.signature[j] {
            z
        } else {
            -z
        }
    })
}

/// `max |M‡ - M|`; zero exactly when `M` is `Q`-pseudo-Hermitian.
pub fn pseudo_hermiticity_residual(m: &ComplexMatrix, q: &GradingMetric) -> Result<f64> {
    q.check_square(m)?;
    Ok(max_abs_diff(&conjugated(m, q), m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormMode {
    /// `sum conj(u_i) q_i v_i`
    Sesquilinear,
    /// `sum u_i q_i v_i`
    Bilinear,
}

/// The indefinite form `<u|Q|v>` in the requested mode.
pub fn qform(u: &DVector<C64>, v: &DVector<C64>, q: &GradingMetric, mode: FormMode) -> Result<C64> {
    if u.len() != q.len() || v.len() != q.len() {
        return Err(Error::Structural(format!(
            "vector lengths {} and {} do not match metric dimension {}",
            u.len(),
            v.len(),
            q.len()
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for ((a, b), s) in u.iter().zip(v.iter()).zip(&q.signature) {
        let a = match mode {
            FormMode::Sesquilinear => a.conj(),
            FormMode::Bilinear => *a,
        };
        acc += a * b * s.value();
    }
    Ok(acc)
}
