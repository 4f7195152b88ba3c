//! Admissible sign patterns.
//!
//! A pattern `s_ij` keeps every energy-dependent effective Hamiltonian
//! obtained by eliminating partitions inside the same class exactly when it
//! is a two-coloring, `s_ij = eps_i eps_j` for some `eps ∈ {±1}^N`.
//! Equivalently every triangle `i < j < k` carries an even number of minus
//! signs. Reordering the partitions by color brings the Hamiltonian to the
//! two-block form `[[F, -A], [A†, G]]`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hamiltonian::{pairs, BlockPartition, PartitionedHamiltonian, Sign, SignPattern};
use crate::matrix::{ComplexMatrix, C64};
use crate::metric::GradingMetric;

pub const MAX_ENUMERATION_PARTITIONS: usize = 16;

/// Gauge-fixed two-coloring of the partitions, `eps[0] = +1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    eps: Vec<Sign>,
}

impl Coloring {
    /// Flips the whole vector if needed so that `eps[0] = +1`.
    pub fn new(eps: Vec<Sign>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::Structural("coloring of zero partitions".into()));
        }
        let eps = if eps[0] == Sign::Minus {
            eps.into_iter().map(Sign::flip).collect()
        } else {
            eps
        };
        Ok(Self { eps })
    }

    pub fn all_plus(n: usize) -> Result<Self> {
        Self::new(vec![Sign::Plus; n])
    }

    pub fn eps(&self) -> &[Sign] {
        &self.eps
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn m_partitions(&self) -> usize {
        self.eps.iter().filter(|&&s| s == Sign::Plus).count()
    }

    pub fn n_partitions(&self) -> usize {
        self.eps.len() - self.m_partitions()
    }

    pub fn pattern(&self) -> SignPattern {
        SignPattern::from_coloring(&self.eps).expect("non-empty coloring")
    }

    pub fn metric(&self, partition: &BlockPartition) -> Result<GradingMetric> {
        GradingMetric::from_partition_signs(&self.eps, partition)
    }
}

/// Recovers the coloring behind `pattern` or reports a violated triangle.
///
/// `eps_j = s_0j` fixes the gauge; every remaining pair is then checked.
pub fn validate_pattern(pattern: &SignPattern) -> Result<Coloring> {
    let n = pattern.n_partitions();
    let mut eps = vec![Sign::Plus; n];
    for (j, e) in eps.iter_mut().enumerate().skip(1) {
        *e = pattern.get(0, j);
    }
    for (i, j) in pairs(n).filter(|&(i, _)| i > 0) {
        if pattern.get(i, j) != eps[i] * eps[j] {
            return Err(Error::InvalidPattern { i: 0, j: i, k: j });
        }
    }
    Coloring::new(eps)
}

/// All `2^(N-1)` admissible patterns with their colorings, ordered
/// lexicographically in `eps` with `+ < -`.
pub fn enumerate_patterns(n: usize) -> Result<Vec<(SignPattern, Coloring)>> {
    if !(1..=MAX_ENUMERATION_PARTITIONS).contains(&n) {
        return Err(Error::Argument(format!(
            "pattern enumeration supports 1..={MAX_ENUMERATION_PARTITIONS} partitions, got {n}"
        )));
    }
    let free = n - 1;
    let out = (0u32..(1 << free))
        .map(|bits| {
            // eps[1] is the most significant bit, so counting up is lexicographic.
            let eps: Vec<Sign> = std::iter::once(Sign::Plus)
                .chain((0..free).map(|k| {
                    if bits >> (free - 1 - k) & 1 == 1 {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    }
                }))
                .collect();
            let coloring = Coloring::new(eps).expect("non-empty");
            (coloring.pattern(), coloring)
        })
        .collect();
    Ok(out)
}

/// Number of minus-signed block pairs and of minus-signed matrix positions
/// above the diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinusCounts {
    pub pairs: usize,
    pub dims: usize,
}

pub fn minus_counts(coloring: &Coloring, partition: &BlockPartition) -> Result<MinusCounts> {
    if coloring.len() != partition.len() {
        return Err(Error::Structural(format!(
            "coloring has {} entries, partition has {} blocks",
            coloring.len(),
            partition.len()
        )));
    }
    let (mut plus_dim, mut minus_dim) = (0, 0);
    for (s, &d) in coloring.eps().iter().zip(partition.dims()) {
        match s {
            Sign::Plus => plus_dim += d,
            Sign::Minus => minus_dim += d,
        }
    }
    Ok(MinusCounts {
        pairs: coloring.m_partitions() * coloring.n_partitions(),
        dims: plus_dim * minus_dim,
    })
}

/// The Hamiltonian reordered to `[[F, -A], [A†, G]]` with metric
/// `diag(+1 x m, -1 x n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalForm {
    /// `permutation[k]` is the original basis index placed at position `k`.
    pub permutation: Vec<usize>,
    /// Partition indices in their new order.
    pub partition_order: Vec<usize>,
    pub coloring: Coloring,
    pub m: usize,
    pub n: usize,
    pub metric: GradingMetric,
    pub matrix: ComplexMatrix,
}

impl CanonicalForm {
    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    pub fn scale(&self) -> f64 {
        self.matrix.scale()
    }

    /// `F`, the leading `m x m` block.
    pub fn f_block(&self) -> ComplexMatrix {
        ComplexMatrix::wrap(self.matrix.view((0, 0), (self.m, self.m)).into_owned())
    }

    /// `G`, the trailing `n x n` block (`m + n > m`).
    pub fn g_block(&self) -> Option<ComplexMatrix> {
        (self.n > 0).then(|| ComplexMatrix::wrap(self.matrix.view((self.m, self.m), (self.n, self.n)).into_owned()))
    }

    /// `A`, minus the upper-right block.
    pub fn a_block(&self) -> Option<ComplexMatrix> {
        (self.n > 0 && self.m > 0)
            .then(|| ComplexMatrix::wrap(-self.matrix.view((0, self.m), (self.m, self.n)).into_owned()))
    }

    /// `[[F, +A], [A†, G]]`, the Hermitian matrix with the same blocks.
    pub fn hermitian_control_matrix(&self) -> ComplexMatrix {
        let mut h = self.matrix.clone().into_inner();
        if self.m > 0 && self.n > 0 {
            let mut upper = h.view_mut((0, self.m), (self.m, self.n));
            upper.neg_mut();
        }
        ComplexMatrix::wrap(h)
    }
}

/// Stable reordering of the partitions: `+` partitions first, `-` after.
pub fn canonicalize(ph: &PartitionedHamiltonian) -> Result<CanonicalForm> {
    let coloring = validate_pattern(ph.pattern())?;
    let part = ph.partition();
    let partition_order: Vec<usize> = (0..part.len())
        .filter(|&i| coloring.eps()[i] == Sign::Plus)
        .chain((0..part.len()).filter(|&i| coloring.eps()[i] == Sign::Minus))
        .collect();
    let permutation: Vec<usize> = partition_order.iter().flat_map(|&i| part.range(i)).collect();
    let m: usize = (0..part.len()).filter(|&i| coloring.eps()[i] == Sign::Plus).map(|i| part.dim(i)).sum();
    let n = part.total() - m;

    let full = ph.assemble();
    let d = part.total();
    let matrix = DMatrix::<C64>::from_fn(d, d, |k, l| full[(permutation[k], permutation[l])]);
    Ok(CanonicalForm {
        permutation,
        partition_order,
        coloring,
        m,
        n,
        metric: GradingMetric::canonical(m, n)?,
        matrix: ComplexMatrix::wrap(matrix),
    })
}
