//! Block partitions, sign patterns and the partitioned Hamiltonian
//! `M_ii = H_ii`, `M_ij = s_ij B_ij`, `M_ji = B_ij†` (i < j).

use std::fmt;
use std::ops::{Mul, Range};
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

/// Ordered partition dimensions `d_1 .. d_N` of a basis of size `D = sum d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockPartition {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Structural("a partition needs at least one block".into()));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Structural(format!("partition {i} has zero dimension")));
        }
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &d in &dims {
            acc += d;
            offsets.push(acc);
        }
        Ok(Self { dims, offsets })
    }

    /// `n` blocks of dimension one.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn total(&self) -> usize {
        self.offsets[self.dims.len()]
    }

    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_value(v: f64) -> Result<Sign> {
        if v == 1.0 {
            Ok(Sign::Plus)
        } else if v == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::Argument(format!("sign must be +1 or -1, got {v}")))
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Sign> {
        match s.trim() {
            "+" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "-1" | "\u{2212}" => Ok(Sign::Minus),
            other => Err(Error::Argument(format!("cannot parse sign {other:?}"))),
        }
    }
}

/// Position of the pair `(i, j)`, `i < j`, in the column-wise upper-triangle
/// order `(0,1), (0,2), (1,2), (0,3), (1,3), (2,3), ...`.
///
/// For three partitions this lists the couplings as `(α, β, γ)`, for four as
/// `(α, β, γ, μ, ν, ρ)`.
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

/// All pairs `i < j < n` in [`pair_index`] order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..n).flat_map(|j| (0..j).map(move |i| (i, j)))
}

/// One sign per block pair `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignPattern {
    n_partitions: usize,
    signs: Vec<Sign>,
}

impl SignPattern {
    /// `signs` are given in [`pair_index`] order.
    pub fn new(n_partitions: usize, signs: Vec<Sign>) -> Result<Self> {
        if n_partitions == 0 {
            return Err(Error::Structural("sign pattern needs at least one partition".into()));
        }
        let expected = n_partitions * (n_partitions - 1) / 2;
        if signs.len() != expected {
            return Err(Error::Structural(format!(
                "{n_partitions} partitions need {expected} signs, got {}",
                signs.len()
            )));
        }
        Ok(Self { n_partitions, signs })
    }

    pub fn all_plus(n_partitions: usize) -> Result<Self> {
        Self::new(n_partitions, vec![Sign::Plus; n_partitions * n_partitions.saturating_sub(1) / 2])
    }

    /// `s_ij = eps_i eps_j`.
    pub fn from_coloring(eps: &[Sign]) -> Result<Self> {
        let n = eps.len();
        Self::new(n, pairs(n).map(|(i, j)| eps[i] * eps[j]).collect())
    }

    pub fn n_partitions(&self) -> usize {
        self.n_partitions
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    /// Sign of the pair `(i, j)` in either order.
    pub fn get(&self, i: usize, j: usize) -> Sign {
        assert!(i != j && i < self.n_partitions && j < self.n_partitions);
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.signs[pair_index(a, b)]
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.signs.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    /// Parses a comma-separated sign list in pair order, e.g. `"+,-,-"`.
    fn from_str(s: &str) -> Result<Self> {
        let signs: Vec<Sign> = if s.trim().is_empty() {
            Vec::new()
        } else {
            s.split(',').map(str::parse).collect::<Result<_>>()?
        };
        // k = n(n-1)/2  =>  n = (1 + sqrt(1 + 8k)) / 2
        let k = signs.len();
        let n = (1..=64).find(|n| n * (n - 1) / 2 == k).ok_or_else(|| {
            Error::Structural(format!("{k} signs do not fill the upper triangle of any block count"))
        })?;
        Self::new(n, signs)
    }
}

/// Hermitian diagonal blocks, coupling blocks for `i < j` and a sign per pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionedHamiltonian {
    partition: BlockPartition,
    diagonal: Vec<ComplexMatrix>,
    coupling: Vec<ComplexMatrix>,
    pattern: SignPattern,
}

impl PartitionedHamiltonian {
    /// Diagonal blocks are replaced by their Hermitian part `(H + H†)/2`.
    /// Couplings are indexed in [`pair_index`] order.
    pub fn new(
        partition: BlockPartition,
        diagonal: Vec<ComplexMatrix>,
        coupling: Vec<ComplexMatrix>,
        pattern: SignPattern,
    ) -> Result<Self> {
        let n = partition.len();
        if pattern.n_partitions() != n {
            return Err(Error::Structural(format!(
                "pattern has {} partitions, partition has {n}",
                pattern.n_partitions()
            )));
        }
        if diagonal.len() != n {
            return Err(Error::Structural(format!("expected {n} diagonal blocks, got {}", diagonal.len())));
        }
        if coupling.len() != n * (n - 1) / 2 {
            return Err(Error::Structural(format!(
                "expected {} coupling blocks, got {}",
                n * (n - 1) / 2,
                coupling.len()
            )));
        }
        let mut diagonal = diagonal;
        for (i, block) in diagonal.iter_mut().enumerate() {
            let d = partition.dim(i);
            if block.shape() != (d, d) {
                return Err(Error::Structural(format!(
                    "diagonal block {i} is {}x{}, partition declares {d}x{d}",
                    block.nrows(),
                    block.ncols()
                )));
            }
            *block = block.hermitian_part()?;
        }
        for (i, j) in pairs(n) {
            let block = &coupling[pair_index(i, j)];
            let shape = (partition.dim(i), partition.dim(j));
            if block.shape() != shape {
                return Err(Error::Structural(format!(
                    "coupling block ({i},{j}) is {}x{}, partition declares {}x{}",
                    block.nrows(),
                    block.ncols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(Self { partition, diagonal, coupling, pattern })
    }

    /// Block-diagonal Hamiltonian with zero couplings.
    pub fn decoupled(diagonal: Vec<ComplexMatrix>, pattern: SignPattern) -> Result<Self> {
        let partition = BlockPartition::new(diagonal.iter().map(|b| b.nrows()).collect())?;
        let coupling = pairs(partition.len())
            .map(|(i, j)| ComplexMatrix::zeros(partition.dim(i), partition.dim(j)))
            .collect::<Result<_>>()?;
        Self::new(partition, diagonal, coupling, pattern)
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn pattern(&self) -> &SignPattern {
        &self.pattern
    }

    pub fn n_partitions(&self) -> usize {
        self.partition.len()
    }

    pub fn dim(&self) -> usize {
        self.partition.total()
    }

    pub fn diagonal(&self, i: usize) -> &ComplexMatrix {
        &self.diagonal[i]
    }

    pub fn diagonal_blocks(&self) -> &[ComplexMatrix] {
        &self.diagonal
    }

    /// Unsigned coupling `B_ij`, `i < j`.
    pub fn coupling(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.coupling[pair_index(i, j)]
    }

    pub fn coupling_blocks(&self) -> &[ComplexMatrix] {
        &self.coupling
    }

    pub fn with_pattern(&self, pattern: SignPattern) -> Result<Self> {
        Self::new(self.partition.clone(), self.diagonal.clone(), self.coupling.clone(), pattern)
    }

    /// Multiplies every coupling block by `t`.
    pub fn with_scaled_couplings(&self, t: f64) -> Result<Self> {
        let coupling = self
            .coupling
            .iter()
            .map(|b| ComplexMatrix::new(b.as_matrix() * C64::new(t, 0.0)))
            .collect::<Result<_>>()?;
        Ok(Self { coupling, ..self.clone() })
    }

    /// The full `D x D` matrix.
    pub fn assemble(&self) -> ComplexMatrix {
        let d = self.dim();
        let p = &self.partition;
        let mut m = DMatrix::zeros(d, d);
        for i in 0..p.len() {
            m.view_mut((p.offset(i), p.offset(i)), (p.dim(i), p.dim(i)))
                .copy_from(self.diagonal[i].as_matrix());
        }
        for (i, j) in pairs(p.len()) {
            let b = self.coupling(i, j).as_matrix();
            let s = self.pattern.get(i, j).value();
            m.view_mut((p.offset(i), p.offset(j)), (p.dim(i), p.dim(j)))
                .copy_from(&(b * C64::new(s, 0.0)));
            m.view_mut((p.offset(j), p.offset(i)), (p.dim(j), p.dim(i)))
                .copy_from(&b.adjoint());
        }
        ComplexMatrix::wrap(m)
    }
}

/// Extracts block `(i, j)` of a matrix laid out by `p`.
pub(crate) fn block(m: &DMatrix<C64>, p: &BlockPartition, i: usize, j: usize) -> DMatrix<C64> {
    m.view((p.offset(i), p.offset(j)), (p.dim(i), p.dim(j))).into_owned()
}
