//! Permutation symmetries (parity-like operators) and their antilinear
//! variants (permutation followed by complex conjugation).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{max_abs_diff, ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryKind {
    Permutation,
    /// Permutation composed with entrywise complex conjugation.
    AntilinearPermutation,
}

/// A basis permutation `e_i -> e_{perm[i]}`, optionally followed by
/// complex conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryOperator {
    kind: SymmetryKind,
    perm: Vec<usize>,
}

impl SymmetryOperator {
    pub fn new(kind: SymmetryKind, perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        if n == 0 {
            return Err(Error::Structural("empty permutation".into()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::Structural(format!("{perm:?} is not a bijection on 0..{n}")));
            }
            seen[p] = true;
        }
        Ok(Self { kind, perm })
    }

    pub fn permutation(perm: Vec<usize>) -> Result<Self> {
        Self::new(SymmetryKind::Permutation, perm)
    }

    /// The reflection `i -> n - 1 - i`.
    pub fn reversal(n: usize) -> Result<Self> {
        Self::permutation((0..n).rev().collect())
    }

    /// `(S u)_k = u_{(k + shift) mod n}`.
    pub fn cyclic_shift(n: usize, shift: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Structural("empty permutation".into()));
        }
        Self::permutation((0..n).map(|i| (i + n - shift % n) % n).collect())
    }

    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// The same permutation with the conjugation toggled on.
    pub fn antilinear(&self) -> Self {
        Self { kind: SymmetryKind::AntilinearPermutation, perm: self.perm.clone() }
    }

    /// The linear part as a 0/1 matrix, `P[perm[i], i] = 1`.
    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &p) in self.perm.iter().enumerate() {
            m[(p, i)] = C64::new(1.0, 0.0);
        }
        ComplexMatrix::wrap(m)
    }

    /// Composition of the permutation parts, `self ∘ other`.
    pub fn compose(&self, other: &SymmetryOperator) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Structural("composing permutations of different sizes".into()));
        }
        let kind = if self.kind == other.kind {
            SymmetryKind::Permutation
        } else {
            SymmetryKind::AntilinearPermutation
        };
        Ok(Self { kind, perm: other.perm.iter().map(|&j| self.perm[j]).collect() })
    }

    pub fn power(&self, k: u32) -> Self {
        let mut out = Self {
            kind: SymmetryKind::Permutation,
            perm: (0..self.len()).collect(),
        };
        for _ in 0..k {
            out = self.compose(&out).expect("same size");
        }
        out
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        Self { kind: self.kind, perm: inv }
    }

    /// True when the permutation part is the identity.
    pub fn is_identity_permutation(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn is_involution(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| self.perm[p] == i)
    }

    /// `S M S⁻¹`, with the entries conjugated for an antilinear operator.
    pub fn conjugate_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.len();
        if m.shape() != (n, n) {
            return Err(Error::Structural(format!(
                "operator acts on dimension {n}, matrix is {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let z = m[(i, j)];
                out[(self.perm[i], self.perm[j])] = match self.kind {
                    SymmetryKind::Permutation => z,
                    SymmetryKind::AntilinearPermutation => z.conj(),
                };
            }
        }
        Ok(ComplexMatrix::wrap(out))
    }

    /// `max |S M - M S|` for the linear part.
    pub fn commutator_residual(&self, m: &ComplexMatrix) -> Result<f64> {
        let linear = Self { kind: SymmetryKind::Permutation, perm: self.perm.clone() };
        Ok(max_abs_diff(linear.conjugate_matrix(m)?.as_matrix(), m.as_matrix()))
    }
}

/// Splits `H = S + iA` entrywise and returns `(max|P S P - S|, max|P A P + A|)`.
///
/// Both vanish for a `PT`-symmetric `H` with `T` the complex conjugation.
pub fn pt_structure_residual(h: &ComplexMatrix, p: &SymmetryOperator) -> Result<(f64, f64)> {
    if !h.is_square() {
        return Err(Error::Structural("pt_structure_residual needs a square matrix".into()));
    }
    if !p.is_involution() {
        return Err(Error::Structural("parity operator must be an involution".into()));
    }
    let linear = SymmetryOperator { kind: SymmetryKind::Permutation, perm: p.perm.clone() };
    let s = ComplexMatrix::wrap(h.map(|z| C64::new(z.re, 0.0)));
    let a = ComplexMatrix::wrap(h.map(|z| C64::new(z.im, 0.0)));
    let psp = linear.conjugate_matrix(&s)?;
    let pap = linear.conjugate_matrix(&a)?;
    let r_s = max_abs_diff(psp.as_matrix(), s.as_matrix());
    let r_a = max_abs_diff(pap.as_matrix(), &(-a.as_matrix()));
    Ok((r_s, r_a))
}
