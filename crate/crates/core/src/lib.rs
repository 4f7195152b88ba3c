//! Numerics for block-partitioned Hamiltonians that are pseudo-Hermitian
//! with respect to a diagonal ±1 metric `Q`, i.e. `H = Q H† Q`.
//!
//! The crate covers the sign-pattern algebra of such block structures, the
//! reordering to the two-block form `[[F, -A], [A†, G]]`, energy-dependent
//! effective (Feshbach) Hamiltonians and their self-consistent energies,
//! spectral reality analysis with indefinite pseudo-norms, and a few model
//! generators, among them a complex-contour quadruple-well operator.

pub mod eigen;
pub mod error;
pub mod feshbach;
pub mod hamiltonian;
pub mod matrix;
pub mod metric;
pub mod models;
pub mod signpat;
pub mod spectra;
pub mod symmetry;

pub use error::{Error, Result};
pub use hamiltonian::{BlockPartition, PartitionedHamiltonian, Sign, SignPattern};
pub use matrix::{ComplexMatrix, C64};
pub use metric::{ddagger, pseudo_hermiticity_residual, qform, FormMode, GradingMetric};
pub use signpat::{canonicalize, enumerate_patterns, minus_counts, validate_pattern};
pub use signpat::{CanonicalForm, Coloring, MinusCounts};
pub use symmetry::{pt_structure_residual, SymmetryKind, SymmetryOperator};
