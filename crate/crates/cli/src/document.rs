//! The JSON model document.
//!
//! ```json
//! {
//!   "partitions": [1, 1],
//!   "coloring": [1, -1],
//!   "diagonal": { "0": [[[0.0, 0.0]]], "1": [[[2.0, 0.0]]] },
//!   "coupling": { "0,1": [[[0.5, 0.0]]] }
//! }
//! ```
//!
//! Entries are `[re, im]`. Either `coloring` (one ±1 per partition) or
//! `signs` (`"i,j" -> ±1` for every pair `i < j`) must be given, not both.
//! Coupling blocks are the upper blocks `B_ij`; absent pairs are zero.

use std::collections::BTreeMap;
use std::fmt;

use qspectra::hamiltonian::pairs;
use qspectra::{
    validate_pattern, BlockPartition, Coloring, ComplexMatrix, PartitionedHamiltonian, Sign, SignPattern, C64,
};
use serde::{Deserialize, Serialize};

pub type Block = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub partitions: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<BTreeMap<String, i64>>,
    pub diagonal: BTreeMap<String, Block>,
    #[serde(default)]
    pub coupling: BTreeMap<String, Block>,
}

/// Which of the two sign encodings a written document uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignStyle {
    Coloring,
    Signs,
}

/// A schema violation, located by field path (or line and column for
/// syntax errors).
#[derive(Clone, Debug, PartialEq)]
pub struct DocError {
    pub location: String,
    pub message: String,
}

impl DocError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { location: format!("field `{}`", field.into()), message: message.into() }
    }
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for DocError {}

pub fn parse_document(text: &str) -> Result<ModelDocument, DocError> {
    serde_json::from_str(text).map_err(|e| DocError {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

pub fn write_document(doc: &ModelDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

fn pair_key(i: usize, j: usize) -> String {
    format!("{i},{j}")
}

fn parse_pair_key(field: &str, key: &str, n: usize) -> Result<(usize, usize), DocError> {
    let bad = || DocError::field(format!("{field}.{key}"), format!("expected a key \"i,j\" with 0 <= i < j < {n}"));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i < j && j < n {
        Ok((i, j))
    } else {
        Err(bad())
    }
}

fn sign_of(field: &str, v: i64) -> Result<Sign, DocError> {
    match v {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        other => Err(DocError::field(field, format!("expected 1 or -1, got {other}"))),
    }
}

fn block_matrix(field: &str, block: &Block, rows: usize, cols: usize) -> Result<ComplexMatrix, DocError> {
    let got_cols = block.first().map_or(0, |r| r.len());
    if block.len() != rows || block.iter().any(|r| r.len() != cols) {
        return Err(DocError::field(
            field,
            format!("expected a {rows}x{cols} block, got {}x{got_cols}", block.len()),
        ));
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| C64::new(block[i][j][0], block[i][j][1]))
        .map_err(|e| DocError::field(field, e.to_string()))
}

fn to_block(m: &ComplexMatrix) -> Block {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl ModelDocument {
    /// Validates the document and builds the model with its coloring.
    pub fn to_model(&self) -> Result<(PartitionedHamiltonian, Coloring), DocError> {
        let n = self.partitions.len();
        if n == 0 {
            return Err(DocError::field("partitions", "at least one partition is required"));
        }
        if let Some(k) = self.partitions.iter().position(|&d| d == 0) {
            return Err(DocError::field(format!("partitions[{k}]"), "dimensions must be positive"));
        }
        let partition = BlockPartition::new(self.partitions.clone()).map_err(|e| DocError::field("partitions", e.to_string()))?;

        let pattern = match (&self.coloring, &self.signs) {
            (Some(_), Some(_)) => return Err(DocError::field("coloring", "give either `coloring` or `signs`, not both")),
            (None, None) => return Err(DocError::field("coloring", "one of `coloring` or `signs` is required")),
            (Some(eps), None) => {
                if eps.len() != n {
                    return Err(DocError::field("coloring", format!("expected {n} entries, got {}", eps.len())));
                }
                let eps = eps
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| sign_of(&format!("coloring[{k}]"), v))
                    .collect::<Result<Vec<_>, _>>()?;
                SignPattern::from_coloring(&eps).map_err(|e| DocError::field("coloring", e.to_string()))?
            }
            (None, Some(map)) => {
                let mut signs = vec![None; n * (n - 1) / 2];
                for (key, &v) in map {
                    let (i, j) = parse_pair_key("signs", key, n)?;
                    signs[qspectra::hamiltonian::pair_index(i, j)] = Some(sign_of(&format!("signs.{key}"), v)?);
                }
                let mut out = Vec::with_capacity(signs.len());
                for ((i, j), s) in pairs(n).zip(signs) {
                    out.push(s.ok_or_else(|| DocError::field("signs", format!("missing pair \"{}\"", pair_key(i, j))))?);
                }
                SignPattern::new(n, out).map_err(|e| DocError::field("signs", e.to_string()))?
            }
        };
        let coloring = validate_pattern(&pattern).map_err(|e| DocError::field("signs", e.to_string()))?;

        for key in self.diagonal.keys() {
            if key.parse::<usize>().ok().is_none_or(|i| i >= n) {
                return Err(DocError::field(format!("diagonal.{key}"), format!("expected a partition index below {n}")));
            }
        }
        let mut diagonal = Vec::with_capacity(n);
        for i in 0..n {
            let field = format!("diagonal.{i}");
            let block = self.diagonal.get(&i.to_string()).ok_or_else(|| DocError::field(&field, "missing diagonal block"))?;
            let d = partition.dim(i);
            let m = block_matrix(&field, block, d, d)?;
            let residual = m.hermiticity_residual();
            if residual > 1e-12 * m.scale() {
                return Err(DocError::field(&field, format!("diagonal blocks must be Hermitian (residual {residual:e})")));
            }
            diagonal.push(m);
        }

        let mut coupling: Vec<Option<ComplexMatrix>> = vec![None; n * (n - 1) / 2];
        for (key, block) in &self.coupling {
            let (i, j) = parse_pair_key("coupling", key, n)?;
            let field = format!("coupling.{key}");
            coupling[qspectra::hamiltonian::pair_index(i, j)] = Some(block_matrix(&field, block, partition.dim(i), partition.dim(j))?);
        }
        let coupling = pairs(n)
            .zip(coupling)
            .map(|((i, j), b)| match b {
                Some(b) => Ok(b),
                None => ComplexMatrix::zeros(partition.dim(i), partition.dim(j)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| DocError::field("coupling", e.to_string()))?;

        let ph = PartitionedHamiltonian::new(partition, diagonal, coupling, pattern)
            .map_err(|e| DocError::field("partitions", e.to_string()))?;
        Ok((ph, coloring))
    }

    pub fn from_model(ph: &PartitionedHamiltonian, style: SignStyle) -> Self {
        let n = ph.n_partitions();
        let (coloring, signs) = match style {
            SignStyle::Coloring => {
                // Admissible by construction of a model; fall back to signs otherwise.
                match validate_pattern(ph.pattern()) {
                    Ok(c) => (Some(c.eps().iter().map(|s| s.value() as i64).collect()), None),
                    Err(_) => (None, Some(Self::sign_map(ph))),
                }
            }
            SignStyle::Signs => (None, Some(Self::sign_map(ph))),
        };
        let diagonal = (0..n).map(|i| (i.to_string(), to_block(ph.diagonal(i)))).collect();
        let coupling = pairs(n).map(|(i, j)| (pair_key(i, j), to_block(ph.coupling(i, j)))).collect();
        Self { partitions: ph.partition().dims().to_vec(), coloring, signs, diagonal, coupling }
    }

    fn sign_map(ph: &PartitionedHamiltonian) -> BTreeMap<String, i64> {
        pairs(ph.n_partitions()).map(|(i, j)| (pair_key(i, j), ph.pattern().get(i, j).value() as i64)).collect()
    }

    pub fn style(&self) -> SignStyle {
        if self.signs.is_some() {
            SignStyle::Signs
        } else {
            SignStyle::Coloring
        }
    }
}
