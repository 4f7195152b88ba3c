use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hamiltonian::{pairs, BlockPartition, PartitionedHamiltonian};
use crate::matrix::{ComplexMatrix, C64};
use crate::signpat::Coloring;

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// Random Hamiltonian obeying the pattern of `coloring`.
///
/// Diagonal blocks are `(X + X†)/2` and couplings `scale * Y`, with `X`, `Y`
/// having independent standard-normal real and imaginary parts. The stream
/// is ChaCha8 keyed by `seed`, drawn block by block in a fixed order, so the
/// same inputs always give the same model.
pub fn random_model(dims: &[usize], coloring: &Coloring, scale: f64, seed: u64) -> Result<PartitionedHamiltonian> {
    if dims.len() != coloring.len() {
        return Err(Error::Structural(format!(
            "{} partition dims for a coloring of {} partitions",
            dims.len(),
            coloring.len()
        )));
    }
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::Argument(format!("coupling scale must be finite and >= 0, got {scale}")));
    }
    let partition = BlockPartition::new(dims.to_vec())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diagonal = dims
        .iter()
        .map(|&d| ComplexMatrix::new(gaussian(&mut rng, d, d)))
        .collect::<Result<Vec<_>>>()?;
    let coupling = pairs(dims.len())
        .map(|(i, j)| ComplexMatrix::new(gaussian(&mut rng, dims[i], dims[j]) * C64::new(scale, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    PartitionedHamiltonian::new(partition, diagonal, coupling, coloring.pattern())
}
