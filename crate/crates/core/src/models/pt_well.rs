//! The angular quadruple-well operator `-d²/dφ² + g / cos²(2φ)` on a
//! periodic grid, with the coordinate deformed to `φ(t) = t + i ε₀ sin 2t`.
//!
//! The quarter-period shift `R: t -> t + π/2` is an exact cyclic shift of the
//! grid. `ε₀ sin 2t` changes sign under `R`, so the deformed operator keeps
//! the antilinear symmetry `R T` while `[H, R]` no longer vanishes.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::eigen::hermitian_eigen;
use crate::error::{Error, Result};
use crate::hamiltonian::{pairs, BlockPartition, PartitionedHamiltonian, SignPattern};
use crate::matrix::{hermitize, max_abs_diff, ComplexMatrix, C64};
use crate::signpat::validate_pattern;
use crate::symmetry::SymmetryOperator;

/// Sector eigenvalues of `R`, in sector order.
pub const SECTOR_EIGENVALUES: [C64; 4] =
    [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
/// Levels kept per sector by [`four_block_model`] unless told otherwise.
pub const DEFAULT_KEEP: usize = 8;

const POLE_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    /// Potential strength.
    pub g: f64,
    /// Contour amplitude.
    pub eps0: f64,
    /// Number of grid points; a multiple of 4, at least 8.
    pub n: usize,
}

#[derive(Clone, Debug)]
pub struct PtWellModel {
    pub spec: ContourSpec,
    pub h: ComplexMatrix,
    /// Cyclic shift by `n / 4` points, `(R u)_k = u_{k + n/4}`.
    pub r: SymmetryOperator,
    /// Grid points `t_k`.
    pub grid: Vec<f64>,
}

impl PtWellModel {
    pub fn scale(&self) -> f64 {
        self.h.scale()
    }
}

/// Periodic Fourier first- and second-derivative matrices on `n` equispaced
/// points (`n` even). Entries depend on `(j - k) mod n` only.
fn fourier_derivatives(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let h = 2.0 * PI / n as f64;
    let mut d1_row = vec![0.0; n];
    let mut d2_row = vec![0.0; n];
    d2_row[0] = -PI * PI / (3.0 * h * h) - 1.0 / 6.0;
    for (d, (a, b)) in d1_row.iter_mut().zip(d2_row.iter_mut()).enumerate().skip(1) {
        let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
        let x = 0.5 * d as f64 * h;
        *a = 0.5 * sign / x.tan();
        *b = -0.5 * sign / (x.sin() * x.sin());
    }
    let d1 = DMatrix::from_fn(n, n, |j, k| d1_row[(j + n - k) % n]);
    let d2 = DMatrix::from_fn(n, n, |j, k| d2_row[(j + n - k) % n]);
    (d1, d2)
}

/// Discretizes `-(1/φ')d/dt (1/φ') d/dt + g / cos²(2φ(t))` on
/// `t_k = -π + (k + ½) 2π/n`.
///
/// The kinetic term is expanded as `-(1/φ'²) D2 + (φ''/φ'³) D1`; the
/// nested product `-(W D)²` would annihilate the Nyquist mode and add a
/// spurious zero level.
pub fn pt_well(spec: ContourSpec) -> Result<PtWellModel> {
    let ContourSpec { g, eps0, n } = spec;
    if n < 8 || n % 4 != 0 {
        return Err(Error::Argument(format!("grid size must be a multiple of 4 and at least 8, got {n}")));
    }
    if !g.is_finite() || !eps0.is_finite() {
        return Err(Error::Argument("coupling and contour amplitude must be finite".into()));
    }
    let quarter = n / 4;
    let step = 2.0 * PI / n as f64;
    let grid: Vec<f64> = (0..n).map(|k| -PI + (k as f64 + 0.5) * step).collect();
    // cos 2t and sin 2t flip sign under t -> t + π/2; filling the later
    // quarters from the first keeps that identity exact on the grid.
    let mut cos2 = vec![0.0; n];
    let mut sin2 = vec![0.0; n];
    for k in 0..quarter {
        let (s, c) = (2.0 * grid[k]).sin_cos();
        for j in 0..4 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            cos2[k + j * quarter] = sign * c;
            sin2[k + j * quarter] = sign * s;
        }
    }
    let one = C64::new(1.0, 0.0);
    let mut kinetic2 = Vec::with_capacity(n);
    let mut kinetic1 = Vec::with_capacity(n);
    let mut potential = Vec::with_capacity(n);
    for k in 0..n {
        let dphi = C64::new(1.0, 2.0 * eps0 * cos2[k]);
        let ddphi = C64::new(0.0, -4.0 * eps0 * sin2[k]);
        kinetic2.push(-(one / (dphi * dphi)));
        kinetic1.push(ddphi / (dphi * dphi * dphi));
        // cos(2t + iy) with y = 2 ε₀ sin 2t.
        let y = 2.0 * eps0 * sin2[k];
        let c = C64::new(cos2[k] * y.cosh(), -sin2[k] * y.sinh());
        if c.norm() < POLE_THRESHOLD {
            return Err(Error::PoleCollision { index: k });
        }
        potential.push(C64::new(g, 0.0) / (c * c));
    }
    let (d1, d2) = fourier_derivatives(n);
    let mut h = DMatrix::from_fn(n, n, |j, k| kinetic2[j] * d2[(j, k)] + kinetic1[j] * d1[(j, k)]);
    for k in 0..n {
        h[(k, k)] += potential[k];
    }
    Ok(PtWellModel {
        spec,
        h: ComplexMatrix::new(h)?,
        r: SymmetryOperator::cyclic_shift(n, quarter)?,
        grid,
    })
}

/// `(max|HR - RH|, max|R conj(H) R⁻¹ - H|)`.
pub fn symmetry_residuals(model: &PtWellModel) -> Result<(f64, f64)> {
    let r_comm = model.r.commutator_residual(&model.h)?;
    let rt = model.r.antilinear().conjugate_matrix(&model.h)?;
    Ok((r_comm, max_abs_diff(rt.as_matrix(), model.h.as_matrix())))
}

fn check_order_four(r: &SymmetryOperator) -> Result<()> {
    if !r.power(4).is_identity_permutation() {
        return Err(Error::Structural("symmetry operator does not satisfy R^4 = 1".into()));
    }
    Ok(())
}

/// `P_λ = ¼ Σ_j λ^{-j} R^j` for `λ = 1, i, -1, -i`.
pub fn sector_projectors(r: &SymmetryOperator) -> Result<[ComplexMatrix; 4]> {
    check_order_four(r)?;
    let n = r.len();
    let powers: Vec<SymmetryOperator> = (0..4).map(|j| r.power(j)).collect();
    let projector = |s: usize| {
        let mut p = DMatrix::zeros(n, n);
        for (j, rj) in powers.iter().enumerate() {
            // λ_s^{-j} = i^{-s j}
            let w = SECTOR_EIGENVALUES[(4 - (s * j) % 4) % 4] * 0.25;
            for (i, &pi) in rj.perm().iter().enumerate() {
                p[(pi, i)] += w;
            }
        }
        ComplexMatrix::wrap(p)
    };
    Ok([projector(0), projector(1), projector(2), projector(3)])
}

/// Orthonormal bases (as columns) of the four projector ranges.
///
/// Each orbit of the permutation contributes at most one vector per sector,
/// `P_λ e_i` normalized, taken at the smallest index `i` of the orbit.
pub fn sector_basis(r: &SymmetryOperator) -> Result<[ComplexMatrix; 4]> {
    let projectors = sector_projectors(r)?;
    let n = r.len();
    let mut representatives = Vec::new();
    let mut seen = vec![false; n];
    for i in 0..n {
        if seen[i] {
            continue;
        }
        representatives.push(i);
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = r.perm()[j];
        }
    }
    let mut out = Vec::with_capacity(4);
    for p in &projectors {
        let cols: Vec<_> = representatives
            .iter()
            .map(|&i| p.column(i).into_owned())
            .filter(|v| v.norm() > 0.5 * (0.25f64).sqrt() * 0.5)
            .map(|v| {
                let norm = v.norm();
                v.unscale(norm)
            })
            .collect();
        if cols.is_empty() {
            out.push(None);
        } else {
            out.push(Some(ComplexMatrix::wrap(DMatrix::from_columns(&cols))));
        }
    }
    let mut it = out.into_iter();
    let mut next = || {
        it.next()
            .flatten()
            .ok_or_else(|| Error::Structural("symmetry has an empty sector".into()))
    };
    Ok([next()?, next()?, next()?, next()?])
}

/// `H` expressed in the sector basis `U = [U_1 | U_i | U_-1 | U_-i]`.
#[derive(Clone, Debug)]
pub struct SectorTransform {
    pub basis: ComplexMatrix,
    pub partition: BlockPartition,
    /// `U† H U`.
    pub transformed: ComplexMatrix,
}

impl SectorTransform {
    /// `U† H U` restricted to sector `s`.
    pub fn sector_block(&self, s: usize) -> ComplexMatrix {
        ComplexMatrix::wrap(crate::hamiltonian::block(&self.transformed, &self.partition, s, s))
    }

    /// Largest entry outside the four diagonal sector blocks.
    pub fn off_sector_norm(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    let blk = crate::hamiltonian::block(&self.transformed, &self.partition, a, b);
                    worst = worst.max(crate::matrix::max_abs(&blk));
                }
            }
        }
        worst
    }
}

pub fn sector_transform(model: &PtWellModel) -> Result<SectorTransform> {
    let bases = sector_basis(&model.r)?;
    let partition = BlockPartition::new(bases.iter().map(|b| b.ncols()).collect())?;
    let cols: Vec<_> = bases.iter().flat_map(|b| b.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>()).collect();
    let u = DMatrix::from_columns(&cols);
    let transformed = u.adjoint() * model.h.as_matrix() * &u;
    Ok(SectorTransform { basis: ComplexMatrix::wrap(u), partition, transformed: ComplexMatrix::new(transformed)? })
}

/// A four-partition Hamiltonian built on the sector spectra of a Hermitian
/// quadruple well.
#[derive(Clone, Debug)]
pub struct FourBlockModel {
    pub hamiltonian: PartitionedHamiltonian,
    /// The kept levels of each sector, ascending.
    pub sector_levels: [Vec<f64>; 4],
}

/// Truncates each sector of `base` to its lowest `n_keep` levels (as a
/// diagonal block in the sector eigenbasis) and couples the four sectors.
///
/// `couplings` maps a pair `(i, j)` with `i < j` to an `n_keep x n_keep`
/// block; absent pairs are zero. Blocks enter as the upper-triangle blocks
/// `B_ij` of the partitioned Hamiltonian with `pattern`.
pub fn four_block_model(
    base: &PtWellModel,
    couplings: &BTreeMap<(usize, usize), ComplexMatrix>,
    pattern: &SignPattern,
    n_keep: usize,
) -> Result<FourBlockModel> {
    validate_pattern(pattern)?;
    if pattern.n_partitions() != 4 {
        return Err(Error::Structural(format!("four-block model needs a 4-partition pattern, got {}", pattern.n_partitions())));
    }
    let scale = base.scale();
    let herm = base.h.hermiticity_residual();
    let comm = base.r.commutator_residual(&base.h)?;
    if herm > 1e-10 * scale || comm > 1e-10 * scale {
        return Err(Error::Precondition(format!(
            "base operator must be Hermitian and commute with R (residuals {herm:e}, {comm:e})"
        )));
    }
    let sectors = sector_transform(base)?;
    if n_keep == 0 || (0..4).any(|s| sectors.partition.dim(s) < n_keep) {
        return Err(Error::Argument(format!(
            "n_keep must lie in 1..={}, got {n_keep}",
            (0..4).map(|s| sectors.partition.dim(s)).min().unwrap_or(0)
        )));
    }
    for (&(i, j), blk) in couplings {
        if i >= j || j >= 4 {
            return Err(Error::Argument(format!("coupling pair ({i}, {j}) must satisfy i < j < 4")));
        }
        if blk.shape() != (n_keep, n_keep) {
            return Err(Error::Structural(format!(
                "coupling ({i}, {j}) is {}x{}, expected {n_keep}x{n_keep}",
                blk.nrows(),
                blk.ncols()
            )));
        }
    }
    let mut diagonal = Vec::with_capacity(4);
    let mut sector_levels: [Vec<f64>; 4] = Default::default();
    for (s, levels) in sector_levels.iter_mut().enumerate() {
        let (values, _) = hermitian_eigen(&hermitize(sectors.sector_block(s).as_matrix()));
        *levels = values[..n_keep].to_vec();
        let d = DMatrix::from_fn(n_keep, n_keep, |a, b| if a == b { C64::new(levels[a], 0.0) } else { C64::new(0.0, 0.0) });
        diagonal.push(ComplexMatrix::new(d)?);
    }
    let coupling = pairs(4)
        .map(|p| couplings.get(&p).cloned().map_or_else(|| ComplexMatrix::zeros(n_keep, n_keep), Ok))
        .collect::<Result<Vec<_>>>()?;
    let hamiltonian = PartitionedHamiltonian::new(BlockPartition::new(vec![n_keep; 4])?, diagonal, coupling, pattern.clone())?;
    Ok(FourBlockModel { hamiltonian, sector_levels })
}
