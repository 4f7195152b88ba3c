//! Partition elimination and energy-dependent effective Hamiltonians.
//!
//! For the canonical form `[[F, -A], [A†, G]]`, eliminating the `G` space at
//! energy `rho` gives `H_eff(rho) = F + A (G - rho)^-1 A†`, Hermitian for real
//! `rho`. Exact eigenvalues `E` of the full matrix (away from the spectrum of
//! `G`) are the fixed points `rho = E_n(rho)` of its sorted eigenvalues.

use nalgebra::{DMatrix, DVector};

use crate::eigen::{hermitian_eigen, hermitian_eigenvalues, smallest_singular_value};
use crate::error::{Error, Result};
use crate::hamiltonian::{block, pairs, PartitionedHamiltonian, SignPattern};
use crate::matrix::{hermitize, ComplexMatrix, C64};
use crate::metric::{pseudo_hermiticity_residual, GradingMetric};
use crate::signpat::{validate_pattern, CanonicalForm};

/// Pole guard relative to `max(1, max |entry|)`.
pub const DEFAULT_POLE_GUARD: f64 = 1e-9;
/// Uniform samples per pole-free interval in the fixed-point search.
pub const DEFAULT_GRID: usize = 64;

/// Which sign the eliminated space feeds back with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CouplingVariant {
    /// `F + A (G - rho)^-1 A†`, from the upper-right block `-A`.
    #[default]
    Canonical,
    /// `F - A (G - rho)^-1 A†`, the Hermitian matrix `[[F, A], [A†, G]]`.
    HermitianControl,
}

impl CouplingVariant {
    /// The full matrix whose eliminated form this variant describes.
    pub fn full_matrix(self, cf: &CanonicalForm) -> ComplexMatrix {
        match self {
            CouplingVariant::Canonical => cf.matrix.clone(),
            CouplingVariant::HermitianControl => cf.hermitian_control_matrix(),
        }
    }
}

/// `H_eff(rho)` for every `rho`, with `G` diagonalized once.
///
/// Writing `G = sum_k lambda_k v_k v_k†` and `w_k = A v_k`,
/// `H_eff(rho) = F ± sum_k w_k w_k† / (lambda_k - rho)`.
#[derive(Clone, Debug)]
pub struct EffectiveFamily {
    f: DMatrix<C64>,
    weights: DMatrix<C64>,
    poles: Vec<f64>,
    removable: Vec<bool>,
    sign: f64,
    scale: f64,
    guard: f64,
}

impl EffectiveFamily {
    pub fn new(cf: &CanonicalForm, variant: CouplingVariant) -> Result<Self> {
        Self::with_guard(cf, variant, DEFAULT_POLE_GUARD)
    }

    /// `relative_guard` is multiplied by the matrix scale.
    pub fn with_guard(cf: &CanonicalForm, variant: CouplingVariant, relative_guard: f64) -> Result<Self> {
        if cf.m == 0 {
            return Err(Error::Structural("no positive partition left to keep".into()));
        }
        let scale = cf.scale();
        let f = cf.f_block().into_inner();
        let (poles, weights) = match (cf.g_block(), cf.a_block()) {
            (Some(g), Some(a)) => {
                let (lambda, v) = hermitian_eigen(g.as_matrix());
                (lambda, a.as_matrix() * v)
            }
            _ => (Vec::new(), DMatrix::zeros(cf.m, 0)),
        };
        let removable = weights
            .column_iter()
            .map(|w| w.iter().all(|z| z.norm() <= 1e-14 * scale))
            .collect();
        let sign = match variant {
            CouplingVariant::Canonical => 1.0,
            CouplingVariant::HermitianControl => -1.0,
        };
        Ok(Self { f, weights, poles, removable, sign, scale, guard: relative_guard * scale })
    }

    /// Eigenvalues of `G`, ascending.
    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    /// Poles whose residue vanishes; their energies are exact eigenvalues of
    /// the full matrix that the effective problem does not see.
    pub fn decoupled_poles(&self) -> Vec<f64> {
        self.poles.iter().zip(&self.removable).filter(|(_, &r)| r).map(|(&p, _)| p).collect()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn kept_dim(&self) -> usize {
        self.f.nrows()
    }

    /// `H_eff(rho)`; errors within the guard of any eigenvalue of `G`.
    pub fn at(&self, rho: f64) -> Result<ComplexMatrix> {
        if let Some(&pole) = self.poles.iter().find(|&&p| (p - rho).abs() <= self.guard) {
            return Err(Error::Pole { rho, pole, guard: self.guard });
        }
        Ok(ComplexMatrix::wrap(self.evaluate(rho, false)))
    }

    fn evaluate(&self, rho: f64, skip_removable: bool) -> DMatrix<C64> {
        let mut scaled = self.weights.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            let c = if skip_removable && self.removable[k] {
                0.0
            } else {
                self.sign / (self.poles[k] - rho)
            };
            col.scale_mut(c);
        }
        let h = &self.f + scaled * self.weights.adjoint();
        hermitize(&h)
    }

    /// Ascending eigenvalues `E_n(rho)`, ignoring removable poles.
    pub fn levels(&self, rho: f64) -> Vec<f64> {
        hermitian_eigenvalues(&self.evaluate(rho, true))
    }

    fn active_poles(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for (&p, &r) in self.poles.iter().zip(&self.removable) {
            if !r && out.last().is_none_or(|&last| p - last > self.guard) {
                out.push(p);
            }
        }
        out
    }
}

/// `F + A (G - rho)^-1 A†` (or the Hermitian-control sign), `F` when `n = 0`.
pub fn effective_hamiltonian(cf: &CanonicalForm, rho: f64, variant: CouplingVariant) -> Result<ComplexMatrix> {
    EffectiveFamily::new(cf, variant)?.at(rho)
}

/// Eliminates partition `idx` at energy `rho`.
///
/// The remaining blocks become `H_ij - H_i,idx (H_idx,idx - rho)^-1 H_idx,j`
/// computed on the signed blocks. The result keeps the sign pattern of the
/// remaining partitions, so it is again pseudo-Hermitian for their coloring.
pub fn eliminate_partition(ph: &PartitionedHamiltonian, rho: f64, idx: usize) -> Result<PartitionedHamiltonian> {
    validate_pattern(ph.pattern())?;
    let n = ph.n_partitions();
    if n < 2 {
        return Err(Error::Structural("cannot eliminate the only partition".into()));
    }
    if idx >= n {
        return Err(Error::Argument(format!("partition index {idx} out of range for {n} partitions")));
    }
    let full = ph.assemble();
    let p = ph.partition();
    let guard = DEFAULT_POLE_GUARD * full.scale();
    let (lambda, v) = hermitian_eigen(ph.diagonal(idx).as_matrix());
    if let Some(&pole) = lambda.iter().find(|&&l| (l - rho).abs() <= guard) {
        return Err(Error::Pole { rho, pole, guard });
    }
    let inv = DVector::from_iterator(lambda.len(), lambda.iter().map(|l| C64::new(1.0 / (l - rho), 0.0)));
    let resolvent = &v * DMatrix::from_diagonal(&inv) * v.adjoint();

    let kept: Vec<usize> = (0..n).filter(|&i| i != idx).collect();
    let reduced = |a: usize, b: usize| -> DMatrix<C64> {
        block(&full, p, a, b) - block(&full, p, a, idx) * &resolvent * block(&full, p, idx, b)
    };
    let diagonal = kept
        .iter()
        .map(|&a| ComplexMatrix::new(hermitize(&reduced(a, a))))
        .collect::<Result<Vec<_>>>()?;
    let mut coupling = Vec::new();
    let mut signs = Vec::new();
    for (a, b) in pairs(kept.len()) {
        let (ia, ib) = (kept[a], kept[b]);
        let s = ph.pattern().get(ia, ib);
        coupling.push(ComplexMatrix::new(reduced(ia, ib) * C64::new(s.value(), 0.0))?);
        signs.push(s);
    }
    let partition = crate::hamiltonian::BlockPartition::new(kept.iter().map(|&i| p.dim(i)).collect())?;
    PartitionedHamiltonian::new(partition, diagonal, coupling, SignPattern::new(kept.len(), signs)?)
}

#[derive(Clone, Debug)]
pub struct SelfConsistentOptions {
    /// Bound on both the final bracket width and `|E_n(rho) - rho|`.
    pub tol: f64,
    pub max_iter: usize,
    pub grid: usize,
    /// Relative to the matrix scale.
    pub pole_guard: f64,
    pub variant: CouplingVariant,
}

impl Default for SelfConsistentOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            grid: DEFAULT_GRID,
            pole_guard: DEFAULT_POLE_GUARD,
            variant: CouplingVariant::Canonical,
        }
    }
}

/// One converged fixed point `rho* = E_level(rho*)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfConsistentResult {
    pub level: usize,
    pub energy: f64,
    pub iterations: usize,
    pub residual: f64,
    pub bracket: (f64, f64),
}

/// All fixed points found for one level.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointSet {
    pub level: usize,
    /// Sorted by energy; empty when no sign change was found.
    pub roots: Vec<SelfConsistentResult>,
    /// Eigenvalues of `G` with vanishing coupling: exact energies of the full
    /// problem that are invisible to the effective one.
    pub decoupled_poles: Vec<f64>,
}

struct Solver<'a> {
    family: &'a EffectiveFamily,
    opts: &'a SelfConsistentOptions,
}

impl Solver<'_> {
    fn residual(&self, level: usize, rho: f64) -> f64 {
        self.family.levels(rho)[level] - rho
    }

    /// Sample points: the search window split at the poles, each piece
    /// covered uniformly plus geometrically toward pole endpoints.
    fn samples(&self, bound: f64) -> Vec<f64> {
        let guard = self.family.guard;
        let mut edges = vec![(-bound, false)];
        edges.extend(self.family.active_poles().into_iter().map(|p| (p, true)));
        edges.push((bound, false));
        let mut out = Vec::new();
        for w in edges.windows(2) {
            let ((a, a_pole), (b, b_pole)) = (w[0], w[1]);
            let width = b - a;
            if width <= 2.0 * guard {
                continue;
            }
            if !a_pole {
                out.push(a);
            }
            if !b_pole {
                out.push(b);
            }
            for k in 1..self.opts.grid {
                out.push(a + width * k as f64 / self.opts.grid as f64);
            }
            let mut delta = 0.5 * width / self.opts.grid as f64;
            while delta > 10.0 * guard {
                if a_pole {
                    out.push(a + delta);
                }
                if b_pole {
                    out.push(b - delta);
                }
                delta *= 0.1;
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn bisect(&self, level: usize, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<SelfConsistentResult> {
        let tol = self.opts.tol;
        for it in 1..=self.opts.max_iter {
            let mid = 0.5 * (lo + hi);
            let f_mid = self.residual(level, mid);
            let width = hi - lo;
            let done = f_mid == 0.0 || (width <= tol && f_mid.abs() <= tol);
            if done {
                return Ok(SelfConsistentResult { level, energy: mid, iterations: it, residual: f_mid.abs(), bracket: (lo, hi) });
            }
            if mid <= lo || mid >= hi {
                return Err(Error::Convergence { iterations: it, lo, hi });
            }
            if (f_mid > 0.0) == (f_lo > 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::Convergence { iterations: self.opts.max_iter, lo, hi })
    }

    fn solve(&self, levels: &[usize], bound: f64) -> Result<Vec<Vec<SelfConsistentResult>>> {
        let xs = self.samples(bound);
        let table: Vec<Vec<f64>> = xs.iter().map(|&x| self.family.levels(x)).collect();
        let mut out = Vec::with_capacity(levels.len());
        for &level in levels {
            let fs: Vec<f64> = xs.iter().zip(&table).map(|(&x, ev)| ev[level] - x).collect();
            let mut roots = Vec::new();
            for k in 0..xs.len() {
                if fs[k] == 0.0 {
                    roots.push(SelfConsistentResult {
                        level,
                        energy: xs[k],
                        iterations: 1,
                        residual: 0.0,
                        bracket: (xs[k], xs[k]),
                    });
                    continue;
                }
                if k + 1 < xs.len() && fs[k + 1] != 0.0 && (fs[k] > 0.0) != (fs[k + 1] > 0.0) {
                    // Adjacent samples on both sides of a pole are not a bracket.
                    let straddles_pole =
                        self.family.active_poles().iter().any(|&p| xs[k] < p && p < xs[k + 1]);
                    if !straddles_pole {
                        roots.push(self.bisect(level, xs[k], xs[k + 1], fs[k])?);
                    }
                }
            }
            out.push(roots);
        }
        Ok(out)
    }
}

fn check_options(cf: &CanonicalForm, opts: &SelfConsistentOptions) -> Result<()> {
    if cf.m == 0 {
        return Err(Error::Argument("self-consistency needs a kept (+) space, m = 0".into()));
    }
    if !(opts.tol > 0.0) || opts.grid < 2 || opts.max_iter == 0 {
        return Err(Error::Argument("tol must be > 0, grid >= 2, max_iter >= 1".into()));
    }
    Ok(())
}

fn search_bound(cf: &CanonicalForm, variant: CouplingVariant) -> f64 {
    let m = variant.full_matrix(cf);
    let row_sum = m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    row_sum + 1.0
}

/// Fixed points of every level `0..m`.
///
/// Solutions are searched within the Gershgorin bound of the full matrix,
/// which encloses every real eigenvalue.
pub fn selfconsistent_all(cf: &CanonicalForm, opts: &SelfConsistentOptions) -> Result<Vec<FixedPointSet>> {
    check_options(cf, opts)?;
    let family = EffectiveFamily::with_guard(cf, opts.variant, opts.pole_guard)?;
    let decoupled = family.decoupled_poles();
    let levels: Vec<usize> = (0..cf.m).collect();
    let roots = if family.active_poles().is_empty() {
        // H_eff does not depend on rho: its eigenvalues are the fixed points.
        let ev = family.levels(0.0);
        levels
            .iter()
            .map(|&l| vec![SelfConsistentResult { level: l, energy: ev[l], iterations: 1, residual: 0.0, bracket: (ev[l], ev[l]) }])
            .collect()
    } else {
        Solver { family: &family, opts }.solve(&levels, search_bound(cf, opts.variant))?
    };
    Ok(levels
        .into_iter()
        .zip(roots)
        .map(|(level, roots)| FixedPointSet { level, roots, decoupled_poles: decoupled.clone() })
        .collect())
}

/// Fixed points of one level.
pub fn selfconsistent_energies(cf: &CanonicalForm, level: usize, opts: &SelfConsistentOptions) -> Result<FixedPointSet> {
    check_options(cf, opts)?;
    if level >= cf.m {
        return Err(Error::Argument(format!("level {level} out of range for m = {}", cf.m)));
    }
    let family = EffectiveFamily::with_guard(cf, opts.variant, opts.pole_guard)?;
    let decoupled_poles = family.decoupled_poles();
    let roots = if family.active_poles().is_empty() {
        let e = family.levels(0.0)[level];
        vec![SelfConsistentResult { level, energy: e, iterations: 1, residual: 0.0, bracket: (e, e) }]
    } else {
        Solver { family: &family, opts }
            .solve(&[level], search_bound(cf, opts.variant))?
            .pop()
            .unwrap_or_default()
    };
    Ok(FixedPointSet { level, roots, decoupled_poles })
}

/// The fixed point of `level` closest to the uncoupled level, the
/// `level`-th eigenvalue of `F`. `None` when the level has no fixed point.
pub fn selfconsistent_energy(
    cf: &CanonicalForm,
    level: usize,
    opts: &SelfConsistentOptions,
) -> Result<Option<SelfConsistentResult>> {
    let set = selfconsistent_energies(cf, level, opts)?;
    let anchor = hermitian_eigenvalues(cf.f_block().as_matrix())[level];
    Ok(set
        .roots
        .into_iter()
        .min_by(|a, b| (a.energy - anchor).abs().total_cmp(&(b.energy - anchor).abs())))
}

/// `max |(M^-1)‡ - M^-1|`: the inverse of a pseudo-Hermitian matrix is
/// pseudo-Hermitian for the same metric.
pub fn inverse_structure_residual(m: &ComplexMatrix, q: &GradingMetric) -> Result<f64> {
    if !m.is_square() || m.nrows() != q.len() {
        return Err(Error::Structural(format!(
            "matrix is {}x{}, metric has dimension {}",
            m.nrows(),
            m.ncols(),
            q.len()
        )));
    }
    let sigma_min = smallest_singular_value(m.as_matrix());
    if sigma_min <= 1e-12 * m.scale() {
        return Err(Error::Conditioning { sigma_min });
    }
    let inv = m.as_matrix().clone().lu().try_inverse().ok_or(Error::Conditioning { sigma_min })?;
    let inv = ComplexMatrix::new(inv).map_err(|_| Error::Conditioning { sigma_min })?;
    pseudo_hermiticity_residual(&inv, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Sign;
    use crate::models::{random_model, two_level, TwoLevelSpec};
    use crate::signpat::{canonicalize, Coloring};

    fn two_level_cf(f: f64, g: f64, a: f64) -> CanonicalForm {
        let (ph, _) = two_level(TwoLevelSpec { f, g, a, sign: Sign::Minus }).unwrap();
        canonicalize(&ph).unwrap()
    }

    #[test]
    fn two_level_effective_values() {
        let cf = two_level_cf(0.0, 2.0, 0.5);
        let h = effective_hamiltonian(&cf, 1.0, CouplingVariant::Canonical).unwrap();
        assert!((h[(0, 0)] - C64::new(0.25, 0.0)).norm() < 1e-15);
        let h = effective_hamiltonian(&cf, 1.0, CouplingVariant::HermitianControl).unwrap();
        assert!((h[(0, 0)] - C64::new(-0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pole_is_rejected() {
        let cf = two_level_cf(0.0, 2.0, 0.5);
        assert!(matches!(
            effective_hamiltonian(&cf, 2.0, CouplingVariant::Canonical),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn no_eliminated_space_returns_f() {
        let ph = random_model(&[2, 2], &Coloring::all_plus(2).unwrap(), 1.0, 4).unwrap();
        let cf = canonicalize(&ph).unwrap();
        let h = effective_hamiltonian(&cf, 0.3, CouplingVariant::Canonical).unwrap();
        assert_eq!(h, cf.f_block());
    }

    #[test]
    fn random_effective_hamiltonian_is_hermitian() {
        let c = Coloring::new(vec![Sign::Plus, Sign::Minus, Sign::Plus, Sign::Minus]).unwrap();
        for seed in 0..10 {
            let cf = canonicalize(&random_model(&[2, 3, 1, 2], &c, 1.0, seed).unwrap()).unwrap();
            let h = effective_hamiltonian(&cf, 0.123, CouplingVariant::Canonical).unwrap();
            assert!(h.hermiticity_residual() < 1e-12 * cf.scale());
        }
    }

    #[test]
    fn eliminating_the_last_of_two_matches_effective_hamiltonian() {
        let c = Coloring::new(vec![Sign::Plus, Sign::Minus]).unwrap();
        let ph = random_model(&[3, 2], &c, 0.8, 21).unwrap();
        let cf = canonicalize(&ph).unwrap();
        let rho = -0.37;
        let reduced = eliminate_partition(&ph, rho, 1).unwrap();
        let direct = effective_hamiltonian(&cf, rho, CouplingVariant::Canonical).unwrap();
        let diff = crate::matrix::max_abs_diff(reduced.assemble().as_matrix(), direct.as_matrix());
        assert!(diff < 1e-12 * cf.scale(), "{diff}");
    }

    #[test]
    fn three_unit_blocks_reduce_like_direct_schur_complement() {
        let pattern: SignPattern = "+,-,-".parse().unwrap();
        let c = validate_pattern(&pattern).unwrap();
        let ph = random_model(&[1, 1, 1], &c, 1.0, 8).unwrap();
        let rho = 0.41;
        let reduced = eliminate_partition(&ph, rho, 2).unwrap();
        assert_eq!(reduced.pattern().to_string(), "+");
        // Direct Schur complement of the assembled 3x3 matrix.
        let m = ph.assemble();
        let z = m[(2, 2)] - C64::new(rho, 0.0);
        let expected = DMatrix::from_fn(2, 2, |i, j| m[(i, j)] - m[(i, 2)] * m[(2, j)] / z);
        let diff = crate::matrix::max_abs_diff(reduced.assemble().as_matrix(), &expected);
        assert!(diff < 1e-13, "{diff}");
    }

    #[test]
    fn decoupled_partition_elimination_leaves_blocks() {
        let c = Coloring::new(vec![Sign::Plus, Sign::Plus, Sign::Minus]).unwrap();
        let ph = random_model(&[2, 1, 2], &c, 1.0, 2).unwrap();
        // Zero out every coupling that touches partition 2.
        let mut coupling = ph.coupling_blocks().to_vec();
        coupling[1] = ComplexMatrix::zeros(2, 2).unwrap();
        coupling[2] = ComplexMatrix::zeros(1, 2).unwrap();
        let ph = PartitionedHamiltonian::new(ph.partition().clone(), ph.diagonal_blocks().to_vec(), coupling, ph.pattern().clone()).unwrap();
        let reduced = eliminate_partition(&ph, 0.5, 2).unwrap();
        assert_eq!(reduced.diagonal(0), ph.diagonal(0));
        assert_eq!(reduced.diagonal(1), ph.diagonal(1));
        assert_eq!(reduced.coupling(0, 1), ph.coupling(0, 1));
    }

    #[test]
    fn elimination_result_is_pseudo_hermitian_and_order_independent() {
        let c = Coloring::new(vec![Sign::Plus, Sign::Minus, Sign::Plus, Sign::Minus]).unwrap();
        for seed in 0..10 {
            let ph = random_model(&[2, 1, 2, 2], &c, 0.7, seed).unwrap();
            let rho = 9.5; // outside the spectra of the diagonal blocks
            let a = eliminate_partition(&eliminate_partition(&ph, rho, 3).unwrap(), rho, 1).unwrap();
            let b = eliminate_partition(&eliminate_partition(&ph, rho, 1).unwrap(), rho, 2).unwrap();
            let diff = crate::matrix::max_abs_diff(a.assemble().as_matrix(), b.assemble().as_matrix());
            assert!(diff < 1e-10 * ph.assemble().scale(), "seed {seed}: {diff}");
            let q = validate_pattern(a.pattern()).unwrap().metric(a.partition()).unwrap();
            assert_eq!(pseudo_hermiticity_residual(&a.assemble(), &q).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_level_fixed_points() {
        let cf = two_level_cf(0.0, 2.0, 0.5);
        let set = selfconsistent_energies(&cf, 0, &SelfConsistentOptions::default()).unwrap();
        let r = 0.75f64.sqrt();
        let got: Vec<f64> = set.roots.iter().map(|s| s.energy).collect();
        assert_eq!(got.len(), 2, "{got:?}");
        assert!((got[0] - (1.0 - r)).abs() < 1e-11);
        assert!((got[1] - (1.0 + r)).abs() < 1e-11);
        for s in &set.roots {
            assert!(s.residual <= 1e-12);
        }

        let opts = SelfConsistentOptions { variant: CouplingVariant::HermitianControl, ..Default::default() };
        let set = selfconsistent_energies(&cf, 0, &opts).unwrap();
        let r = 1.25f64.sqrt();
        let got: Vec<f64> = set.roots.iter().map(|s| s.energy).collect();
        assert_eq!(got.len(), 2, "{got:?}");
        assert!((got[0] - (1.0 - r)).abs() < 1e-11);
        assert!((got[1] - (1.0 + r)).abs() < 1e-11);
    }

    #[test]
    fn primary_root_is_nearest_uncoupled_level() {
        let cf = two_level_cf(0.0, 2.0, 0.5);
        let root = selfconsistent_energy(&cf, 0, &SelfConsistentOptions::default()).unwrap().unwrap();
        assert!((root.energy - (1.0 - 0.75f64.sqrt())).abs() < 1e-11);
    }

    #[test]
    fn decoupled_two_level_is_exact() {
        let cf = two_level_cf(0.3, 2.0, 0.0);
        let set = selfconsistent_energies(&cf, 0, &SelfConsistentOptions::default()).unwrap();
        assert_eq!(set.roots.len(), 1);
        assert_eq!(set.roots[0].energy, 0.3);
        assert_eq!(set.roots[0].iterations, 1);
        assert_eq!(set.decoupled_poles, vec![2.0]);
    }

    #[test]
    fn complex_pair_has_no_fixed_point() {
        let cf = two_level_cf(0.0, 2.0, 1.5);
        let set = selfconsistent_energies(&cf, 0, &SelfConsistentOptions::default()).unwrap();
        assert!(set.roots.is_empty());
    }

    #[test]
    fn bad_level_or_tolerance() {
        let cf = two_level_cf(0.0, 2.0, 0.5);
        assert!(selfconsistent_energies(&cf, 1, &SelfConsistentOptions::default()).is_err());
        let opts = SelfConsistentOptions { tol: 0.0, ..Default::default() };
        assert!(selfconsistent_energies(&cf, 0, &opts).is_err());
    }

    #[test]
    fn inverse_keeps_structure() {
        let a = 0.8;
        let m = ComplexMatrix::from_real_rows(&[&[1.0, -a], &[a, 1.0]]).unwrap();
        let q = GradingMetric::canonical(1, 1).unwrap();
        assert!(inverse_structure_residual(&m, &q).unwrap() <= 1e-15);
        let inv = m.as_matrix().clone().try_inverse().unwrap();
        let k = 1.0 / (1.0 + a * a);
        assert!((inv[(0, 1)] - C64::new(a * k, 0.0)).norm() < 1e-15);
        assert!((inv[(1, 0)] - C64::new(-a * k, 0.0)).norm() < 1e-15);

        let h = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i + j) as f64 + if i == j { 4.0 } else { 0.0 }, i as f64 - j as f64)).unwrap();
        assert!(inverse_structure_residual(&h, &GradingMetric::identity(3).unwrap()).unwrap() < 1e-12);

        let singular = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert!(matches!(
            inverse_structure_residual(&singular, &GradingMetric::identity(2).unwrap()),
            Err(Error::Conditioning { .. })
        ));
    }
}
