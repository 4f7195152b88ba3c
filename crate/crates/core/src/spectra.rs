//! Spectral reality: classification, pseudo-norms, left eigenvectors,
//! coupling scans and exceptional points.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::eigen::eig;
use crate::error::{Error, Result};
use crate::hamiltonian::PartitionedHamiltonian;
use crate::matrix::{ComplexMatrix, C64};
use crate::metric::{pseudo_hermiticity_residual, qform, FormMode, GradingMetric};

/// Reality tolerance relative to `max(1, max |entry|)`.
pub const DEFAULT_REALITY_TOL: f64 = 1e-8;
/// Points of the monotonicity pre-scan in [`exceptional_point`].
pub const PRESCAN_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralClass {
    Real,
    /// Member of a conjugate pair; `partner` indexes the other member.
    Pair { partner: usize },
    Unpaired,
}

impl SpectralClass {
    pub fn label(&self) -> &'static str {
        match self {
            SpectralClass::Real => "real",
            SpectralClass::Pair { .. } => "pair",
            SpectralClass::Unpaired => "unpaired",
        }
    }
}

/// Tags each eigenvalue. `abs_tol` is an absolute bound on `|Im|` and on the
/// distance between a value and the conjugate of its partner.
///
/// Pairing is greedy in index order: each unmatched complex value takes the
/// nearest unmatched candidate, the lowest index winning ties.
pub fn classify(eigenvalues: &[C64], abs_tol: f64) -> Vec<SpectralClass> {
    let n = eigenvalues.len();
    let mut out: Vec<Option<SpectralClass>> = eigenvalues
        .iter()
        .map(|z| (z.im.abs() <= abs_tol).then_some(SpectralClass::Real))
        .collect();
    for i in 0..n {
        if out[i].is_some() {
            continue;
        }
        let target = eigenvalues[i].conj();
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if j == i || out[j].is_some() {
                continue;
            }
            let d = (eigenvalues[j] - target).norm();
            if d <= abs_tol && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, _)) => {
                out[i] = Some(SpectralClass::Pair { partner: j });
                out[j] = Some(SpectralClass::Pair { partner: i });
            }
            None => out[i] = Some(SpectralClass::Unpaired),
        }
    }
    out.into_iter().map(|c| c.expect("every index is tagged")).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub real: usize,
    /// Number of pairs, not members.
    pub pairs: usize,
    pub unpaired: usize,
}

impl ClassCounts {
    pub fn of(classes: &[SpectralClass]) -> Self {
        let mut c = ClassCounts::default();
        for class in classes {
            match class {
                SpectralClass::Real => c.real += 1,
                SpectralClass::Pair { .. } => c.pairs += 1,
                SpectralClass::Unpaired => c.unpaired += 1,
            }
        }
        c.pairs /= 2;
        c
    }
}

/// Output of [`analyze`]; per-eigenvalue vectors share the eigenvalue order.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors as columns.
    pub right_vectors: DMatrix<C64>,
    pub classes: Vec<SpectralClass>,
    /// Sesquilinear `<v|Q|v>` of each unit right vector.
    pub qforms: Vec<C64>,
    /// Bilinear `v^T Q v`.
    pub bilinear_qforms: Vec<C64>,
    /// `±1` when the form is above tolerance, otherwise the raw real part.
    pub pseudo_norms: Vec<f64>,
    pub self_orthogonal: Vec<bool>,
    /// `||l M - E l|| / ||l||` with `l = (Q v)†`; only for real eigenvalues.
    pub left_residuals: Vec<Option<f64>>,
    /// Indices of the real eigenvalues, in order.
    pub real_indices: Vec<usize>,
    /// `gram[(a, b)] = <v_ra|Q|v_rb>` over `real_indices`.
    pub gram: DMatrix<C64>,
    pub scale: f64,
}

impl SpectrumReport {
    pub fn counts(&self) -> ClassCounts {
        ClassCounts::of(&self.classes)
    }

    pub fn all_real(&self) -> bool {
        self.classes.iter().all(|c| *c == SpectralClass::Real)
    }
}

/// Eigendecomposition plus the indefinite-metric bookkeeping.
///
/// `tol` is relative: eigenvalues with `|Im| <= tol * scale` count as real,
/// the matrix must be pseudo-Hermitian within `tol * scale`, and a unit
/// vector with `|<v|Q|v>| <= tol` is flagged self-orthogonal.
pub fn analyze(m: &ComplexMatrix, q: &GradingMetric, tol: f64) -> Result<SpectrumReport> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let scale = m.scale();
    let residual = pseudo_hermiticity_residual(m, q)?;
    if residual > tol * scale {
        return Err(Error::Precondition(format!(
            "matrix is not pseudo-Hermitian for the metric (residual {residual:e})"
        )));
    }
    let dec = eig(m)?;
    let n = dec.values.len();
    let classes = classify(&dec.values, tol * scale);
    let vectors: Vec<DVector<C64>> = (0..n).map(|k| dec.vector(k)).collect();
    let mut qforms = Vec::with_capacity(n);
    let mut bilinear_qforms = Vec::with_capacity(n);
    let mut pseudo_norms = Vec::with_capacity(n);
    let mut self_orthogonal = Vec::with_capacity(n);
    let mut left_residuals = Vec::with_capacity(n);
    for (k, v) in vectors.iter().enumerate() {
        let s = qform(v, v, q, FormMode::Sesquilinear)?;
        qforms.push(s);
        bilinear_qforms.push(qform(v, v, q, FormMode::Bilinear)?);
        let flagged = s.norm() <= tol;
        self_orthogonal.push(flagged);
        pseudo_norms.push(if flagged { s.re } else { s.re.signum() });
        left_residuals.push(if classes[k] == SpectralClass::Real {
            Some(left_residual(m, q, v, dec.values[k].re))
        } else {
            None
        });
    }
    let real_indices: Vec<usize> = (0..n).filter(|&k| classes[k] == SpectralClass::Real).collect();
    let r = real_indices.len();
    let mut gram = DMatrix::zeros(r, r);
    for (a, &i) in real_indices.iter().enumerate() {
        for (b, &j) in real_indices.iter().enumerate() {
            gram[(a, b)] = qform(&vectors[i], &vectors[j], q, FormMode::Sesquilinear)?;
        }
    }
    Ok(SpectrumReport {
        eigenvalues: dec.values,
        right_vectors: dec.vectors,
        classes,
        qforms,
        bilinear_qforms,
        pseudo_norms,
        self_orthogonal,
        left_residuals,
        real_indices,
        gram,
        scale,
    })
}

fn left_residual(m: &ComplexMatrix, q: &GradingMetric, v: &DVector<C64>, e: f64) -> f64 {
    let left = q.apply(v).adjoint();
    let r = &left * m.as_matrix() - &left * C64::new(e, 0.0);
    r.norm() / left.norm()
}

/// A one-parameter family: the couplings of `base` scaled by the parameter.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub base: PartitionedHamiltonian,
    pub parameter: String,
}

impl FamilySpec {
    pub fn new(base: PartitionedHamiltonian, parameter: impl Into<String>) -> Self {
        Self { base, parameter: parameter.into() }
    }

    pub fn at(&self, t: f64) -> Result<PartitionedHamiltonian> {
        self.base.with_scaled_couplings(t)
    }

    pub fn matrix_at(&self, t: f64) -> Result<ComplexMatrix> {
        Ok(self.at(t)?.assemble())
    }

    /// The same couplings with every sign flipped to `+`: a Hermitian family.
    pub fn hermitian_control(&self) -> Result<FamilySpec> {
        let pattern = crate::signpat::Coloring::all_plus(self.base.n_partitions())?.pattern();
        Ok(FamilySpec { base: self.base.with_pattern(pattern)?, parameter: self.parameter.clone() })
    }
}

/// One grid point of a [`reality_scan`].
#[derive(Clone, Debug)]
pub struct ScanPoint {
    pub parameter: f64,
    pub eigenvalues: Vec<C64>,
    pub classes: Vec<SpectralClass>,
    pub counts: ClassCounts,
}

/// Eigenvalues and classes of `M` with the relative reality tolerance.
pub fn classified_spectrum(m: &ComplexMatrix, tol: f64) -> Result<(Vec<C64>, Vec<SpectralClass>)> {
    let values = eig(m)?.values;
    let classes = classify(&values, tol * m.scale());
    Ok((values, classes))
}

fn at_parameter<T>(value: f64, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::AtParameter { value, source: Box::new(e) })
}

/// Uniform inclusive grid `from..=to` with `steps` points, evaluated in
/// parallel and returned in parameter order. `tol` is relative.
pub fn reality_scan(fam: &FamilySpec, from: f64, to: f64, steps: usize, tol: f64) -> Result<Vec<ScanPoint>> {
    if !(from < to) || steps < 2 {
        return Err(Error::Argument(format!("scan needs from < to and steps >= 2, got [{from}, {to}] with {steps}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let grid: Vec<f64> = (0..steps)
        .map(|k| if k + 1 == steps { to } else { from + (to - from) * k as f64 / (steps - 1) as f64 })
        .collect();
    grid.into_par_iter()
        .map(|t| {
            let (eigenvalues, classes) = at_parameter(t, fam.matrix_at(t).and_then(|m| classified_spectrum(&m, tol)))?;
            let counts = ClassCounts::of(&classes);
            Ok(ScanPoint { parameter: t, eigenvalues, classes, counts })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExceptionalPoint {
    pub value: f64,
    pub bracket: (f64, f64),
    /// The pre-scan saw more than one change of the reality predicate.
    pub non_monotone: bool,
}

fn all_real(fam: &FamilySpec, t: f64, reality_tol: f64) -> Result<bool> {
    at_parameter(t, fam.matrix_at(t).and_then(|m| classified_spectrum(&m, reality_tol)))
        .map(|(_, classes)| classes.iter().all(|c| *c == SpectralClass::Real))
}

/// Bisection on "all eigenvalues real" with the default reality tolerance.
pub fn exceptional_point(fam: &FamilySpec, lo: f64, hi: f64, tol: f64) -> Result<ExceptionalPoint> {
    exceptional_point_with(fam, lo, hi, tol, DEFAULT_REALITY_TOL)
}

/// Locates the parameter where the spectrum stops being real.
///
/// Requires an all-real spectrum at `lo` and a complex one at `hi`. A
/// 16-point pre-scan checks that the predicate changes once; otherwise a
/// warning is logged and the first real-to-complex crossing is refined.
pub fn exceptional_point_with(
    fam: &FamilySpec,
    lo: f64,
    hi: f64,
    tol: f64,
    reality_tol: f64,
) -> Result<ExceptionalPoint> {
    if !(lo < hi) || !(tol > 0.0) || !(reality_tol > 0.0) {
        return Err(Error::Argument(format!("need lo < hi and positive tolerances, got [{lo}, {hi}], tol {tol}")));
    }
    if !all_real(fam, lo, reality_tol)? {
        return Err(Error::Precondition(format!("not all real at lo = {lo}")));
    }
    if all_real(fam, hi, reality_tol)? {
        return Err(Error::Precondition(format!("all real at hi = {hi}")));
    }
    let grid: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|k| if k + 1 == PRESCAN_POINTS { hi } else { lo + (hi - lo) * k as f64 / (PRESCAN_POINTS - 1) as f64 })
        .collect();
    let flags = grid
        .par_iter()
        .map(|&t| all_real(fam, t, reality_tol))
        .collect::<Result<Vec<bool>>>()?;
    let changes = flags.windows(2).filter(|w| w[0] != w[1]).count();
    let non_monotone = changes > 1;
    let first = flags.windows(2).position(|w| w[0] && !w[1]).expect("endpoints differ");
    if non_monotone {
        log::warn!(
            "reality predicate changes {changes} times on [{lo}, {hi}]; refining the first crossing [{}, {}]",
            grid[first],
            grid[first + 1]
        );
    }
    let (mut a, mut b) = (grid[first], grid[first + 1]);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if all_real(fam, mid, reality_tol)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(ExceptionalPoint { value: 0.5 * (a + b), bracket: (a, b), non_monotone })
}
