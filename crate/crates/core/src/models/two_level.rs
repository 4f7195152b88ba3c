use crate::error::Result;
use crate::hamiltonian::{BlockPartition, PartitionedHamiltonian, Sign, SignPattern};
use crate::matrix::{ComplexMatrix, C64};
use crate::spectra::FamilySpec;

/// The 2x2 model `[[f, s a], [a, g]]`.
///
/// With `s = -1` the spectrum `(f + g ± sqrt((f - g)^2 - 4a^2)) / 2` is real
/// and non-degenerate iff `2|a| < |f - g|`; with `s = +1` the matrix is real
/// symmetric and the discriminant is `(f - g)^2 + 4a^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelSpec {
    pub f: f64,
    pub g: f64,
    pub a: f64,
    pub sign: Sign,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClosedForm {
    /// Lower and upper real level (equal at the exceptional point).
    Real(f64, f64),
    /// `re ± i im` with `im > 0`.
    ConjugatePair { re: f64, im: f64 },
}

impl ClosedForm {
    /// Both eigenvalues, sorted by real then imaginary part.
    pub fn values(&self) -> [C64; 2] {
        match *self {
            ClosedForm::Real(lo, hi) => [C64::new(lo, 0.0), C64::new(hi, 0.0)],
            ClosedForm::ConjugatePair { re, im } => [C64::new(re, -im), C64::new(re, im)],
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, ClosedForm::Real(..))
    }
}

pub fn two_level(spec: TwoLevelSpec) -> Result<(PartitionedHamiltonian, ClosedForm)> {
    let TwoLevelSpec { f, g, a, sign } = spec;
    let scalar = |x: f64| ComplexMatrix::from_real_rows(&[&[x]]);
    let ph = PartitionedHamiltonian::new(
        BlockPartition::unit(2)?,
        vec![scalar(f)?, scalar(g)?],
        vec![scalar(a)?],
        SignPattern::new(2, vec![sign])?,
    )?;
    let disc = (f - g).powi(2) + sign.value() * 4.0 * a * a;
    let mid = 0.5 * (f + g);
    let closed = if disc >= 0.0 {
        let half = 0.5 * disc.sqrt();
        ClosedForm::Real(mid - half, mid + half)
    } else {
        ClosedForm::ConjugatePair { re: mid, im: 0.5 * (-disc).sqrt() }
    };
    Ok((ph, closed))
}

/// Family parameterized by the coupling `a`: the unit-coupling two-level
/// model with couplings scaled by the parameter.
pub fn two_level_family(f: f64, g: f64, sign: Sign) -> Result<FamilySpec> {
    let (base, _) = two_level(TwoLevelSpec { f, g, a: 1.0, sign })?;
    Ok(FamilySpec::new(base, "a"))
}
