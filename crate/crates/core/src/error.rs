use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes, lengths or index sets that do not fit together.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// The triangle rule `s_ij s_jk = s_ik` fails on partitions `(i, j, k)`.
    #[error("sign pattern is not a two-coloring: triangle ({i}, {j}, {k}) has an odd number of minus signs")]
    InvalidPattern { i: usize, j: usize, k: usize },

    #[error("energy {rho} lies within {guard:e} of the pole {pole}")]
    Pole { rho: f64, pole: f64, guard: f64 },

    #[error("matrix is numerically singular (smallest singular value {sigma_min:e})")]
    Conditioning { sigma_min: f64 },

    #[error("bisection did not converge after {iterations} iterations; best bracket [{lo}, {hi}]")]
    Convergence { iterations: usize, lo: f64, hi: f64 },

    #[error("QR iteration did not converge after {0} sweeps")]
    EigenNonConvergence(usize),

    #[error("contour passes within 1e-12 of a potential pole at grid point {index}")]
    PoleCollision { index: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("at parameter value {value}: {source}")]
    AtParameter { value: f64, source: Box<Error> },
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        if let Error::AtParameter { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::Pole { .. }
                | Error::Conditioning { .. }
                | Error::Convergence { .. }
                | Error::EigenNonConvergence(_)
                | Error::PoleCollision { .. }
        )
    }
}
