//! Model generators: the analytic two-level model, seeded random
//! pseudo-Hermitian ensembles and the complex-contour quadruple well.

mod pt_well;
mod random;
mod two_level;

pub use pt_well::{
    four_block_model, pt_well, sector_basis, sector_projectors, sector_transform, symmetry_residuals,
    ContourSpec, FourBlockModel, PtWellModel, SectorTransform, DEFAULT_KEEP, SECTOR_EIGENVALUES,
};
pub use random::random_model;
pub use two_level::{two_level, two_level_family, ClosedForm, TwoLevelSpec};
