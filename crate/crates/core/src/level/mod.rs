//! The level operator G, its plateau decomposition, and the checks built on it.

mod averaging;
mod certificate;
mod doubling;
mod profile;
mod repcheck;

pub use averaging::averaging_operator;
pub use certificate::{certify_essential_decrease, EssentialDecreaseCertificate, PhiQuery};
pub use doubling::{doubling_check, DoublingReport};
pub use profile::{apply_g, decompose_plateaus, level_analysis, IntervalDecomposition, LevelAnalysis, TOL_E};
pub use repcheck::{left_continuous_rep_check, RepresentativeReport};
