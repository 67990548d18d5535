//! Ensembles, the norm chain, the empirical reduction constants and the suite runner.

mod chain;
mod constants;
mod ensemble;
pub mod json;
mod properties;
mod suite;

pub use chain::{chain_grid, verify_chain, ChainReport};
pub use constants::{estimate_reduction_constants, ConstantsReport};
pub use properties::{
    associativity_property, decomposition_property, dominance_property, doubling_property, down_norm_property,
    hardy_littlewood_property, left_continuity_property, random_step_index, PropertySummary,
};
pub use ensemble::{digest, digest_text, random_step, EnsembleSpec};
pub use json::to_json;
pub use suite::{run_suite, run_suite_config, CheckRecord, SuiteConfig, SuiteReport, DEFAULT_CONFIG};
