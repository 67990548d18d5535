//! Rearrangements, the kernel operators R_I^m and H_I^m, the level operator
//! G_I^m with its plateau decomposition, down-associate norms, and a harness
//! that checks the reduction inequalities numerically.

mod error;
pub mod exact;
pub mod funcrep;
pub mod quadrature;
pub mod kernelops;
pub mod rearrange;
pub mod level;
pub mod norms;
pub mod verify;

pub use error::{Error, Result};
pub use funcrep::{Grid, IndexFunction, SampledFunction, StepFunction};
