//! Piecewise-constant functions, index functions, grids and sampled operator output.

mod grid;
mod index;
pub mod io;
mod sampled;
mod step;

pub use grid::{make_log_grid, Grid};
pub use index::{reciprocal_index_integral, IndexFunction, PowerLaw, StepIndex};
pub(crate) use sampled::Piece;
pub use sampled::{Endpoint, Jump, SampledFunction};
pub use step::{Cell, StepFunction};

/// ∫_a^b f.
pub fn integrate_step(f: &StepFunction, a: f64, b: f64) -> crate::Result<f64> {
    f.integrate(a, b)
}

/// f(t), left-closed cells.
pub fn evaluate_step(f: &StepFunction, t: f64) -> crate::Result<f64> {
    f.eval(t)
}
