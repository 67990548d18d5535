//! L^p-family norms, associate norms and down-associate norms.

mod downnorm;
mod pava;
mod sawyer;

pub use downnorm::{down_norm_bruteforce, down_norm_bruteforce_with, pairing_supremum, BruteForceOptions, DownNormMethod, DownNormResult};
pub use pava::{pava_non_increasing, project_monotone_cone};
pub use sawyer::down_norm_sawyer;

use std::fmt;
use std::str::FromStr;

use crate::error::{arg, Error, Result};
use crate::funcrep::{SampledFunction, StepFunction};
use crate::rearrange::rearrangement;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    Lp(f64),
    Linf,
}

impl NormSpec {
    /// L^p for p in [1, ∞]; p = ∞ gives `Linf`.
    pub fn lp(p: f64) -> Result<NormSpec> {
        if p == f64::INFINITY {
            Ok(NormSpec::Linf)
        } else if p >= 1.0 && p.is_finite() {
            Ok(NormSpec::Lp(p))
        } else {
            arg(format!("norm exponent must lie in [1, ∞] (got {p})"))
        }
    }

    pub fn exponent(self) -> f64 {
        match self {
            NormSpec::Lp(p) => p,
            NormSpec::Linf => f64::INFINITY,
        }
    }

    /// The conjugate exponent space, 1/p + 1/p' = 1.
    pub fn dual(self) -> NormSpec {
        match self {
            NormSpec::Linf => NormSpec::Lp(1.0),
            NormSpec::Lp(p) if p == 1.0 => NormSpec::Linf,
            NormSpec::Lp(p) => NormSpec::Lp(p / (p - 1.0)),
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Lp(p) => write!(f, "L^{p}"),
            NormSpec::Linf => write!(f, "L^inf"),
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    /// "2", "1.5", "inf", optionally prefixed with "L" or "L^".
    fn from_str(s: &str) -> Result<NormSpec> {
        let t = s.trim();
        let t = t.strip_prefix("L^").or_else(|| t.strip_prefix('L')).unwrap_or(t);
        if matches!(t, "inf" | "infinity" | "∞") {
            return Ok(NormSpec::Linf);
        }
        let p: f64 = t.parse().map_err(|_| Error::Parse(format!("bad norm exponent {s:?}")))?;
        NormSpec::lp(p)
    }
}

/// A function a norm can be taken of.
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Step(&'a StepFunction),
    Sampled(&'a SampledFunction),
}

impl<'a> From<&'a StepFunction> for Operand<'a> {
    fn from(f: &'a StepFunction) -> Self {
        Operand::Step(f)
    }
}

impl<'a> From<&'a SampledFunction> for Operand<'a> {
    fn from(f: &'a SampledFunction) -> Self {
        Operand::Sampled(f)
    }
}

fn step_norm_of_rearranged(spec: NormSpec, fs: &StepFunction) -> f64 {
    match spec {
        NormSpec::Linf => fs.sup(),
        NormSpec::Lp(p) if p == 1.0 => fs.cells().map(|c| c.value * c.len()).sum(),
        NormSpec::Lp(p) => fs.cells().map(|c| c.value.powf(p) * c.len()).sum::<f64>().powf(1.0 / p),
    }
}

/// ‖f‖_X. Step inputs are measured through f*, so equimeasurable inputs get
/// bit-identical norms; sampled inputs use their cell models (∞ when divergent).
pub fn ri_norm<'a>(spec: NormSpec, f: impl Into<Operand<'a>>) -> f64 {
    match f.into() {
        Operand::Step(f) => step_norm_of_rearranged(spec, &rearrangement(f)),
        Operand::Sampled(u) => match spec {
            NormSpec::Linf => u.sup(),
            NormSpec::Lp(p) => u.integral_of_power(p).powf(1.0 / p),
        },
    }
}

/// ‖f‖_{X'} for X = L^p, which is the L^{p'} norm.
pub fn associate_norm_exact<'a>(spec: NormSpec, f: impl Into<Operand<'a>>) -> f64 {
    ri_norm(spec.dual(), f)
}
