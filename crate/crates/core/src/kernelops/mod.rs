//! The operators R_I^m and H_I^m through their single-integral formulas,
//! the duality pairing between them, and divergence detection.

mod checks;
mod eval;

pub use checks::{associativity_check, dominance_check, AssociativityReport, DominanceReport};

use crate::error::{arg, Result};
use crate::funcrep::{Endpoint, Grid, IndexFunction, Jump, SampledFunction, StepFunction};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone)]
pub struct KernelQuery {
    index: IndexFunction,
    order: u32,
    tolerance: f64,
    rule: GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divergence {
    Finite,
    EverywhereInfinite,
}

/// Non-negative extended real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(x) => x,
            Extended::Infinite => f64::INFINITY,
        }
    }
}

impl KernelQuery {
    pub fn new(index: IndexFunction, order: u32) -> Result<Self> {
        if order < 1 {
            return arg("order m must be at least 1");
        }
        Ok(KernelQuery { index, order, tolerance: 1e-8, rule: GaussLegendre::new(16) })
    }

    pub fn with_nodes(mut self, nodes: usize) -> Result<Self> {
        if nodes == 0 {
            return arg("nodes per cell must be positive");
        }
        self.rule = GaussLegendre::new(nodes);
        Ok(self)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return arg("tolerance must lie in (0, 1)");
        }
        self.tolerance = tol;
        Ok(self)
    }

    pub fn index(&self) -> &IndexFunction {
        &self.index
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn nodes(&self) -> usize {
        self.rule.len()
    }

    pub(crate) fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    /// Same order and tolerance, another index.
    pub fn with_index(&self, index: IndexFunction) -> KernelQuery {
        KernelQuery { index, ..self.clone() }
    }

    /// True when R f is evaluated in closed form (no inner quadrature).
    pub fn closed_form(&self) -> bool {
        match self.index.alpha() {
            None => true,
            Some(a) => self.order == 1 || a == 0.0 || a == 1.0,
        }
    }

    /// R f = ∞ at every t iff f(0+) > 0 and the kernel is not integrable at 0.
    pub fn r_diverges(&self, f: &StepFunction) -> bool {
        match self.index.alpha() {
            Some(a) if a > 1.0 && self.order >= 2 => {
                f.value_at_zero() > 0.0 && (a - 1.0) * (self.order - 1) as f64 >= 1.0
            }
            _ => false,
        }
    }

    /// Growth exponent of R f at 0 (when f(0+) > 0).
    pub(crate) fn r_head_exponent(&self) -> f64 {
        let m = self.order as f64;
        match self.index.alpha() {
            Some(a) => m * (1.0 - a),
            None => m,
        }
    }

    pub(crate) fn r_endpoints(&self, f: &StepFunction) -> (Endpoint, Endpoint) {
        if f.is_zero() {
            return (Endpoint::Zero, Endpoint::Zero);
        }
        let m = self.order as f64;
        let head = if f.value_at_zero() > 0.0 { Endpoint::power(self.r_head_exponent()) } else { Endpoint::Zero };
        let tail = match self.index.alpha() {
            Some(a) if a < 1.0 => Endpoint::power((1.0 - a) * (m - 1.0) - a),
            Some(a) if a == 1.0 => Endpoint::Power { exponent: -1.0, log_power: self.order - 1 },
            Some(a) => Endpoint::power(-a),
            None => Endpoint::power(m - 1.0),
        };
        (head, tail)
    }

    /// Behaviour of H f at 0: (exponent, log power).
    pub(crate) fn h_head(&self, f: &StepFunction) -> (f64, u32) {
        let m = self.order;
        let full = f.value_at_zero() > 0.0;
        match self.index.alpha() {
            Some(a) if a < 1.0 => (0.0, 0),
            Some(a) if a == 1.0 => (0.0, if full { m } else { m - 1 }),
            Some(a) if full => (m as f64 * (1.0 - a), 0),
            Some(a) => ((1.0 - a) * (m - 1) as f64, 0),
            None => (0.0, 0),
        }
    }

    pub(crate) fn h_endpoints(&self, f: &StepFunction) -> (Endpoint, Endpoint) {
        if f.is_zero() {
            return (Endpoint::Zero, Endpoint::Zero);
        }
        let (exponent, log_power) = self.h_head(f);
        (Endpoint::Power { exponent, log_power }, Endpoint::Zero)
    }

    /// R_I^m f(t).
    pub fn r_value(&self, f: &StepFunction, t: f64) -> Result<Extended> {
        if !(t > 0.0) {
            return arg("evaluation point must be positive");
        }
        if self.r_diverges(f) {
            return Ok(Extended::Infinite);
        }
        Ok(Extended::Finite(self.inner(f, t) / self.index.eval(t)))
    }

    /// H_I^m f(t).
    pub fn h_value(&self, f: &StepFunction, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return arg("evaluation point must be positive");
        }
        Ok(self.h_finite(f, t))
    }
}

/// Finiteness of R_I^m f* decided at the origin; the verdict holds for every t.
pub fn divergence_probe(q: &KernelQuery, fstar: &StepFunction) -> Divergence {
    if q.r_diverges(fstar) {
        Divergence::EverywhereInfinite
    } else {
        Divergence::Finite
    }
}

fn sample_r(q: &KernelQuery, f: &StepFunction, grid: &Grid) -> Result<SampledFunction> {
    if q.r_diverges(f) {
        return Ok(SampledFunction::divergent(
            grid.clone(),
            format!("R_I^{} f is infinite: f(0+) > 0 and the kernel is not integrable at 0", q.order),
        ));
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut jumps = Vec::new();
    let jump_set = q.index.jumps();
    for (i, &t) in grid.points().iter().enumerate() {
        let s = q.inner(f, t);
        let v = crate::error::finite(s / q.index.eval(t), "R_I^m f")?;
        values.push(v);
        if jump_set.binary_search_by(|j| j.total_cmp(&t)).is_ok() {
            jumps.push(Jump { index: i, left: s / q.index.eval_left(t), right: s / q.index.eval_right(t) });
        }
    }
    let (head, tail) = q.r_endpoints(f);
    SampledFunction::new(grid.clone(), values, head, tail)?.with_jumps(jumps)
}

/// R_I^m f at the grid points; infinite everywhere when divergent.
pub fn apply_r(q: &KernelQuery, f: &StepFunction, grid: &Grid) -> Result<SampledFunction> {
    sample_r(q, f, grid)
}

/// H_I^m f at the grid points.
pub fn apply_h(q: &KernelQuery, f: &StepFunction, grid: &Grid) -> Result<SampledFunction> {
    let mut values = Vec::with_capacity(grid.len());
    for &t in grid.points() {
        values.push(crate::error::finite(q.h_finite(f, t), "H_I^m f")?);
    }
    let (head, tail) = q.h_endpoints(f);
    SampledFunction::new(grid.clone(), values, head, tail)
}

/// ∫ u·v.
pub fn duality_pairing(u: &SampledFunction, v: &StepFunction) -> Result<f64> {
    u.pair_with_step(v)
}
