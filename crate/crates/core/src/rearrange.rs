//! Distribution functions, non-increasing rearrangements and the
//! Hardy–Littlewood inequality, all with exact level-set bookkeeping.

use std::collections::BTreeMap;

use crate::exact::{self, Exact};
use crate::funcrep::StepFunction;

/// Distinct positive values of f, descending, each with the exact measure of
/// the set where f takes it.
fn level_sets(f: &StepFunction) -> Vec<(f64, Exact)> {
    let mut by_value: BTreeMap<u64, Exact> = BTreeMap::new();
    for c in f.cells() {
        if c.value > 0.0 {
            // positive doubles order like their bit patterns
            let len = exact::exact(c.end) - exact::exact(c.start);
            *by_value.entry(c.value.to_bits()).or_insert_with(exact::zero) += len;
        }
    }
    by_value.into_iter().rev().map(|(b, l)| (f64::from_bits(b), l)).collect()
}

/// f* with exact breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRearrangement {
    pub breakpoints: Vec<Exact>,
    pub values: Vec<f64>,
}

impl ExactRearrangement {
    /// ∫ f*·g* in exact arithmetic.
    pub fn pairing(&self, other: &ExactRearrangement) -> Exact {
        let (mut i, mut j) = (0usize, 0usize);
        let mut lo = exact::zero();
        let mut s = exact::zero();
        while i < self.breakpoints.len() && j < other.breakpoints.len() {
            let hi = if self.breakpoints[i] <= other.breakpoints[j] {
                self.breakpoints[i].clone()
            } else {
                other.breakpoints[j].clone()
            };
            s += exact::exact(self.values[i]) * exact::exact(other.values[j]) * (&hi - &lo);
            if self.breakpoints[i] == hi {
                i += 1;
            }
            if other.breakpoints[j] == hi {
                j += 1;
            }
            lo = hi;
        }
        s
    }

    /// ∫_0^t f* exactly.
    pub fn integral_to(&self, t: &Exact) -> Exact {
        let mut lo = exact::zero();
        let mut s = exact::zero();
        for (b, v) in self.breakpoints.iter().zip(&self.values) {
            let hi = if b < t { b.clone() } else { t.clone() };
            if hi > lo {
                s += exact::exact(*v) * (&hi - &lo);
            }
            if b >= t {
                break;
            }
            lo = b.clone();
        }
        s
    }
}

pub fn rearrangement_exact(f: &StepFunction) -> ExactRearrangement {
    let mut acc = exact::zero();
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    for (v, len) in level_sets(f) {
        acc += len;
        breakpoints.push(acc.clone());
        values.push(v);
    }
    ExactRearrangement { breakpoints, values }
}

/// f*(t) = inf{s ≥ 0 : μ_f(s) ≤ t}: values sorted descending, lengths of
/// equal values merged, breakpoints rounded once from exact partial sums.
pub fn rearrangement(f: &StepFunction) -> StepFunction {
    let ex = rearrangement_exact(f);
    let mut b: Vec<f64> = Vec::with_capacity(ex.values.len());
    let mut v: Vec<f64> = Vec::with_capacity(ex.values.len());
    for (t, val) in ex.breakpoints.iter().zip(ex.values) {
        let t = exact::to_f64(t);
        // two partial sums closer than an ulp collapse to one breakpoint
        if b.last().is_some_and(|&last| t <= last) {
            continue;
        }
        b.push(t);
        v.push(val);
    }
    StepFunction::new(b, v).expect("rearrangement is a valid step function")
}

/// μ_f as a step function of the level s (right-continuous: μ drops at each value).
pub fn distribution_function(f: &StepFunction) -> StepFunction {
    let sets = level_sets(f);
    // ascending values w_r < … < w_1; μ = Σ_{w_j > s} L_j
    let mut total: Exact = sets.iter().fold(exact::zero(), |a, (_, l)| a + l);
    let mut b = Vec::with_capacity(sets.len());
    let mut v = Vec::with_capacity(sets.len());
    for (w, l) in sets.iter().rev() {
        b.push(*w);
        v.push(exact::to_f64(&total));
        total -= l;
    }
    StepFunction::new(b, v).expect("distribution function is a valid step function")
}

/// μ_f = μ_g, compared exactly.
pub fn equimeasurable(f: &StepFunction, g: &StepFunction) -> bool {
    level_sets(f) == level_sets(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyLittlewoodReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// ∫ f g ≤ ∫ f* g*, both sides and the comparison exact.
pub fn hardy_littlewood_check(f: &StepFunction, g: &StepFunction) -> HardyLittlewoodReport {
    let lhs = f.product_integral_exact(g);
    let rhs = rearrangement_exact(f).pairing(&rearrangement_exact(g));
    HardyLittlewoodReport { lhs: exact::to_f64(&lhs), rhs: exact::to_f64(&rhs), holds: lhs <= rhs }
}
