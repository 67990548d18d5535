use crate::error::{Error, Result};
use crate::funcrep::{Grid, StepFunction};
use crate::kernelops::{apply_r, KernelQuery};
use crate::rearrange::rearrangement;

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingReport {
    /// max over t/2 ≤ s ≤ t of R f*(t) − 2^m R f*(s).
    pub pointwise_violation: f64,
    pub pointwise_scale: f64,
    /// Largest R f*(t) / R f*(s) seen over the same pairs.
    pub worst_ratio: f64,
    /// max over c < d of (d − c) R f*(d) − 2^{m+1} ∫_c^d R f*.
    pub integral_violation: f64,
    pub integral_scale: f64,
    pub pairs: usize,
    pub holds: bool,
}

/// Both forms of the doubling inequality for R f* over grid pairs; c also ranges over 0.
pub fn doubling_check(q: &KernelQuery, f: &StepFunction, grid: &Grid, tol: f64) -> Result<DoublingReport> {
    let fs = rearrangement(f);
    let r = apply_r(q, &fs, grid)?;
    if r.is_divergent() {
        return Err(Error::Divergent(r.diagnostic().unwrap_or("R f* is infinite").to_string()));
    }
    let x = grid.points();
    let v = r.values();
    let n = x.len();
    let m = q.order() as i32;
    let (k1, k2) = (2f64.powi(m), 2f64.powi(m + 1));

    let mut pw = f64::NEG_INFINITY;
    let mut worst_ratio: f64 = 0.0;
    let mut pairs = 0;
    for i in 0..n {
        let first = x.partition_point(|&s| s < 0.5 * x[i]);
        for j in first..=i {
            pw = pw.max(v[i] - k1 * v[j]);
            if v[j] > 0.0 {
                worst_ratio = worst_ratio.max(v[i] / v[j]);
            }
            pairs += 1;
        }
    }
    let pointwise_scale = v.iter().copied().fold(0.0, f64::max);

    // cumulative ∫_{x_0}^{x_i} R f*, plus ∫_0^{x_0} kept apart so an infinite head stays isolated
    let mut cum = vec![0.0; n];
    for i in 1..n {
        cum[i] = cum[i - 1] + if fs.is_zero() { 0.0 } else { q.integrate_r(&fs, x[i - 1], x[i]) };
    }
    let head = if fs.is_zero() {
        0.0
    } else if q.r_head_exponent() <= -1.0 {
        f64::INFINITY
    } else {
        q.integrate_r(&fs, 0.0, x[0])
    };
    let mut iv = f64::NEG_INFINITY;
    let mut integral_scale: f64 = 0.0;
    for d in 0..n {
        let lhs0 = x[d] * v[d];
        integral_scale = integral_scale.max(lhs0);
        if head.is_finite() {
            iv = iv.max(lhs0 - k2 * (head + cum[d]));
        }
        for c in 0..d {
            iv = iv.max((x[d] - x[c]) * v[d] - k2 * (cum[d] - cum[c]));
            pairs += 1;
        }
    }
    let pointwise_violation = pw.max(0.0);
    let integral_violation = iv.max(0.0);
    Ok(DoublingReport {
        pointwise_violation,
        pointwise_scale,
        worst_ratio,
        integral_violation,
        integral_scale,
        pairs,
        holds: pointwise_violation <= tol * pointwise_scale && integral_violation <= tol * integral_scale,
    })
}
