use super::IntervalDecomposition;
use crate::error::{arg, Result};
use crate::funcrep::StepFunction;

/// A(g): g* off E, and the mean of g* over (c_k, d_k) on each interval.
pub fn averaging_operator(gstar: &StepFunction, dec: &IntervalDecomposition) -> Result<StepFunction> {
    if !gstar.is_non_increasing() {
        return arg("averaging needs a non-increasing input");
    }
    if dec.is_empty() {
        return Ok(gstar.clone());
    }
    let mut pts: Vec<f64> = gstar.breakpoints().to_vec();
    for &(c, d) in &dec.intervals {
        pts.push(c);
        pts.push(d);
    }
    pts.retain(|&x| x > 0.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let means: Vec<f64> = dec
        .intervals
        .iter()
        .map(|&(c, d)| Ok(gstar.integrate(c, d)? / (d - c)))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(pts.len());
    let mut lo = 0.0;
    for &hi in &pts {
        // (lo, hi) lies inside one interval of E or entirely outside E
        let k = dec.intervals.partition_point(|&(_, d)| d <= lo);
        let v = if k < dec.len() && dec.intervals[k].0 <= lo && hi <= dec.intervals[k].1 {
            means[k]
        } else {
            gstar.eval_unchecked(lo.max(f64::MIN_POSITIVE))
        };
        values.push(v);
        lo = hi;
    }
    StepFunction::new(pts, values)
}
