use super::profile::apply_g;
use crate::error::Result;
use crate::funcrep::{Grid, IndexFunction, StepFunction};
use crate::kernelops::KernelQuery;

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativeReport {
    /// Grid points that are jump locations of I (excluded from the pointwise test).
    pub jump_points: Vec<usize>,
    /// Non-jump grid points where the two G values differ.
    pub mismatches: Vec<usize>,
    /// (p, norm with I_raw, norm with I_0), over the grid window; p = ∞ is the sup.
    pub norms: Vec<(f64, f64, f64)>,
    pub max_norm_rel_diff: f64,
    pub holds: bool,
}

/// G computed with `i_raw` and with its left-continuous representative.
/// Norms are taken over [x_0, x_n]: for m = 1 and a step index G tends to a
/// positive constant at infinity, so whole-line L^p norms are infinite for p < ∞.
pub fn left_continuous_rep_check(
    q: &KernelQuery,
    i_raw: &IndexFunction,
    f: &StepFunction,
    grid: &Grid,
    exponents: &[f64],
    tol: f64,
) -> Result<RepresentativeReport> {
    let g_raw = apply_g(&q.with_index(i_raw.clone()), f, grid)?;
    let g_0 = apply_g(&q.with_index(i_raw.left_continuous()), f, grid)?;
    let jumps = i_raw.jumps();
    let mut jump_points = Vec::new();
    let mut mismatches = Vec::new();
    for (i, &t) in grid.points().iter().enumerate() {
        if jumps.binary_search_by(|x| x.total_cmp(&t)).is_ok() {
            jump_points.push(i);
        } else if g_raw.values()[i] != g_0.values()[i] {
            mismatches.push(i);
        }
    }
    let mut norms = Vec::new();
    let mut worst: f64 = 0.0;
    for &p in exponents {
        let (a, b) = if p.is_infinite() {
            (g_raw.window_sup(), g_0.window_sup())
        } else {
            (g_raw.window_integral_of_power(p).powf(1.0 / p), g_0.window_integral_of_power(p).powf(1.0 / p))
        };
        let scale = a.max(b);
        if scale > 0.0 {
            worst = worst.max((a - b).abs() / scale);
        }
        norms.push((p, a, b));
    }
    Ok(RepresentativeReport { jump_points, mismatches: mismatches.clone(), norms, max_norm_rel_diff: worst, holds: mismatches.is_empty() && worst <= tol })
}
