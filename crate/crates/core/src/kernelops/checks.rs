use super::{apply_r, KernelQuery};
use crate::error::Result;
use crate::funcrep::{Grid, StepFunction};
use crate::rearrange::rearrangement;

#[derive(Debug, Clone, PartialEq)]
pub struct AssociativityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    pub holds: bool,
    /// Both sides infinite (consistent divergence).
    pub divergent: bool,
    /// Whether R f needed inner quadrature.
    pub closed_form: bool,
}

impl KernelQuery {
    /// Breakpoints of f and the jumps of I inside (a, b), with both ends.
    fn split_points(&self, f: &StepFunction, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        pts.extend(f.breakpoints().iter().chain(self.index().jumps()).copied().filter(|&x| x > a && x < b));
        pts.push(b);
        pts.sort_by(|x, y| x.total_cmp(y));
        pts.dedup();
        pts
    }

    /// ∫_a^b R f, finite case.
    pub(crate) fn integrate_r(&self, f: &StepFunction, a: f64, b: f64) -> f64 {
        let lead = f.leading_zero();
        let pts = self.split_points(f, a.max(lead), b);
        let mut s = 0.0;
        for w in pts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let r = |t: f64| self.inner(f, t) / self.index().eval(t);
            s += if lo == 0.0 {
                self.rule().integrate_from_zero(r, hi, self.r_head_exponent())
            } else {
                self.rule().integrate_graded(r, lo, hi)
            };
        }
        s
    }

    /// ∫_a^b H g.
    fn integrate_h(&self, g: &StepFunction, a: f64, b: f64) -> f64 {
        let b = b.min(g.support_end());
        if b <= a {
            return 0.0;
        }
        let pts = self.split_points(g, a, b);
        let (beta, _) = self.h_head(g);
        let mut s = 0.0;
        for w in pts.windows(2) {
            let h = |t: f64| self.h_finite(g, t);
            s += if w[0] == 0.0 {
                self.rule().integrate_from_zero(h, w[1], beta)
            } else {
                self.rule().integrate_graded(h, w[0], w[1])
            };
        }
        s
    }

    fn lhs_diverges(&self, f: &StepFunction, g: &StepFunction) -> bool {
        if f.is_zero() || g.is_zero() {
            return false;
        }
        self.r_diverges(f) || (f.value_at_zero() > 0.0 && g.value_at_zero() > 0.0 && self.r_head_exponent() <= -1.0)
    }

    fn rhs_diverges(&self, f: &StepFunction, g: &StepFunction) -> bool {
        if f.is_zero() || g.is_zero() || f.value_at_zero() == 0.0 {
            return false;
        }
        let (beta, _) = self.h_head(g);
        beta <= -1.0
    }
}

/// Compares ∫ R f·g with ∫ f·H g, each computed along its own route.
pub fn associativity_check(q: &KernelQuery, f: &StepFunction, g: &StepFunction, tol: f64) -> AssociativityReport {
    let closed_form = q.closed_form();
    let (ld, rd) = (q.lhs_diverges(f, g), q.rhs_diverges(f, g));
    if ld || rd {
        let lhs = if ld { f64::INFINITY } else { f64::NAN };
        let rhs = if rd { f64::INFINITY } else { f64::NAN };
        return AssociativityReport { lhs, rhs, rel_err: if ld == rd { 0.0 } else { f64::INFINITY }, holds: ld == rd, divergent: ld && rd, closed_form };
    }
    let mut lhs = 0.0;
    for c in g.cells().filter(|c| c.value > 0.0) {
        lhs += c.value * q.integrate_r(f, c.start, c.end);
    }
    let mut rhs = 0.0;
    for c in f.cells().filter(|c| c.value > 0.0) {
        rhs += c.value * q.integrate_h(g, c.start, c.end);
    }
    let scale = lhs.max(rhs);
    let rel_err = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    AssociativityReport { lhs, rhs, rel_err, holds: rel_err <= tol, divergent: false, closed_form }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub max_violation: f64,
    pub scale: f64,
    pub holds: bool,
    pub points: usize,
}

/// R f ≤ R f* at every grid point, up to `tol·scale` with scale = max R f*.
pub fn dominance_check(q: &KernelQuery, f: &StepFunction, grid: &Grid, tol: f64) -> Result<DominanceReport> {
    let fs = rearrangement(f);
    let rs = apply_r(q, &fs, grid)?;
    if rs.is_divergent() {
        return Ok(DominanceReport { max_violation: 0.0, scale: f64::INFINITY, holds: true, points: grid.len() });
    }
    let r = apply_r(q, f, grid)?;
    let scale = rs.values().iter().copied().fold(0.0, f64::max);
    let mut worst = f64::NEG_INFINITY;
    for (a, b) in r.values().iter().zip(rs.values()) {
        worst = worst.max(a - b);
    }
    let max_violation = worst.max(0.0);
    Ok(DominanceReport { max_violation, scale, holds: max_violation <= tol * scale, points: grid.len() })
}
