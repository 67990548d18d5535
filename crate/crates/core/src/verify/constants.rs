use serde::Serialize;

use super::ensemble::{digest_text, EnsembleSpec};
use crate::error::Result;
use crate::funcrep::{Grid, IndexFunction, StepFunction};
use crate::kernelops::{apply_h, KernelQuery};
use crate::level::{certify_essential_decrease, PhiQuery};
use crate::norms::{ri_norm, NormSpec};
use crate::quadrature::GaussLegendre;
use crate::rearrange::rearrangement;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub ensemble_digest: String,
    pub index: String,
    pub order: u32,
    pub x: String,
    pub y: String,
    pub samples: usize,
    /// Samples whose ‖K f‖_Y or ‖K f*‖_Y is infinite.
    pub skipped: usize,
    /// Samples with ‖K f‖_Y = ∞ but ‖K f*‖_Y < ∞; any of these falsifies the reduction.
    pub inconsistent: usize,
    /// Every sample diverged together with its rearrangement: C = C' = ∞.
    pub degenerate: bool,
    #[serde(serialize_with = "super::json::extended")]
    pub c_emp: f64,
    #[serde(serialize_with = "super::json::extended")]
    pub cprime_emp: f64,
    #[serde(serialize_with = "super::json::extended")]
    pub ratio: f64,
    #[serde(serialize_with = "super::json::extended")]
    pub bound: f64,
    /// Largest relative gap between the (m−1)!-scaled kernel integral and H^m at the probes.
    #[serde(serialize_with = "super::json::extended")]
    pub identity_max_err: f64,
    pub pass: bool,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Log grid below the support, a uniform grid across it, and the breakpoints.
fn h_grid(f: &StepFunction, index: &IndexFunction) -> Grid {
    let s = f.support_end();
    let mut extra: Vec<f64> = (1..=256).map(|k| s * k as f64 / 256.0).collect();
    extra.extend(f.breakpoints());
    extra.extend(index.jumps().iter().filter(|&&j| j < s));
    Grid::log(s * 1e-12, s, 1024).expect("valid range").merged(&extra)
}

/// ∫_t^∞ (f/I)(∫_t^s 1/I)^{m−1} ds by direct quadrature, cell by cell.
fn kernel_integral(q: &KernelQuery, f: &StepFunction, t: f64, rule: &GaussLegendre) -> f64 {
    let idx = q.index();
    let k = q.order() as i32 - 1;
    let mut pts: Vec<f64> = f.breakpoints().iter().chain(idx.jumps()).copied().filter(|&b| b > t && b <= f.support_end()).collect();
    pts.push(t);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut acc = 0.0;
    for w in pts.windows(2) {
        let v = f.eval_unchecked(w[0]);
        if v > 0.0 {
            // evaluate I inside the cell so a jump at the left end is not picked up
            let inv = |s: f64| 1.0 / idx.eval(s);
            acc += v * rule.integrate_graded(|s| inv(s) * idx.lambda(t, s).powi(k), w[0], w[1]);
        }
    }
    acc
}

/// ‖K h‖_Y with K = (m−1)!·H^m, and the worst identity error at 10 probes.
fn kernel_norm(q: &KernelQuery, y: NormSpec, h: &StepFunction, rule: &GaussLegendre) -> Result<(f64, f64)> {
    let grid = h_grid(h, q.index());
    let kh = apply_h(q, h, &grid)?;
    let scale = factorial(q.order() - 1);
    let s = h.support_end();
    let mut err: f64 = 0.0;
    for j in 0..10 {
        let t = s * 10f64.powf(-3.0 + 3.0 * j as f64 / 10.0);
        let direct = kernel_integral(q, h, t, rule);
        let via_h = scale * q.h_value(h, t)?;
        if direct > 0.0 {
            err = err.max((direct - via_h).abs() / direct);
        }
    }
    Ok((scale * ri_norm(y, &kh), err))
}

/// Empirical C and C' over the ensemble; every rearrangement joins the non-increasing pool.
pub fn estimate_reduction_constants(
    spec: &EnsembleSpec,
    index: &IndexFunction,
    m: u32,
    x: NormSpec,
    y: NormSpec,
    tol: f64,
) -> Result<ConstantsReport> {
    spec.validate()?;
    certify_essential_decrease(&PhiQuery::new(index.clone(), m)?, 1.0)?;
    let q = KernelQuery::new(index.clone(), m)?;
    let rule = GaussLegendre::new(20);
    let samples = spec.samples();
    let mut text = serde_json::to_string(spec).expect("serialisable");
    for f in &samples {
        text.push_str(&crate::funcrep::io::format_step_csv(f));
    }
    let (mut c, mut cp) = (0.0f64, 0.0f64);
    let (mut skipped, mut inconsistent, mut evaluated) = (0, 0, 0);
    let mut identity_max_err: f64 = 0.0;
    for f in &samples {
        let fs = rearrangement(f);
        let nx = ri_norm(x, f);
        let (kf, e1) = kernel_norm(&q, y, f, &rule)?;
        let (kfs, e2) = kernel_norm(&q, y, &fs, &rule)?;
        identity_max_err = identity_max_err.max(e1).max(e2);
        if !kf.is_finite() || !kfs.is_finite() {
            skipped += 1;
            if !kf.is_finite() && kfs.is_finite() {
                inconsistent += 1;
            }
            continue;
        }
        evaluated += 1;
        let (r, rs) = (kf / nx, kfs / nx);
        c = c.max(r).max(rs);
        cp = cp.max(rs);
        if f.is_non_increasing() {
            cp = cp.max(r);
        }
    }
    let bound = 2f64.powi(m as i32 + 1);
    let degenerate = evaluated == 0 && skipped > 0 && inconsistent == 0;
    if degenerate {
        c = f64::INFINITY;
        cp = f64::INFINITY;
    }
    let identity_ok = identity_max_err <= 1e-8;
    let holds = if degenerate { true } else { c <= bound * cp * (1.0 + tol) };
    Ok(ConstantsReport {
        ensemble_digest: digest_text(&text),
        index: index.to_string(),
        order: m,
        x: x.to_string(),
        y: y.to_string(),
        samples: samples.len(),
        skipped,
        inconsistent,
        degenerate,
        c_emp: c,
        cprime_emp: cp,
        ratio: if degenerate || cp == 0.0 { f64::NAN } else { c / cp },
        bound,
        identity_max_err,
        pass: holds && identity_ok && inconsistent == 0,
    })
}
