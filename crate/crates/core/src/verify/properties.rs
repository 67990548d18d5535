//! Randomised drivers for the property checks. Each returns one summary
//! line's worth of data; the suite and the acceptance tests share them.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::ensemble::EnsembleSpec;
use crate::funcrep::{Grid, IndexFunction, StepFunction, StepIndex};
use crate::kernelops::{associativity_check, dominance_check, KernelQuery};
use crate::level::{doubling_check, left_continuous_rep_check, level_analysis};
use crate::norms::{associate_norm_exact, down_norm_bruteforce, down_norm_sawyer, NormSpec};
use crate::rearrange::{hardy_littlewood_check, rearrangement};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertySummary {
    pub id: String,
    pub instances: usize,
    pub failures: usize,
    pub skipped: usize,
    pub values: BTreeMap<String, f64>,
    pub pass: bool,
    /// First failing instance, if any.
    pub detail: Option<String>,
}

impl PropertySummary {
    fn new(id: &str) -> Self {
        PropertySummary { id: id.into(), instances: 0, failures: 0, skipped: 0, values: BTreeMap::new(), pass: true, detail: None }
    }

    fn fail(&mut self, detail: impl FnOnce() -> String) {
        self.failures += 1;
        self.pass = false;
        if self.detail.is_none() {
            self.detail = Some(detail());
        }
    }

    fn max(&mut self, key: &str, v: f64) {
        let e = self.values.entry(key.into()).or_insert(f64::NEG_INFINITY);
        *e = e.max(v);
    }

    fn min(&mut self, key: &str, v: f64) {
        let e = self.values.entry(key.into()).or_insert(f64::INFINITY);
        *e = e.min(v);
    }
}

fn ensemble(seed: u64) -> EnsembleSpec {
    EnsembleSpec::default().with_seed(seed)
}

fn power(alpha: f64) -> IndexFunction {
    IndexFunction::power(1.0, alpha).expect("valid power law")
}

/// Log grid [s·lo, s·hi] around the support of f, merged with its breakpoints.
fn grid_around(f: &StepFunction, lo: f64, hi: f64, count: usize) -> Grid {
    let s = if f.is_zero() { 1.0 } else { f.support_end() };
    let g = Grid::log(s * lo, s * hi, count).expect("valid range");
    g.merged(f.breakpoints())
}

/// Non-decreasing step index with dyadic jumps in (0, 8) and values in (0, 4].
pub fn random_step_index(rng: &mut impl Rng) -> StepIndex {
    let n = rng.gen_range(1..=4);
    let mut cuts = std::collections::BTreeSet::new();
    while cuts.len() < n {
        cuts.insert(rng.gen_range(1..512u32));
    }
    let jumps: Vec<f64> = cuts.into_iter().map(|k| k as f64 / 64.0).collect();
    let mut levels = std::collections::BTreeSet::new();
    while levels.len() < n + 1 {
        levels.insert(rng.gen_range(1..=64u32));
    }
    let values: Vec<f64> = levels.into_iter().map(|k| k as f64 / 16.0).collect();
    let mut breaks = jumps;
    breaks.push(8.0);
    StepIndex::new(breaks, values).expect("increasing dyadic data")
}

/// ∫fg ≤ ∫f*g* exactly on `n` random pairs.
pub fn hardy_littlewood_property(seed: u64, n: usize) -> PropertySummary {
    let mut s = PropertySummary::new("hardy_littlewood");
    let e = ensemble(seed);
    for i in 0..n {
        let (f, g) = (e.sample(2 * i), e.sample(2 * i + 1));
        let r = hardy_littlewood_check(&f, &g);
        s.instances += 1;
        s.max("max_lhs_minus_rhs", r.lhs - r.rhs);
        if !r.holds {
            s.fail(|| format!("pair {i}: lhs {} > rhs {}", r.lhs, r.rhs));
        }
    }
    s
}

/// ∫ R f·g = ∫ f·H g over α ∈ {0,1,2} × m ∈ {1,2,3}; consistently divergent pairs are skipped.
pub fn associativity_property(seed: u64, n: usize) -> PropertySummary {
    let mut s = PropertySummary::new("associativity");
    let e = EnsembleSpec { zero_fraction: 0.35, ..ensemble(seed) };
    for i in 0..n {
        let alpha = [0.0, 1.0, 2.0][i % 3];
        let m = [1, 2, 3][(i / 3) % 3];
        let q = KernelQuery::new(power(alpha), m).expect("m ≥ 1");
        let (f, g) = (e.sample(2 * i), e.sample(2 * i + 1));
        let tol = if q.closed_form() { 1e-6 } else { 1e-4 };
        let r = associativity_check(&q, &f, &g, tol);
        s.instances += 1;
        if r.divergent {
            s.skipped += 1;
        } else {
            let key = if r.closed_form { "max_rel_err_closed_form" } else { "max_rel_err_quadrature" };
            s.max(key, r.rel_err);
        }
        if !r.holds {
            s.fail(|| format!("instance {i} (alpha={alpha}, m={m}): lhs {} rhs {} rel {}", r.lhs, r.rhs, r.rel_err));
        }
    }
    s
}

/// R f ≤ R f* at every grid point, slack ≤ 1e-8·max R f*.
pub fn dominance_property(seed: u64, n: usize) -> PropertySummary {
    let mut s = PropertySummary::new("dominance");
    let e = EnsembleSpec { zero_fraction: 0.35, ..ensemble(seed) };
    for i in 0..n {
        let alpha = [0.0, 0.5, 1.0, 2.0][i % 4];
        let m = [1, 2, 3][(i / 4) % 3];
        let q = KernelQuery::new(power(alpha), m).expect("m ≥ 1");
        let f = e.sample(i);
        let grid = grid_around(&f, 1e-3, 1e3, 241);
        s.instances += 1;
        match dominance_check(&q, &f, &grid, 1e-8) {
            Ok(r) => {
                if r.scale.is_infinite() {
                    s.skipped += 1;
                } else {
                    s.max("max_violation_over_scale", if r.scale > 0.0 { r.max_violation / r.scale } else { 0.0 });
                }
                if !r.holds {
                    s.fail(|| format!("instance {i} (alpha={alpha}, m={m}): violation {} scale {}", r.max_violation, r.scale));
                }
            }
            Err(err) => s.fail(|| format!("instance {i}: {err}")),
        }
    }
    s
}

/// Indexes with R f* finite for every f at order m.
fn finite_alphas(m: u32) -> [f64; 4] {
    match m {
        1 => [0.0, 0.5, 1.0, 2.0],
        2 => [0.0, 0.5, 1.0, 1.5],
        _ => [0.0, 0.5, 1.0, 1.25],
    }
}

/// Both doubling inequalities on `n` instances of order m.
pub fn doubling_property(seed: u64, m: u32, n: usize) -> PropertySummary {
    let mut s = PropertySummary::new(&format!("doubling_m{m}"));
    let e = ensemble(seed.wrapping_add(m as u64));
    for i in 0..n {
        let alpha = finite_alphas(m)[i % 4];
        let q = KernelQuery::new(power(alpha), m).expect("m ≥ 1");
        let f = e.sample(i);
        let grid = grid_around(&rearrangement(&f), 1e-4, 1e4, 161);
        s.instances += 1;
        match doubling_check(&q, &f, &grid, 1e-8) {
            Ok(r) => {
                s.max("worst_pointwise_ratio", r.worst_ratio);
                s.max("pointwise_violation_over_scale", r.pointwise_violation / r.pointwise_scale.max(f64::MIN_POSITIVE));
                s.max("integral_violation_over_scale", r.integral_violation / r.integral_scale.max(f64::MIN_POSITIVE));
                if !r.holds {
                    s.fail(|| format!("instance {i} (alpha={alpha}): {r:?}"));
                }
            }
            Err(err) => s.fail(|| format!("instance {i} (alpha={alpha}): {err}")),
        }
    }
    s.values.insert("bound".into(), 2f64.powi(m as i32));
    s
}

/// (index, m) pairs with a certificate and finite R f*.
fn decomposition_config(i: usize, rng: &mut impl Rng) -> (IndexFunction, u32) {
    match i % 7 {
        0 => (power(0.0), 1),
        1 => (power(0.5), 1),
        2 => (power(1.0), 1),
        3 => (power(1.0), 2),
        4 => (power(1.5), 2),
        5 => (power(1.0), 3),
        _ => (IndexFunction::Step(random_step_index(rng)), 1),
    }
}

/// G rebuilt from R f* off E and the plateau values on E, and plateau = R f*(d_k).
pub fn decomposition_property(seed: u64, n: usize) -> PropertySummary {
    let mut s = PropertySummary::new("decomposition");
    let e = ensemble(seed);
    for i in 0..n {
        let mut rng = e.rng(1_000_000 + i);
        let (idx, m) = decomposition_config(i, &mut rng);
        let q = KernelQuery::new(idx.clone(), m).expect("m ≥ 1");
        let f = e.sample(i);
        let grid = grid_around(&rearrangement(&f), 1e-4, 1e4, 321).merged(idx.jumps());
        s.instances += 1;
        let a = match level_analysis(&q, &f, &grid) {
            Ok(a) => a,
            Err(err) => {
                s.fail(|| format!("instance {i} ({idx}, m={m}): {err}"));
                continue;
            }
        };
        let mut worst: f64 = 0.0;
        for (k, &t) in grid.points().iter().enumerate() {
            let g = a.g.values()[k];
            let want = match a.decomposition.containing(t) {
                Some(j) => a.decomposition.plateau_values[j],
                None => a.r.values()[k],
            };
            worst = worst.max((g - want).abs() / g.max(f64::MIN_POSITIVE));
        }
        let mut worst_plateau: f64 = 0.0;
        for (&(_, d), &v) in a.decomposition.intervals.iter().zip(&a.decomposition.plateau_values) {
            let rd = q.r_value(&a.fstar, d).map(|x| x.to_f64()).unwrap_or(f64::NAN);
            worst_plateau = worst_plateau.max((rd - v).abs() / v);
        }
        s.max("max_reconstruction_rel_err", worst);
        s.max("max_plateau_rel_err", worst_plateau);
        s.max("max_intervals", a.decomposition.len() as f64);
        if !(worst <= 1e-6 && worst_plateau <= 1e-6) {
            s.fail(|| format!("instance {i} ({idx}, m={m}): reconstruction {worst}, plateau {worst_plateau}"));
        }
    }
    s
}

/// The three down-norm oracles: Sawyer at p = 1, the L^{p'} norm for
/// non-increasing f, and Sawyer/brute ratio stability under grid refinement.
pub fn down_norm_property(seed: u64, n: usize) -> Vec<PropertySummary> {
    let e = ensemble(seed);
    let mut p1 = PropertySummary::new("down_norm_p1_sawyer");
    let mut mono = PropertySummary::new("down_norm_non_increasing");
    let mut stab = PropertySummary::new("down_norm_refinement");
    for i in 0..n {
        let f = e.sample(i);
        let coarse = grid_around(&f, 1e-4, 1e2, 200);
        let b = down_norm_bruteforce(NormSpec::Lp(1.0), &f, &coarse, &[]).value;
        let sw = down_norm_sawyer(1.0, &f);
        let rel = (b - sw).abs() / sw;
        p1.instances += 1;
        p1.max("max_rel_diff", rel);
        if rel > 0.02 {
            p1.fail(|| format!("instance {i}: brute {b} sawyer {sw}"));
        }

        let p = [1.5, 2.0, 4.0][i % 3];
        let fs = rearrangement(&f);
        let b = down_norm_bruteforce(NormSpec::Lp(p), &fs, &grid_around(&fs, 1e-4, 1e2, 200), &[]).value;
        let exact = associate_norm_exact(NormSpec::Lp(p), &fs);
        let rel = (b - exact).abs() / exact;
        mono.instances += 1;
        mono.max("max_rel_diff", rel);
        if rel > 0.01 {
            mono.fail(|| format!("instance {i} (p={p}): brute {b} exact {exact}"));
        }

        // refinement halves the log spacing and keeps the same window
        let fine = grid_around(&f, 1e-4, 1e2, 399);
        let sw = down_norm_sawyer(p, &f);
        let r1 = sw / down_norm_bruteforce(NormSpec::Lp(p), &f, &coarse, &[]).value;
        let r2 = sw / down_norm_bruteforce(NormSpec::Lp(p), &f, &fine, &[]).value;
        let change = (r2 - r1).abs() / r1;
        stab.instances += 1;
        stab.max("max_ratio_change", change);
        stab.min(&format!("min_ratio_p{p}"), r2);
        stab.max(&format!("max_ratio_p{p}"), r2);
        if change >= 0.05 {
            stab.fail(|| format!("instance {i} (p={p}): ratio {r1} -> {r2}"));
        }
    }
    vec![p1, mono, stab]
}

/// G with a jump-perturbed step index against its left-continuous representative, m = 1.
pub fn left_continuity_property(seed: u64, n: usize) -> PropertySummary {
    let mut s = PropertySummary::new("left_continuity");
    let e = ensemble(seed);
    let q = KernelQuery::new(power(0.0), 1).expect("m = 1");
    for i in 0..n {
        let mut rng = e.rng(2_000_000 + i);
        let base = random_step_index(&mut rng);
        let vals = base.cell_values().to_vec();
        let jv: Vec<f64> = (0..base.jumps().len())
            .map(|k| match rng.gen_range(0..3) {
                0 => vals[k + 1],
                1 => 0.5 * (vals[k] + vals[k + 1]),
                _ => vals[k],
            })
            .collect();
        let raw = IndexFunction::Step(base.with_jump_values(jv).expect("values within the jump"));
        let f = e.sample(i);
        let grid = Grid::log(1.0 / 64.0, 64.0, 97).expect("valid range").merged(raw.jumps()).merged(f.breakpoints());
        s.instances += 1;
        match left_continuous_rep_check(&q, &raw, &f, &grid, &[1.0, 2.0, 4.0, f64::INFINITY], 1e-12) {
            Ok(r) => {
                s.max("max_norm_rel_diff", r.max_norm_rel_diff);
                s.max("pointwise_mismatches", r.mismatches.len() as f64);
                if !r.holds {
                    s.fail(|| format!("instance {i}: {r:?}"));
                }
            }
            Err(err) => s.fail(|| format!("instance {i}: {err}")),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        assert!(hardy_littlewood_property(1, 20).pass);
        let a = associativity_property(1, 18);
        assert!(a.pass, "{a:?}");
        assert!(dominance_property(1, 12).pass);
        for m in 1..=3 {
            let d = doubling_property(1, m, 4);
            assert!(d.pass, "{d:?}");
        }
        let d = decomposition_property(1, 7);
        assert!(d.pass, "{d:?}");
        for s in down_norm_property(1, 3) {
            assert!(s.pass, "{s:?}");
        }
        let l = left_continuity_property(1, 5);
        assert!(l.pass, "{l:?}");
    }

    #[test]
    fn random_step_indexes_are_valid() {
        let e = ensemble(3);
        for i in 0..20 {
            let s = random_step_index(&mut e.rng(i));
            assert!(s.cell_values().windows(2).all(|w| w[0] < w[1]));
            assert!(s.jumps().iter().all(|&j| j > 0.0 && j < 8.0));
        }
    }
}
