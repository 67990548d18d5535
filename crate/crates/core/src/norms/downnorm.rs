use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pava::{pava_non_increasing, project_monotone_cone};
use super::{ri_norm, NormSpec, Operand};
use crate::funcrep::{Grid, StepFunction};
use crate::rearrange::rearrangement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DownNormMethod {
    SawyerFormula,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DownNormResult {
    pub value: f64,
    pub method: DownNormMethod,
    /// Non-increasing g with ‖g‖_X ≤ 1 achieving `value`.
    pub witness: Option<StepFunction>,
    /// Which candidate won: "restart[k]", "indicator[k]" or "extra[k]".
    pub source: String,
    /// Exact optimum of the discretised problem (level function of the cell averages).
    pub discrete_optimum: f64,
    /// discrete_optimum minus the best projected-gradient value.
    pub gradient_gap: f64,
    /// First-order residual of the best restart.
    pub stationarity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub stationarity_tol: f64,
    pub seed: u64,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions { restarts: 20, max_iter: 200, stationarity_tol: 1e-10, seed: 0 }
    }
}

/// The discretised problem: maximise Σ w ū g over non-increasing g ≥ 0 with Σ w g^p ≤ 1.
struct Cells {
    ends: Vec<f64>,
    w: Vec<f64>,
    mass: Vec<f64>,
    avg: Vec<f64>,
}

impl Cells {
    fn pairing(&self, g: &[f64]) -> f64 {
        self.mass.iter().zip(g).map(|(m, g)| m * g).sum()
    }

    fn norm(&self, p: f64, g: &[f64]) -> f64 {
        if p == 1.0 {
            self.w.iter().zip(g).map(|(w, g)| w * g).sum()
        } else {
            self.w.iter().zip(g).map(|(w, g)| w * g.powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }

    fn ratio(&self, p: f64, g: &[f64]) -> f64 {
        let n = self.norm(p, g);
        if n > 0.0 {
            self.pairing(g) / n
        } else {
            0.0
        }
    }

    fn witness(&self, p: f64, g: &[f64]) -> StepFunction {
        let n = self.norm(p, g);
        let vals = g.iter().map(|v| v / n).collect();
        let s = StepFunction::new(self.ends.clone(), vals).expect("cells are valid");
        normalize(NormSpec::Lp(p), &s)
    }
}

fn normalize(spec: NormSpec, g: &StepFunction) -> StepFunction {
    let n = ri_norm(spec, g);
    if n > 0.0 && n != 1.0 {
        g.scale(1.0 / n).expect("positive finite scale")
    } else {
        g.clone()
    }
}

fn build_cells(f: Operand<'_>, grid: &Grid) -> Cells {
    let mut ends: Vec<f64> = grid.points().to_vec();
    if let Operand::Step(f) = f {
        let end = f.support_end();
        ends.extend(f.breakpoints().iter().copied().filter(|&b| b < grid.last()));
        ends.retain(|&x| x <= end);
        if end <= grid.last() {
            ends.push(end);
        }
    }
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let mass: Vec<f64> = match f {
        Operand::Step(f) => {
            let mut lo = 0.0;
            ends.iter()
                .map(|&hi| {
                    let m = f.integrate(lo, hi).expect("ordered");
                    lo = hi;
                    m
                })
                .collect()
        }
        Operand::Sampled(u) => u.integrals_over(&ends),
    };
    let mut w = Vec::with_capacity(ends.len());
    let mut lo = 0.0;
    for &hi in &ends {
        w.push(hi - lo);
        lo = hi;
    }
    let avg = mass.iter().zip(&w).map(|(m, w)| m / w).collect();
    Cells { ends, w, mass, avg }
}

/// Projected-gradient ascent from `g`; returns the final point and its residual.
fn ascend(c: &Cells, p: f64, mut g: Vec<f64>, opts: &BruteForceOptions) -> (Vec<f64>, f64) {
    let n = g.len();
    let gmax = |g: &[f64]| g.iter().copied().fold(0.0, f64::max);
    let mut eta = 1.0;
    let mut residual = f64::INFINITY;
    if p == 1.0 {
        // linear objective on the slice Σ w g = 1: ascend the ratio directly
        let mut val = c.ratio(p, &g);
        for _ in 0..opts.max_iter {
            let trial: Vec<f64> = (0..n).map(|i| g[i] + eta * c.avg[i]).collect();
            let t = project_monotone_cone(&trial, &c.w);
            let tv = c.ratio(p, &t);
            if tv > val {
                residual = (tv - val) / tv;
                let s = c.norm(p, &t);
                g = t.iter().map(|v| v / s).collect();
                val = tv;
                eta *= 2.0;
                if residual <= opts.stationarity_tol {
                    break;
                }
            } else {
                eta *= 0.5;
                if eta < 1e-12 {
                    residual = 0.0;
                    break;
                }
            }
        }
        return (g, residual);
    }
    // 1 < p < ∞: maximise J(g) = Σ w (ū g − g^p/p) over the cone, then rescale
    let j = |g: &[f64]| -> f64 { (0..n).map(|i| c.w[i] * (c.avg[i] * g[i] - g[i].powf(p) / p)).sum() };
    let mut jg = j(&g);
    for _ in 0..opts.max_iter {
        let grad: Vec<f64> = (0..n).map(|i| c.avg[i] - g[i].powf(p - 1.0)).collect();
        let full: Vec<f64> = (0..n).map(|i| g[i] + grad[i]).collect();
        let pg = project_monotone_cone(&full, &c.w);
        residual = (0..n).map(|i| (pg[i] - g[i]).abs()).fold(0.0, f64::max) / gmax(&g).max(f64::MIN_POSITIVE);
        if residual <= opts.stationarity_tol {
            break;
        }
        // Armijo backtracking along the projection arc
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = (0..n).map(|i| g[i] + eta * grad[i]).collect();
            let t = project_monotone_cone(&trial, &c.w);
            let jt = j(&t);
            let lin: f64 = (0..n).map(|i| c.w[i] * grad[i] * (t[i] - g[i])).sum();
            if jt >= jg + 1e-4 * lin && jt >= jg {
                g = t;
                jg = jt;
                accepted = true;
                eta *= 2.0;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (g, residual)
}

/// Exact discrete optimum and the g attaining it.
fn discrete_optimum(c: &Cells, p: f64) -> (f64, Vec<f64>) {
    if p == 1.0 {
        let mut acc = 0.0;
        let (mut best, mut k) = (0.0, 0);
        for (i, (&m, &e)) in c.mass.iter().zip(&c.ends).enumerate() {
            acc += m;
            if acc / e > best {
                best = acc / e;
                k = i;
            }
        }
        let g = (0..c.ends.len()).map(|i| if i <= k { 1.0 } else { 0.0 }).collect();
        return (best, g);
    }
    let q = p / (p - 1.0);
    let level = pava_non_increasing(&c.avg, &c.w);
    let value = c.w.iter().zip(&level).map(|(w, u)| w * u.max(0.0).powf(q)).sum::<f64>().powf(1.0 / q);
    let g = level.iter().map(|u| u.max(0.0).powf(q - 1.0)).collect();
    (value, g)
}

/// sup ∫ f g over non-increasing g ≥ 0 with ‖g‖_X ≤ 1, searched over step
/// functions on the cells of `grid` (merged with the breakpoints of a step f)
/// and over the supplied extra candidates.
pub fn down_norm_bruteforce<'a>(spec: NormSpec, f: impl Into<Operand<'a>>, grid: &Grid, extra: &[StepFunction]) -> DownNormResult {
    down_norm_bruteforce_with(spec, f, grid, extra, &BruteForceOptions::default())
}

pub fn down_norm_bruteforce_with<'a>(
    spec: NormSpec,
    f: impl Into<Operand<'a>>,
    grid: &Grid,
    extra: &[StepFunction],
    opts: &BruteForceOptions,
) -> DownNormResult {
    let f = f.into();
    let total = ri_norm(NormSpec::Lp(1.0), f);
    if spec == NormSpec::Linf {
        // χ_(0,T) with T → ∞ exhausts ∫ f
        return DownNormResult {
            value: total,
            method: DownNormMethod::BruteForce,
            witness: StepFunction::indicator(0.0, grid.last()).ok(),
            source: "integral".into(),
            discrete_optimum: total,
            gradient_gap: 0.0,
            stationarity: 0.0,
        };
    }
    let p = spec.exponent();
    if total == 0.0 {
        return DownNormResult {
            value: 0.0,
            method: DownNormMethod::BruteForce,
            witness: Some(StepFunction::zero()),
            source: "zero".into(),
            discrete_optimum: 0.0,
            gradient_gap: 0.0,
            stationarity: 0.0,
        };
    }
    let c = build_cells(f, grid);
    let n = c.ends.len();
    let (optimum, g_opt) = discrete_optimum(&c, p);

    let mut best_val = f64::NEG_INFINITY;
    let mut best_src = String::new();
    let mut best_g: Option<StepFunction> = None;
    let mut best_pga = f64::NEG_INFINITY;
    let mut best_res = f64::INFINITY;

    // restart 0 is warm-started at the level-function solution; the rest are random
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let amax = c.avg.iter().copied().fold(0.0, f64::max);
    let gscale = if p == 1.0 { 1.0 } else { amax.powf(1.0 / (p - 1.0)) };
    for k in 0..opts.restarts.max(1) {
        let start = if k == 0 {
            g_opt.clone()
        } else {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * gscale).collect();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        };
        let (g, res) = ascend(&c, p, start, opts);
        let val = c.ratio(p, &g);
        if val > best_pga {
            best_pga = val;
            best_res = res;
        }
        if val > best_val {
            best_val = val;
            best_src = format!("restart[{k}]");
            best_g = Some(c.witness(p, &g));
        }
    }
    // normalised indicators χ_(0,t)
    let mut acc = 0.0;
    for (k, &e) in c.ends.iter().enumerate() {
        acc += c.mass[k];
        let val = acc / e.powf(1.0 / p);
        if val > best_val {
            best_val = val;
            best_src = format!("indicator[{k}]");
            best_g = Some(normalize(spec, &StepFunction::indicator(0.0, e).expect("positive end")));
        }
    }
    for (k, g) in extra.iter().enumerate() {
        let g = if g.is_non_increasing() { g.clone() } else { rearrangement(g) };
        if g.is_zero() {
            continue;
        }
        let g = normalize(spec, &g);
        let val = match f {
            Operand::Step(f) => f.product_integral(&g),
            Operand::Sampled(u) => u.pair_with_step(&g).unwrap_or(f64::INFINITY),
        };
        if val > best_val {
            best_val = val;
            best_src = format!("extra[{k}]");
            best_g = Some(g);
        }
    }
    DownNormResult {
        value: best_val,
        method: DownNormMethod::BruteForce,
        witness: best_g,
        source: best_src,
        discrete_optimum: optimum,
        gradient_gap: optimum - best_pga,
        stationarity: best_res,
    }
}

/// sup ∫ f* g* over ‖g‖_X ≤ 1, searched on a log grid of `candidates` cells over the support of f*.
pub fn pairing_supremum(spec: NormSpec, f: &StepFunction, candidates: usize) -> f64 {
    let fs = rearrangement(f);
    if fs.is_zero() {
        return 0.0;
    }
    let end = fs.support_end();
    let grid = Grid::log(end * 1e-6, end, candidates.max(2)).expect("valid range");
    down_norm_bruteforce(spec, &fs, &grid, &[]).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{associate_norm_exact, down_norm_sawyer};

    fn grid() -> Grid {
        Grid::log(1e-4, 10.0, 200).unwrap()
    }

    #[test]
    fn examples() {
        let chi = StepFunction::indicator(0.0, 1.0).unwrap();
        let r = down_norm_bruteforce(NormSpec::Lp(1.0), &chi, &grid(), &[]);
        assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
        let w = r.witness.unwrap();
        assert!(w.is_non_increasing() && ri_norm(NormSpec::Lp(1.0), &w) <= 1.0 + 1e-9);
        let z = down_norm_bruteforce(NormSpec::Lp(2.0), &StepFunction::zero(), &grid(), &[]);
        assert_eq!(z.value, 0.0);
        // L^∞: the integral
        let f = StepFunction::new(vec![1.0, 3.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(down_norm_bruteforce(NormSpec::Linf, &f, &grid(), &[]).value, 4.0);
    }

    #[test]
    fn non_increasing_inputs_reach_the_associate_norm() {
        let f = StepFunction::new(vec![0.5, 1.0, 3.0], vec![3.0, 2.0, 0.5]).unwrap();
        for p in [1.0, 1.5, 2.0, 4.0] {
            let spec = NormSpec::Lp(p);
            let r = down_norm_bruteforce(spec, &f, &grid(), &[]);
            let want = associate_norm_exact(spec, &f);
            assert!((r.value - want).abs() <= 1e-10 * want, "p={p}: {} vs {want}", r.value);
            assert!(r.gradient_gap.abs() <= 1e-9 * want, "{r:?}");
        }
    }

    #[test]
    fn p1_matches_sawyer_on_a_late_bump() {
        let f = StepFunction::new(vec![1.0, 2.0, 2.5], vec![0.0, 1.0, 4.0]).unwrap();
        let r = down_norm_bruteforce(NormSpec::Lp(1.0), &f, &grid(), &[]);
        let s = down_norm_sawyer(1.0, &f);
        assert!((r.value - s).abs() <= 1e-12 * s, "{} vs {s}", r.value);
    }

    #[test]
    fn random_restarts_climb() {
        // warm start disabled by taking the best of the random restarts only
        let f = StepFunction::new(vec![1.0, 2.0, 3.0], vec![1.0, 3.0, 0.5]).unwrap();
        let opts = BruteForceOptions { restarts: 5, max_iter: 2000, ..Default::default() };
        let c = build_cells(Operand::Step(&f), &grid());
        let (opt, _) = discrete_optimum(&c, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut v: Vec<f64> = (0..c.ends.len()).map(|_| rng.gen::<f64>()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        let (g, _) = ascend(&c, 2.0, v, &opts);
        assert!((c.ratio(2.0, &g) - opt).abs() <= 1e-6 * opt, "{} vs {opt}", c.ratio(2.0, &g));
    }

    #[test]
    fn extra_candidates_are_used() {
        // u = 1 on (0, 2] with a (2/t)² tail; the grid window stops at 2
        let g = Grid::from_points(vec![1.0, 2.0]).unwrap();
        let u = crate::funcrep::SampledFunction::new(g.clone(), vec![1.0, 1.0], crate::funcrep::Endpoint::power(0.0), crate::funcrep::Endpoint::power(-2.0)).unwrap();
        let r = down_norm_bruteforce(NormSpec::Lp(2.0), &u, &g, &[]);
        assert!((r.value - 2f64.sqrt()).abs() < 1e-12);
        // χ_(0,4)/2 also sees the tail: (2 + 1)/2
        let long = StepFunction::indicator(0.0, 4.0).unwrap();
        let r = down_norm_bruteforce(NormSpec::Lp(2.0), &u, &g, &[long]);
        assert!((r.value - 1.5).abs() < 1e-12 && r.source == "extra[0]", "{r:?}");
        // a non-monotone extra is replaced by its rearrangement χ_(0,3): (2 + 2/3)/√3
        let bump = StepFunction::new(vec![1.0, 4.0], vec![0.0, 1.0]).unwrap();
        let r = down_norm_bruteforce(NormSpec::Lp(2.0), &u, &g, &[bump]);
        assert!((r.value - 8.0 / 3.0 / 3f64.sqrt()).abs() < 1e-12, "{r:?}");
        assert!(r.witness.unwrap().is_non_increasing());
    }

    #[test]
    fn pairing_supremum_examples() {
        let chi = StepFunction::indicator(0.0, 1.0).unwrap();
        assert!((pairing_supremum(NormSpec::Lp(2.0), &chi, 64) - 1.0).abs() < 1e-2);
        assert!((pairing_supremum(NormSpec::Lp(1.0), &chi, 64) - 1.0).abs() < 1e-2);
        assert_eq!(pairing_supremum(NormSpec::Lp(2.0), &StepFunction::zero(), 64), 0.0);
    }
}
