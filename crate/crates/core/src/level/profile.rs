use std::fmt::Write as _;

use super::certificate::{certify_essential_decrease, EssentialDecreaseCertificate, PhiQuery};
use crate::error::{Error, Result};
use crate::funcrep::io::fmt17;
use crate::funcrep::{Endpoint, Grid, Jump, SampledFunction, StepFunction};
use crate::kernelops::{apply_r, KernelQuery};
use crate::rearrange::rearrangement;

/// Relative gap that puts a point into E.
pub const TOL_E: f64 = 1e-9;

/// The open set E = {R f* < G} as sorted disjoint intervals with plateau values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalDecomposition {
    pub intervals: Vec<(f64, f64)>,
    pub plateau_values: Vec<f64>,
}

impl IntervalDecomposition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(intervals: Vec<(f64, f64)>, plateau_values: Vec<f64>) -> Result<Self> {
        if intervals.len() != plateau_values.len() {
            return Err(Error::InvalidArgument("one plateau value per interval".into()));
        }
        let mut prev = 0.0;
        for &(c, d) in &intervals {
            if !(c >= prev && d > c && d.is_finite()) {
                return Err(Error::InvalidArgument(format!("intervals must be sorted, disjoint and bounded (got ({c}, {d}))")));
            }
            prev = d;
        }
        Ok(IntervalDecomposition { intervals, plateau_values })
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    /// The interval containing t, if any.
    pub fn containing(&self, t: f64) -> Option<usize> {
        let k = self.intervals.partition_point(|&(_, d)| d <= t);
        (k < self.intervals.len() && self.intervals[k].0 < t).then_some(k)
    }

    /// TSV with columns c_k, d_k, plateau_value.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("c_k\td_k\tplateau_value\n");
        for (&(c, d), v) in self.intervals.iter().zip(&self.plateau_values) {
            let _ = writeln!(s, "{}\t{}\t{}", fmt17(c), fmt17(d), fmt17(*v));
        }
        s
    }
}

/// Everything derived from R f* on one grid.
#[derive(Debug, Clone)]
pub struct LevelAnalysis {
    pub fstar: StepFunction,
    pub certificate: Option<EssentialDecreaseCertificate>,
    pub r: SampledFunction,
    pub g: SampledFunction,
    pub decomposition: IntervalDecomposition,
}

impl LevelAnalysis {
    pub fn is_divergent(&self) -> bool {
        self.r.is_divergent()
    }
}

struct Profile {
    pts: Vec<f64>,
    r: Vec<f64>,
    r_left: Vec<f64>,
    r_right: Vec<f64>,
    is_jump: Vec<bool>,
    g: Vec<f64>,
}

fn build_profile(q: &KernelQuery, fs: &StepFunction, grid: &Grid, tail_from: f64) -> Result<Profile> {
    let (lo, hi) = (grid.first(), grid.last());
    let idx = q.index();
    let mut extra: Vec<f64> = fs
        .breakpoints()
        .iter()
        .chain(idx.jumps())
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    let mut t = hi;
    while t <= tail_from {
        t *= 2.0;
        extra.push(t);
    }
    let pts = grid.merged(&extra).points().to_vec();
    let n = pts.len();
    let (mut r, mut r_left, mut r_right, mut is_jump) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![false; n]);
    let jumps = idx.jumps();
    for (j, &t) in pts.iter().enumerate() {
        let s = q.inner(fs, t);
        r[j] = crate::error::finite(s / idx.eval(t), "R_I^m f*")?;
        is_jump[j] = jumps.binary_search_by(|x| x.total_cmp(&t)).is_ok();
        if is_jump[j] {
            r_left[j] = s / idx.eval_left(t);
            r_right[j] = s / idx.eval_right(t);
        } else {
            r_left[j] = r[j];
            r_right[j] = r[j];
        }
    }
    // running maximum from the right; beyond the last point R is non-increasing
    let mut g = vec![0.0; n];
    g[n - 1] = r[n - 1];
    for j in (0..n - 1).rev() {
        g[j] = r[j].max(r_left[j + 1]).max(g[j + 1]);
    }
    Ok(Profile { pts, r, r_left, r_right, is_jump, g })
}

/// R f*, G f and the plateau decomposition on `grid`.
pub fn level_analysis(q: &KernelQuery, f: &StepFunction, grid: &Grid) -> Result<LevelAnalysis> {
    let fs = rearrangement(f);
    if fs.is_zero() {
        return Ok(LevelAnalysis {
            fstar: fs,
            certificate: None,
            r: SampledFunction::zeros(grid.clone()),
            g: SampledFunction::zeros(grid.clone()),
            decomposition: IntervalDecomposition::empty(),
        });
    }
    let s0 = fs.support_end();
    let cert = certify_essential_decrease(&PhiQuery::new(q.index().clone(), q.order())?, s0)?;
    let r = apply_r(q, &fs, grid)?;
    if r.is_divergent() {
        let g = SampledFunction::divergent(grid.clone(), r.diagnostic().unwrap_or("divergent").to_string());
        return Ok(LevelAnalysis { fstar: fs, certificate: Some(cert), r, g, decomposition: IntervalDecomposition::empty() });
    }
    let p = build_profile(q, &fs, grid, cert.t0.max(s0))?;

    // G on the grid, with one-sided limits at jumps of I
    let mut values = Vec::with_capacity(grid.len());
    let mut jumps = Vec::new();
    for (i, &t) in grid.points().iter().enumerate() {
        let j = p.pts.binary_search_by(|x| x.total_cmp(&t)).expect("grid point in profile");
        values.push(p.g[j]);
        if p.is_jump[j] {
            let right = p.r_right[j].max(p.r_left[j + 1]).max(p.g[j + 1]);
            jumps.push(Jump { index: i, left: p.r_left[j].max(p.g[j]), right });
        }
    }
    let (head, tail) = q.r_endpoints(&fs);
    let head = match head {
        Endpoint::Power { exponent, log_power } if exponent < 0.0 => Endpoint::Power { exponent, log_power },
        Endpoint::Power { .. } => Endpoint::power(0.0),
        Endpoint::Zero => Endpoint::Zero,
    };
    let g = SampledFunction::new(grid.clone(), values, head, tail)?.with_jumps(jumps)?;
    let decomposition = decompose(q, &fs, &p);
    Ok(LevelAnalysis { fstar: fs, certificate: Some(cert), r, g, decomposition })
}

fn decompose(q: &KernelQuery, fs: &StepFunction, p: &Profile) -> IntervalDecomposition {
    let n = p.pts.len();
    let in_e: Vec<bool> = (0..n).map(|j| p.r[j] < p.g[j] - TOL_E * p.g[j]).collect();
    let mut intervals = Vec::new();
    let mut plateaus = Vec::new();
    let mut j = 0;
    while j < n {
        if !in_e[j] {
            j += 1;
            continue;
        }
        let start = j;
        while j < n && in_e[j] {
            j += 1;
        }
        // the last point seeds G = R, so a run always ends inside the profile
        let level = p.g[start];
        let d = p.pts[j];
        let c = if start == 0 {
            0.0
        } else {
            refine_left_end(q, fs, p.pts[start - 1], p.pts[start], level)
        };
        intervals.push((c, d));
        plateaus.push(level);
    }
    IntervalDecomposition { intervals, plateau_values: plateaus }
}

/// Bisection for the point in (a, b) where R f* rises through the plateau level.
fn refine_left_end(q: &KernelQuery, fs: &StepFunction, mut a: f64, mut b: f64, level: f64) -> f64 {
    let below = |t: f64| q.inner(fs, t) / q.index().eval(t) < level - TOL_E * level;
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if below(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    a
}

/// G_I^m f = sup_{s ≥ t} R_I^m f*(s) on the grid.
pub fn apply_g(q: &KernelQuery, f: &StepFunction, grid: &Grid) -> Result<SampledFunction> {
    Ok(level_analysis(q, f, grid)?.g)
}

/// Maximal intervals of E with their plateau values.
pub fn decompose_plateaus(q: &KernelQuery, f: &StepFunction, grid: &Grid) -> Result<IntervalDecomposition> {
    let a = level_analysis(q, f, grid)?;
    if a.is_divergent() {
        return Err(Error::Divergent(a.r.diagnostic().unwrap_or("R f* is infinite").to_string()));
    }
    Ok(a.decomposition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::IndexFunction;

    fn q(alpha: f64, m: u32) -> KernelQuery {
        KernelQuery::new(IndexFunction::power(1.0, alpha).unwrap(), m).unwrap()
    }

    fn chi() -> StepFunction {
        StepFunction::indicator(0.0, 1.0).unwrap()
    }

    #[test]
    fn g_examples() {
        let grid = Grid::log(1e-3, 1e3, 121).unwrap();
        let g = apply_g(&q(0.0, 1), &chi(), &grid).unwrap();
        assert!(g.values().iter().all(|v| (*v - 1.0).abs() < 1e-15));
        let g = apply_g(&q(1.0, 1), &chi(), &grid).unwrap();
        for (t, v) in grid.points().iter().zip(g.values()) {
            let want = if *t <= 1.0 { 1.0 } else { 1.0 / t };
            assert!((v - want).abs() <= 1e-14 * want);
        }
        let g = apply_g(&q(1.0, 2), &StepFunction::zero(), &grid).unwrap();
        assert!(g.is_identically_zero());
    }

    #[test]
    fn decomposition_examples() {
        let grid = Grid::log(1e-3, 1e3, 121).unwrap();
        let d = decompose_plateaus(&q(0.0, 1), &chi(), &grid).unwrap();
        assert_eq!(d.intervals, vec![(0.0, 1.0)]);
        assert_eq!(d.plateau_values, vec![1.0]);
        assert!(decompose_plateaus(&q(1.0, 1), &chi(), &grid).unwrap().is_empty());
        assert!(decompose_plateaus(&q(1.0, 1), &StepFunction::zero(), &grid).unwrap().is_empty());
        assert!(d.to_tsv().starts_with("c_k\td_k\tplateau_value\n"));
    }

    #[test]
    fn unsupported_and_divergent() {
        let grid = Grid::log(1e-2, 1e2, 21).unwrap();
        assert!(matches!(apply_g(&q(0.0, 2), &chi(), &grid), Err(Error::NoCertificate(_))));
        let g = apply_g(&q(2.0, 2), &chi(), &grid).unwrap();
        assert!(g.is_divergent());
        assert!(matches!(decompose_plateaus(&q(2.0, 2), &chi(), &grid), Err(Error::Divergent(_))));
    }

    #[test]
    fn interior_plateau_left_end_refined() {
        // a jump of I makes R f* drop, opening a plateau that starts at the jump
        let f = StepFunction::new(vec![1.0, 2.0, 4.0], vec![1.0, 0.25, 2.0]).unwrap();
        let idx = IndexFunction::step(vec![1.0, 3.0], vec![1.0, 4.0]).unwrap();
        let qq = KernelQuery::new(idx, 1).unwrap();
        let grid = Grid::log(1e-2, 1e2, 201).unwrap();
        let a = level_analysis(&qq, &f, &grid).unwrap();
        assert_eq!(a.decomposition.len(), 2);
        assert_eq!(a.decomposition.intervals[1].0, 1.0);
        assert_eq!(a.decomposition.intervals[1].1, 4.0);
        for (k, &(c, d)) in a.decomposition.intervals.iter().enumerate() {
            let level = a.decomposition.plateau_values[k];
            let rd = qq.r_value(&a.fstar, d).unwrap().to_f64();
            assert!((rd - level).abs() <= 1e-12 * level);
            if c > 0.0 {
                // R reaches the level at c (continuously or by a downward jump) and is below it just after
                let rc = qq.r_value(&a.fstar, c).unwrap().to_f64();
                assert!(rc >= level * (1.0 - 1e-9), "{rc} vs {level}");
                let after = qq.r_value(&a.fstar, c * (1.0 + 1e-6)).unwrap().to_f64();
                assert!(after < level);
            }
        }
    }
}
