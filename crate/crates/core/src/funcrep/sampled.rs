use crate::error::{arg, Result};
use crate::funcrep::{Grid, StepFunction};

/// Behaviour of a sampled function outside the grid: identically zero, or
/// asymptotically `K·t^exponent·|ln t|^log_power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Zero,
    Power { exponent: f64, log_power: u32 },
}

impl Endpoint {
    pub fn power(exponent: f64) -> Endpoint {
        Endpoint::Power { exponent, log_power: 0 }
    }
}

/// One-sided limits at a grid point where the function jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub index: usize,
    pub left: f64,
    pub right: f64,
}

/// Values of a function at grid points. Between neighbouring points the
/// function is read as a power law through the two endpoint values (linear
/// when one of them vanishes); outside the grid the endpoint metadata applies.
/// A divergent sample is infinite everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
    divergent: bool,
    head: Endpoint,
    tail: Endpoint,
    jumps: Vec<Jump>,
    diagnostic: Option<String>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>, head: Endpoint, tail: Endpoint) -> Result<Self> {
        if values.len() != grid.len() {
            return arg("values length must match grid length");
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return arg("sampled values must be finite and non-negative");
        }
        Ok(SampledFunction { grid, values, divergent: false, head, tail, jumps: vec![], diagnostic: None })
    }

    pub fn divergent(grid: Grid, diagnostic: impl Into<String>) -> Self {
        let n = grid.len();
        SampledFunction {
            grid,
            values: vec![f64::INFINITY; n],
            divergent: true,
            head: Endpoint::Zero,
            tail: Endpoint::Zero,
            jumps: vec![],
            diagnostic: Some(diagnostic.into()),
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        SampledFunction::new(grid, vec![0.0; n], Endpoint::Zero, Endpoint::Zero).unwrap()
    }

    /// Records one-sided limits at grid points that are jump locations.
    pub fn with_jumps(mut self, mut jumps: Vec<Jump>) -> Result<Self> {
        jumps.sort_by_key(|j| j.index);
        for j in &jumps {
            if j.index >= self.grid.len() || !(j.left.is_finite() && j.right.is_finite()) {
                return arg("invalid jump record");
            }
        }
        self.jumps = jumps;
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_divergent(&self) -> bool {
        self.divergent
    }

    pub fn diagnostic(&self) -> Option<&str> {
        self.diagnostic.as_deref()
    }

    pub fn head(&self) -> Endpoint {
        self.head
    }

    pub fn tail(&self) -> Endpoint {
        self.tail
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn is_identically_zero(&self) -> bool {
        !self.divergent && self.values.iter().all(|v| *v == 0.0) && self.jumps.iter().all(|j| j.left == 0.0 && j.right == 0.0)
    }

    fn jump_at(&self, i: usize) -> Option<&Jump> {
        self.jumps.binary_search_by_key(&i, |j| j.index).ok().map(|k| &self.jumps[k])
    }

    /// Value used as the left end of cell i (the right limit at x_i).
    pub(crate) fn right_value(&self, i: usize) -> f64 {
        self.jump_at(i).map_or(self.values[i], |j| j.right)
    }

    /// Value used as the right end of cell i-1 (the left limit at x_i).
    pub(crate) fn left_value(&self, i: usize) -> f64 {
        self.jump_at(i).map_or(self.values[i], |j| j.left)
    }

    pub(crate) fn cell_model(&self, i: usize) -> Piece {
        let x = self.grid.points();
        Piece::through(x[i], x[i + 1], self.right_value(i), self.left_value(i + 1))
    }

    pub(crate) fn head_piece(&self) -> Option<Piece> {
        let x0 = self.grid.first();
        match self.head {
            Endpoint::Zero => None,
            Endpoint::Power { exponent, .. } => Some(Piece::Power { a: self.left_value(0), x0, beta: exponent }),
        }
    }

    pub(crate) fn tail_exponent(&self) -> Option<f64> {
        let n = self.grid.len();
        match self.tail {
            Endpoint::Zero => None,
            Endpoint::Power { exponent, log_power } => {
                // prefer the slope seen on the last cell when it is compatible
                let x = self.grid.points();
                let (a, b) = (self.right_value(n - 2), self.left_value(n - 1));
                if a > 0.0 && b > 0.0 && log_power > 0 {
                    let local = (b / a).ln() / (x[n - 1] / x[n - 2]).ln();
                    Some(local)
                } else {
                    Some(exponent)
                }
            }
        }
    }

    /// ∫_0^∞ u^q for q ≥ 1 (∞ when divergent or not integrable).
    pub fn integral_of_power(&self, q: f64) -> f64 {
        if self.divergent {
            return f64::INFINITY;
        }
        let n = self.grid.len();
        let x = self.grid.points();
        let mut s = 0.0;
        if let Some(Piece::Power { a, x0, beta }) = self.head_piece() {
            if a > 0.0 {
                if q * beta <= -1.0 {
                    return f64::INFINITY;
                }
                s += a.powf(q) * x0 / (q * beta + 1.0);
            }
        }
        for i in 0..n - 1 {
            s += self.cell_model(i).integral_pow(x[i], x[i + 1], q);
        }
        if let Some(beta) = self.tail_exponent() {
            let xn = self.grid.last();
            let a = self.left_value(n - 1);
            if a > 0.0 {
                let asym = match self.tail {
                    Endpoint::Power { exponent, .. } => exponent,
                    Endpoint::Zero => unreachable!(),
                };
                if q * asym >= -1.0 || q * beta >= -1.0 {
                    return f64::INFINITY;
                }
                s += a.powf(q) * xn / (-q * beta - 1.0);
            }
        }
        s
    }

    /// ∫ u^q over [x_0, x_n] only, ignoring the endpoint models.
    pub fn window_integral_of_power(&self, q: f64) -> f64 {
        if self.divergent {
            return f64::INFINITY;
        }
        let x = self.grid.points();
        (0..x.len() - 1).map(|i| self.cell_model(i).integral_pow(x[i], x[i + 1], q)).sum()
    }

    /// Largest value on [x_0, x_n], one-sided limits included.
    pub fn window_sup(&self) -> f64 {
        if self.divergent {
            return f64::INFINITY;
        }
        let m = self.values.iter().copied().fold(0.0, f64::max);
        self.jumps.iter().fold(m, |m, j| m.max(j.left).max(j.right))
    }

    /// ess sup.
    pub fn sup(&self) -> f64 {
        if self.divergent {
            return f64::INFINITY;
        }
        let has_mass = |k: usize| self.values[k] > 0.0;
        if let Endpoint::Power { exponent, log_power } = self.head {
            if has_mass(0) && (exponent < 0.0 || (exponent == 0.0 && log_power > 0)) {
                return f64::INFINITY;
            }
        }
        if let Endpoint::Power { exponent, log_power } = self.tail {
            if has_mass(self.grid.len() - 1) && (exponent > 0.0 || (exponent == 0.0 && log_power > 0)) {
                return f64::INFINITY;
            }
        }
        let mut m = self.values.iter().copied().fold(0.0, f64::max);
        for j in &self.jumps {
            m = m.max(j.left).max(j.right);
        }
        m
    }

    /// Running integrals F(x_i) = ∫_0^{x_i} u.
    pub fn cumulative(&self) -> Vec<f64> {
        let n = self.grid.len();
        let x = self.grid.points();
        let mut out = Vec::with_capacity(n);
        let mut acc = self.head_integral();
        out.push(acc);
        for i in 0..n - 1 {
            acc += self.cell_model(i).integral(x[i], x[i + 1]);
            out.push(acc);
        }
        out
    }

    /// ∫_0^{x_0} u.
    pub fn head_integral(&self) -> f64 {
        match self.head_piece() {
            Some(Piece::Power { a, x0, beta }) if a > 0.0 => {
                if beta <= -1.0 {
                    f64::INFINITY
                } else {
                    a * x0 / (beta + 1.0)
                }
            }
            _ => 0.0,
        }
    }

    /// ∫ u·v against a step function, splitting model cells at v's breakpoints.
    pub fn pair_with_step(&self, v: &StepFunction) -> Result<f64> {
        if self.divergent {
            return Err(crate::Error::Divergent("pairing with an infinite sampled function".into()));
        }
        if v.is_zero() {
            return Ok(0.0);
        }
        let x = self.grid.points();
        let n = x.len();
        let end = v.support_end();
        let mut s = 0.0;
        let add = |piece: &Piece, lo: f64, hi: f64| -> f64 {
            let mut acc = 0.0;
            for c in v.cells() {
                let a = c.start.max(lo);
                let b = c.end.min(hi);
                if b > a && c.value > 0.0 {
                    acc += c.value * piece.integral(a, b);
                }
            }
            acc
        };
        if let Some(p) = self.head_piece() {
            if let Piece::Power { a, beta, .. } = p {
                if a > 0.0 && beta <= -1.0 && v.value_at_zero() > 0.0 {
                    return Ok(f64::INFINITY);
                }
            }
            s += add(&p, 0.0, x[0]);
        }
        for i in 0..n - 1 {
            if x[i] >= end {
                break;
            }
            s += add(&self.cell_model(i), x[i], x[i + 1]);
        }
        if end > x[n - 1] {
            if let Some(beta) = self.tail_exponent() {
                let p = Piece::Power { a: self.left_value(n - 1), x0: x[n - 1], beta };
                s += add(&p, x[n - 1], end);
            }
        }
        Ok(s)
    }

    /// ∫ u over (0, b_0], (b_0, b_1], … for sorted positive `breaks`, in one sweep.
    pub fn integrals_over(&self, breaks: &[f64]) -> Vec<f64> {
        let nb = breaks.len();
        if self.divergent {
            return vec![f64::INFINITY; nb];
        }
        let mut out = vec![0.0; nb];
        let x = self.grid.points();
        let n = x.len();
        let mut k = 0;
        let mut visit = |piece: Piece, lo: f64, hi: f64| {
            let mut a = lo;
            while k < nb && a < hi {
                let e = hi.min(breaks[k]);
                if e > a {
                    out[k] += piece.integral(a, e);
                    a = e;
                }
                if breaks[k] <= hi {
                    k += 1;
                } else {
                    break;
                }
            }
        };
        if let Some(p) = self.head_piece() {
            visit(p, 0.0, x[0]);
        } else {
            // nothing below x_0: skip the breaks there
            visit(Piece::Linear { x0: 0.0, x1: x[0], a: 0.0, b: 0.0 }, 0.0, x[0]);
        }
        for i in 0..n - 1 {
            visit(self.cell_model(i), x[i], x[i + 1]);
        }
        if let (Some(beta), Some(&last)) = (self.tail_exponent(), breaks.last()) {
            if last > x[n - 1] {
                visit(Piece::Power { a: self.left_value(n - 1), x0: x[n - 1], beta }, x[n - 1], last);
            }
        }
        out
    }

    /// Pointwise value using the cell model (grid range only).
    pub fn interpolate(&self, t: f64) -> f64 {
        let x = self.grid.points();
        if t <= x[0] {
            return match self.head_piece() {
                Some(p) => p.eval(t),
                None => 0.0,
            };
        }
        let n = x.len();
        if t >= x[n - 1] {
            if t == x[n - 1] {
                return self.values[n - 1];
            }
            return match self.tail_exponent() {
                Some(beta) => Piece::Power { a: self.left_value(n - 1), x0: x[n - 1], beta }.eval(t),
                None => 0.0,
            };
        }
        let i = x.partition_point(|&p| p <= t) - 1;
        if x[i] == t {
            return self.values[i];
        }
        self.cell_model(i).eval(t)
    }
}

/// u(t) = a·(t/x0)^beta, or the straight line between two points.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Piece {
    Power { a: f64, x0: f64, beta: f64 },
    Linear { x0: f64, x1: f64, a: f64, b: f64 },
}

impl Piece {
    pub(crate) fn through(x0: f64, x1: f64, a: f64, b: f64) -> Piece {
        if a > 0.0 && b > 0.0 {
            Piece::Power { a, x0, beta: (b / a).ln() / (x1 / x0).ln() }
        } else {
            Piece::Linear { x0, x1, a, b }
        }
    }

    pub(crate) fn eval(&self, t: f64) -> f64 {
        match *self {
            Piece::Power { a, x0, beta } => a * (t / x0).powf(beta),
            Piece::Linear { x0, x1, a, b } => a + (b - a) * (t - x0) / (x1 - x0),
        }
    }

    /// ∫_lo^hi u.
    pub(crate) fn integral(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            Piece::Power { a, x0, beta } => power_integral(a, x0, beta, lo, hi, 1.0),
            Piece::Linear { .. } => 0.5 * (self.eval(lo) + self.eval(hi)) * (hi - lo),
        }
    }


    /// ∫_lo^hi u^q.
    pub(crate) fn integral_pow(&self, lo: f64, hi: f64, q: f64) -> f64 {
        match *self {
            Piece::Power { a, x0, beta } => power_integral(a, x0, beta, lo, hi, q),
            Piece::Linear { .. } => {
                let (ua, ub) = (self.eval(lo), self.eval(hi));
                let len = hi - lo;
                if ua == ub {
                    return len * ua.powf(q);
                }
                len * (ub.powf(q + 1.0) - ua.powf(q + 1.0)) / ((q + 1.0) * (ub - ua))
            }
        }
    }
}

/// ∫_lo^hi (a (t/x0)^beta)^q dt, stable as q·beta + 1 → 0.
pub(crate) fn power_integral(a: f64, x0: f64, beta: f64, lo: f64, hi: f64, q: f64) -> f64 {
    if hi <= lo || a == 0.0 {
        return 0.0;
    }
    if lo <= 0.0 {
        let e = q * beta + 1.0;
        if e <= 0.0 {
            return f64::INFINITY;
        }
        return a.powf(q) * (hi / x0).powf(q * beta) * hi / e;
    }
    let l = (hi / lo).ln();
    let z = (q * beta + 1.0) * l;
    let phi = if z.abs() < 1e-12 { 1.0 + 0.5 * z } else { z.exp_m1() / z };
    a.powf(q) * (lo / x0).powf(q * beta) * lo * l * phi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> f64, g: &Grid, head: Endpoint, tail: Endpoint) -> SampledFunction {
        let v = g.points().iter().map(|&t| f(t)).collect();
        SampledFunction::new(g.clone(), v, head, tail).unwrap()
    }

    #[test]
    fn power_law_data_integrates_exactly() {
        // u = min(t,1) on a grid containing 1: the model is exact
        let g = Grid::log(1e-3, 1e3, 61).unwrap().merged(&[1.0]);
        let u = sampled(|t| t.min(1.0), &g, Endpoint::power(1.0), Endpoint::Zero);
        let chi = StepFunction::indicator(0.0, 1.0).unwrap();
        assert!((u.pair_with_step(&chi).unwrap() - 0.5).abs() < 1e-12);
        let two = StepFunction::indicator(0.0, 2.0).unwrap();
        let one = sampled(|_| 1.0, &g, Endpoint::power(0.0), Endpoint::power(0.0));
        assert!((one.pair_with_step(&two).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(one.pair_with_step(&StepFunction::zero()).unwrap(), 0.0);
    }

    #[test]
    fn lq_integrals_with_tails() {
        // u = 1/t on [1, ∞), 1 on (0,1): ∫u^2 = 1 + 1 = 2
        let g = Grid::log(1e-2, 1e2, 81).unwrap().merged(&[1.0]);
        let u = sampled(|t| if t <= 1.0 { 1.0 } else { 1.0 / t }, &g, Endpoint::power(0.0), Endpoint::power(-1.0));
        assert!((u.integral_of_power(2.0) - 2.0).abs() < 1e-12);
        assert_eq!(u.integral_of_power(1.0), f64::INFINITY);
        assert_eq!(u.sup(), 1.0);
    }

    #[test]
    fn head_singularity_detected() {
        let g = Grid::log(1e-3, 1.0, 11).unwrap();
        let u = sampled(|t| t.powf(-0.6), &g, Endpoint::power(-0.6), Endpoint::Zero);
        assert!(u.integral_of_power(1.0).is_finite());
        assert_eq!(u.integral_of_power(2.0), f64::INFINITY);
        assert_eq!(u.sup(), f64::INFINITY);
        let exact = 1.0f64.powf(0.4) / 0.4;
        assert!((u.integral_of_power(1.0) - exact).abs() < 1e-12);
    }

    #[test]
    fn jumps_change_cell_ends() {
        let g = Grid::from_points(vec![1.0, 2.0, 3.0]).unwrap();
        let u = SampledFunction::new(g, vec![2.0, 2.0, 1.0], Endpoint::power(0.0), Endpoint::Zero)
            .unwrap()
            .with_jumps(vec![Jump { index: 1, left: 2.0, right: 1.0 }])
            .unwrap();
        // 2 on (0,2), 1 on (2,3)
        assert!((u.integral_of_power(1.0) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn divergent_is_infinite() {
        let g = Grid::log(1.0, 2.0, 3).unwrap();
        let u = SampledFunction::divergent(g, "test");
        assert!(u.is_divergent());
        assert_eq!(u.integral_of_power(2.0), f64::INFINITY);
        assert!(u.pair_with_step(&StepFunction::indicator(0.0, 1.0).unwrap()).is_err());
    }
}
