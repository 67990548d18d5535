use crate::error::{arg, Result};
use crate::exact::{self, Exact};

/// Non-negative piecewise-constant function on (0, ∞) with bounded support.
///
/// `f = values[i]` on `[breaks[i-1], breaks[i])` with `breaks[-1] = 0`, and
/// `f = 0` from the last breakpoint on. Canonical: no two adjacent cells carry
/// the same value and the last cell is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

impl Cell {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() != values.len() {
            return arg("breakpoints and values differ in length");
        }
        let mut prev = 0.0;
        for &t in &breaks {
            if !t.is_finite() || t <= prev {
                return arg(format!("breakpoints must be finite, positive and strictly increasing (got {t} after {prev})"));
            }
            prev = t;
        }
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return arg(format!("values must be finite and non-negative (got {v})"));
            }
        }
        Ok(Self::canonical(breaks, values))
    }

    fn canonical(breaks: Vec<f64>, values: Vec<f64>) -> Self {
        let mut b: Vec<f64> = Vec::with_capacity(breaks.len());
        let mut v: Vec<f64> = Vec::with_capacity(values.len());
        for (t, x) in breaks.into_iter().zip(values) {
            if let Some(last) = v.last() {
                if *last == x {
                    *b.last_mut().unwrap() = t;
                    continue;
                }
            }
            b.push(t);
            v.push(x);
        }
        while v.last() == Some(&0.0) {
            v.pop();
            b.pop();
        }
        StepFunction { breaks: b, values: v }
    }

    pub fn zero() -> Self {
        StepFunction { breaks: vec![], values: vec![] }
    }

    /// χ_(a,b).
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::from_pieces(&[(a, b, 1.0)])
    }

    /// Σ v·χ_(a,b) over the given triples; overlaps add up.
    pub fn from_pieces(pieces: &[(f64, f64, f64)]) -> Result<Self> {
        let mut acc = StepFunction::zero();
        for &(a, b, v) in pieces {
            if !(a >= 0.0 && b > a && b.is_finite()) {
                return arg(format!("bad interval ({a}, {b})"));
            }
            let piece = if a > 0.0 {
                StepFunction::new(vec![a, b], vec![0.0, v])?
            } else {
                StepFunction::new(vec![b], vec![v])?
            };
            acc = acc.add(&piece);
        }
        Ok(acc)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_cells(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.breaks.iter().enumerate().map(move |(i, &end)| Cell {
            start: if i == 0 { 0.0 } else { self.breaks[i - 1] },
            end,
            value: self.values[i],
        })
    }

    /// Right end of the support, t_n (0 for the zero function).
    pub fn support_end(&self) -> f64 {
        self.breaks.last().copied().unwrap_or(0.0)
    }

    /// λ{f > 0}.
    pub fn support_measure(&self) -> f64 {
        self.cells().filter(|c| c.value > 0.0).map(|c| c.len()).sum()
    }

    /// f(0+).
    pub fn value_at_zero(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Start of the support: f vanishes on (0, leading_zero()).
    pub fn leading_zero(&self) -> f64 {
        match self.values.first() {
            Some(&v) if v == 0.0 => self.breaks[0],
            _ => 0.0,
        }
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// Index of the cell containing t (left-closed), or `num_cells()` beyond support.
    fn cell_index(&self, t: f64) -> usize {
        self.breaks.partition_point(|&b| b <= t)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return arg(format!("evaluation point must be positive (got {t})"));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        self.values.get(self.cell_index(t)).copied().unwrap_or(0.0)
    }

    /// ∫_a^b f, summing value × overlap per cell. `b` may be +∞.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        if !(a >= 0.0) || !(b >= a) {
            return arg(format!("need 0 ≤ a ≤ b (got a={a}, b={b})"));
        }
        let mut s = 0.0;
        for c in self.cells() {
            let lo = c.start.max(a);
            let hi = c.end.min(b);
            if hi > lo {
                s += c.value * (hi - lo);
            }
        }
        Ok(s)
    }

    /// ∫_a^b f in exact rational arithmetic. `b` may be +∞.
    pub fn integrate_exact(&self, a: f64, b: f64) -> Result<Exact> {
        if !(a >= 0.0) || !(b >= a) {
            return arg(format!("need 0 ≤ a ≤ b (got a={a}, b={b})"));
        }
        let mut s = exact::zero();
        for c in self.cells() {
            let lo = c.start.max(a);
            let hi = c.end.min(b);
            if hi > lo {
                s += exact::exact(c.value) * (exact::exact(hi) - exact::exact(lo));
            }
        }
        Ok(s)
    }

    pub fn scale(&self, k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return arg(format!("scale factor must be finite and non-negative (got {k})"));
        }
        let values = self.values.iter().map(|v| v * k).collect::<Vec<_>>();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(crate::Error::Overflow("scaled step function".into()));
        }
        Ok(Self::canonical(self.breaks.clone(), values))
    }

    /// Union of the breakpoint sets of two step functions.
    pub(crate) fn merged_breaks(&self, other: &StepFunction) -> Vec<f64> {
        let mut b: Vec<f64> = self.breaks.iter().chain(&other.breaks).copied().collect();
        b.sort_by(|x, y| x.total_cmp(y));
        b.dedup();
        b
    }

    /// Pointwise sum.
    pub fn add(&self, other: &StepFunction) -> StepFunction {
        self.combine(other, |x, y| x + y)
    }

    /// Pointwise maximum.
    pub fn max(&self, other: &StepFunction) -> StepFunction {
        self.combine(other, f64::max)
    }

    fn combine(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> StepFunction {
        let breaks = self.merged_breaks(other);
        let mut values = Vec::with_capacity(breaks.len());
        let mut lo = 0.0;
        for &hi in &breaks {
            let mid = lo; // cells are left-closed
            values.push(op(self.eval_unchecked(mid), other.eval_unchecked(mid)));
            lo = hi;
        }
        Self::canonical(breaks, values)
    }

    /// Pointwise comparison f ≤ g everywhere.
    pub fn le(&self, other: &StepFunction) -> bool {
        let breaks = self.merged_breaks(other);
        let mut lo = 0.0;
        for &hi in &breaks {
            let mid = lo; // cells are left-closed
            if self.eval_unchecked(mid) > other.eval_unchecked(mid) {
                return false;
            }
            lo = hi;
        }
        true
    }

    /// ∫ f·g over (0, ∞).
    pub fn product_integral(&self, other: &StepFunction) -> f64 {
        let breaks = self.merged_breaks(other);
        let mut s = 0.0;
        let mut lo = 0.0;
        for &hi in &breaks {
            let mid = lo; // cells are left-closed
            s += self.eval_unchecked(mid) * other.eval_unchecked(mid) * (hi - lo);
            lo = hi;
        }
        s
    }

    /// ∫ f·g in exact arithmetic.
    pub fn product_integral_exact(&self, other: &StepFunction) -> Exact {
        let (mut i, mut j) = (0usize, 0usize);
        let mut lo = 0.0f64;
        let mut s = exact::zero();
        while i < self.breaks.len() && j < other.breaks.len() {
            let hi = self.breaks[i].min(other.breaks[j]);
            let v = self.values[i];
            let w = other.values[j];
            if v > 0.0 && w > 0.0 {
                s += exact::exact(v) * exact::exact(w) * (exact::exact(hi) - exact::exact(lo));
            }
            if self.breaks[i] == hi {
                i += 1;
            }
            if other.breaks[j] == hi {
                j += 1;
            }
            lo = hi;
        }
        s
    }
}
