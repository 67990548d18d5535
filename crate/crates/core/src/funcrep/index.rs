use crate::error::{arg, Result};

/// I(t) = c·t^alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub c: f64,
    pub alpha: f64,
}

/// Non-decreasing piecewise-constant index. `I = values[i]` on
/// `(jumps[i-1], jumps[i]]`, the last value persisting to infinity.
/// `jump_values`, when present, overrides the value taken exactly at each
/// jump (a representative that differs from the left-continuous one on a
/// null set).
#[derive(Debug, Clone, PartialEq)]
pub struct StepIndex {
    jumps: Vec<f64>,
    values: Vec<f64>,
    jump_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndexFunction {
    PowerLaw(PowerLaw),
    Step(StepIndex),
}

impl PowerLaw {
    pub fn new(c: f64, alpha: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return arg(format!("power-law coefficient must be positive (got {c})"));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return arg(format!("power-law exponent must be non-negative (got {alpha})"));
        }
        Ok(PowerLaw { c, alpha })
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.alpha == 0.0 {
            self.c
        } else if self.alpha == 1.0 {
            self.c * t
        } else {
            self.c * t.powf(self.alpha)
        }
    }

    /// ∫_s^t r^{-alpha} dr / c, for 0 < s ≤ t.
    pub fn lambda(&self, s: f64, t: f64) -> f64 {
        if s >= t {
            return 0.0;
        }
        let a = self.alpha;
        if a == 1.0 {
            (t / s).ln() / self.c
        } else if a == 0.0 {
            (t - s) / self.c
        } else {
            let e = 1.0 - a;
            // s^e (exp(e ln(t/s)) − 1)/e keeps precision when s ≈ t
            s.powf(e) * (e * (t / s).ln()).exp_m1() / (e * self.c)
        }
    }
}

impl StepIndex {
    /// From breakpoints t_1 < … < t_n and values v_1 ≤ … ≤ v_n with I = v_i on
    /// (t_{i-1}, t_i]. The last value persists beyond t_n, so t_n itself only
    /// closes the table.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() != values.len() || values.is_empty() {
            return arg("step index needs equally many (≥ 1) breakpoints and values");
        }
        let mut prev = 0.0;
        for &t in &breaks {
            if !(t > prev) || t.is_nan() {
                return arg(format!("index breakpoints must be positive and strictly increasing (got {t})"));
            }
            prev = t;
        }
        let mut pv = 0.0;
        for &v in &values {
            if !(v > 0.0 && v.is_finite()) {
                return arg(format!("index values must be positive and finite (got {v})"));
            }
            if v < pv {
                return arg("index values must be non-decreasing");
            }
            pv = v;
        }
        let mut jumps = Vec::new();
        let mut vals = vec![values[0]];
        for i in 1..values.len() {
            if values[i] != values[i - 1] {
                jumps.push(breaks[i - 1]);
                vals.push(values[i]);
            }
        }
        Ok(StepIndex { jumps, values: vals, jump_values: None })
    }

    /// Attaches point values at the jumps; each must lie between the adjacent
    /// cell values so that I stays non-decreasing.
    pub fn with_jump_values(mut self, jv: Vec<f64>) -> Result<Self> {
        if jv.len() != self.jumps.len() {
            return arg("one point value per jump is required");
        }
        for (i, &v) in jv.iter().enumerate() {
            if !(v >= self.values[i] && v <= self.values[i + 1]) {
                return arg(format!("jump value {v} outside [{}, {}]", self.values[i], self.values[i + 1]));
            }
        }
        self.jump_values = Some(jv);
        Ok(self)
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn cell_values(&self) -> &[f64] {
        &self.values
    }

    pub fn jump_values(&self) -> Option<&[f64]> {
        self.jump_values.as_deref()
    }

    fn cell(&self, t: f64) -> usize {
        // first jump ≥ t: cells are left-open/right-closed
        self.jumps.partition_point(|&j| j < t)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.cell(t);
        if let Some(jv) = &self.jump_values {
            if i < self.jumps.len() && self.jumps[i] == t {
                return jv[i];
            }
        }
        self.values[i]
    }

    pub fn eval_left(&self, t: f64) -> f64 {
        self.values[self.cell(t)]
    }

    pub fn eval_right(&self, t: f64) -> f64 {
        self.values[self.jumps.partition_point(|&j| j <= t)]
    }

    /// Exact cell sum of ∫_s^t 1/I.
    pub fn lambda(&self, s: f64, t: f64) -> f64 {
        if s >= t {
            return 0.0;
        }
        let mut i = self.cell(s);
        let mut lo = s;
        let mut acc = 0.0;
        loop {
            let hi = if i < self.jumps.len() { self.jumps[i].min(t) } else { t };
            if hi > lo {
                acc += (hi - lo) / self.values[i];
            }
            if hi >= t {
                return acc;
            }
            lo = hi;
            i += 1;
        }
    }

    pub fn left_continuous(&self) -> StepIndex {
        StepIndex { jumps: self.jumps.clone(), values: self.values.clone(), jump_values: None }
    }
}

impl IndexFunction {
    pub fn power(c: f64, alpha: f64) -> Result<Self> {
        Ok(IndexFunction::PowerLaw(PowerLaw::new(c, alpha)?))
    }

    pub fn step(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(IndexFunction::Step(StepIndex::new(breaks, values)?))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            IndexFunction::PowerLaw(p) => p.eval(t),
            IndexFunction::Step(s) => s.eval(t),
        }
    }

    /// I(t−).
    pub fn eval_left(&self, t: f64) -> f64 {
        match self {
            IndexFunction::PowerLaw(p) => p.eval(t),
            IndexFunction::Step(s) => s.eval_left(t),
        }
    }

    /// I(t+).
    pub fn eval_right(&self, t: f64) -> f64 {
        match self {
            IndexFunction::PowerLaw(p) => p.eval(t),
            IndexFunction::Step(s) => s.eval_right(t),
        }
    }

    /// Λ(s, t) = ∫_s^t 1/I without argument checks (0 < s, any t).
    pub(crate) fn lambda(&self, s: f64, t: f64) -> f64 {
        match self {
            IndexFunction::PowerLaw(p) => p.lambda(s, t),
            IndexFunction::Step(st) => st.lambda(s, t),
        }
    }

    pub fn jumps(&self) -> &[f64] {
        match self {
            IndexFunction::PowerLaw(_) => &[],
            IndexFunction::Step(s) => s.jumps(),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            IndexFunction::PowerLaw(p) => Some(p.alpha),
            IndexFunction::Step(_) => None,
        }
    }

    pub fn is_left_continuous(&self) -> bool {
        match self {
            IndexFunction::PowerLaw(_) => true,
            IndexFunction::Step(s) => match &s.jump_values {
                None => true,
                Some(jv) => jv.iter().zip(&s.values).all(|(a, b)| a == b),
            },
        }
    }

    /// The left-continuous representative I_0.
    pub fn left_continuous(&self) -> IndexFunction {
        match self {
            IndexFunction::PowerLaw(p) => IndexFunction::PowerLaw(*p),
            IndexFunction::Step(s) => IndexFunction::Step(s.left_continuous()),
        }
    }

    /// k·I.
    pub fn scaled(&self, k: f64) -> Result<IndexFunction> {
        if !(k > 0.0 && k.is_finite()) {
            return arg("index scale must be positive");
        }
        Ok(match self {
            IndexFunction::PowerLaw(p) => IndexFunction::PowerLaw(PowerLaw::new(p.c * k, p.alpha)?),
            IndexFunction::Step(s) => IndexFunction::Step(StepIndex {
                jumps: s.jumps.clone(),
                values: s.values.iter().map(|v| v * k).collect(),
                jump_values: s.jump_values.as_ref().map(|j| j.iter().map(|v| v * k).collect()),
            }),
        })
    }

    /// Parses `power:c=<real>,alpha=<real>`; step indexes need a file and are
    /// handled by [`crate::funcrep::io::parse_index_spec`].
    pub fn parse_power(spec: &str) -> Result<IndexFunction> {
        let body = spec
            .strip_prefix("power:")
            .ok_or_else(|| crate::Error::Parse(format!("expected power:c=..,alpha=.. (got {spec})")))?;
        let mut c = None;
        let mut alpha = None;
        for kv in body.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| crate::Error::Parse(format!("malformed field {kv:?}")))?;
            let x: f64 = v.trim().parse().map_err(|_| crate::Error::Parse(format!("bad number {v:?}")))?;
            match k.trim() {
                "c" => c = Some(x),
                "alpha" => alpha = Some(x),
                other => return Err(crate::Error::Parse(format!("unknown field {other:?}"))),
            }
        }
        match (c, alpha) {
            (Some(c), Some(a)) => IndexFunction::power(c, a),
            _ => Err(crate::Error::Parse("power index needs both c and alpha".into())),
        }
    }
}

impl std::fmt::Display for IndexFunction {
    /// `power:c=..,alpha=..`, or a compact listing of a step index.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IndexFunction::PowerLaw(p) => write!(f, "power:c={},alpha={}", p.c, p.alpha),
            IndexFunction::Step(s) => {
                write!(f, "step:")?;
                for (k, v) in s.cell_values().iter().enumerate() {
                    match s.jumps().get(k) {
                        Some(t) => write!(f, "{v}@{t};")?,
                        None => write!(f, "{v}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// ∫_s^t 1/I(r) dr for 0 < s ≤ t.
pub fn reciprocal_index_integral(index: &IndexFunction, s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0) {
        return arg(format!("lower limit must be positive (got {s})"));
    }
    if !(t >= s) {
        return arg(format!("need s ≤ t (got s={s}, t={t})"));
    }
    Ok(index.lambda(s, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gl16;

    #[test]
    fn lambda_examples() {
        let i1 = IndexFunction::power(1.0, 1.0).unwrap();
        let v = reciprocal_index_integral(&i1, 1.0, std::f64::consts::E).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let two = IndexFunction::step(vec![1.0], vec![2.0]).unwrap();
        assert_eq!(reciprocal_index_integral(&two, 1.0, 4.0).unwrap(), 1.5);
        let i2 = IndexFunction::power(1.0, 2.0).unwrap();
        assert!((reciprocal_index_integral(&i2, 1.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(reciprocal_index_integral(&i2, 0.0, 2.0).is_err());
        assert!(reciprocal_index_integral(&i2, 2.0, 1.0).is_err());
    }

    #[test]
    fn lambda_matches_quadrature() {
        for alpha in [0.0, 0.3, 1.0, 1.7, 2.0, 3.5] {
            let idx = IndexFunction::power(1.3, alpha).unwrap();
            for (s, t) in [(1e-6, 1e-3), (0.5, 0.5000001), (1.0, 50.0), (2.0, 1e5)] {
                let q = gl16().integrate_graded(|r| 1.0 / idx.eval(r), s, t);
                let l = reciprocal_index_integral(&idx, s, t).unwrap();
                assert!((l - q).abs() <= 1e-10 * q, "alpha={alpha} s={s} t={t}: {l} vs {q}");
            }
        }
    }

    #[test]
    fn doubling_index_halves_lambda() {
        let p = IndexFunction::power(1.0, 1.5).unwrap();
        let s = IndexFunction::step(vec![1.0, 2.0, 3.0], vec![1.0, 3.0, 5.0]).unwrap();
        for idx in [p, s] {
            let d = idx.scaled(2.0).unwrap();
            for (a, b) in [(0.25, 0.75), (0.5, 2.5), (1.0, 7.0)] {
                assert_eq!(d.lambda(a, b), idx.lambda(a, b) / 2.0);
            }
        }
    }

    #[test]
    fn step_index_conventions() {
        let s = StepIndex::new(vec![1.0, 2.0], vec![1.0, 4.0]).unwrap();
        assert_eq!(s.eval(1.0), 1.0);
        assert_eq!(s.eval(1.0 + 1e-12), 4.0);
        assert_eq!(s.eval(100.0), 4.0);
        assert_eq!(s.eval_right(1.0), 4.0);
        let raw = s.clone().with_jump_values(vec![4.0]).unwrap();
        assert_eq!(raw.eval(1.0), 4.0);
        assert_eq!(raw.eval_left(1.0), 1.0);
        assert!(s.clone().with_jump_values(vec![5.0]).is_err());
        assert_eq!(s.lambda(0.5, 3.0), 0.5 + 2.0 / 4.0);
        assert!(StepIndex::new(vec![1.0, 2.0], vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn parse_power_spec() {
        let i = IndexFunction::parse_power("power:c=2,alpha=0.5").unwrap();
        assert_eq!(i, IndexFunction::power(2.0, 0.5).unwrap());
        assert!(IndexFunction::parse_power("power:c=2").is_err());
        assert!(IndexFunction::parse_power("power:c=-1,alpha=1").is_err());
        assert!(IndexFunction::parse_power("cosine:c=1,alpha=1").is_err());
    }
}
