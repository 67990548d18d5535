use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{arg, Result};
use crate::funcrep::io::format_step_csv;
use crate::funcrep::StepFunction;

/// Random step functions with dyadic data: breakpoints are multiples of
/// 1/`denominator`, values multiples of 1/`value_denominator`, so every
/// length and product is exact in binary floating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSpec {
    pub seed: u64,
    pub count: usize,
    /// Inclusive range for the number of cells.
    pub cells: (usize, usize),
    /// Inclusive range for the support end s_f.
    pub support: (f64, f64),
    pub value_max: f64,
    pub denominator: u32,
    pub value_denominator: u32,
    /// Probability that a cell is zero (never the whole function).
    pub zero_fraction: f64,
    /// Sort the cell values so every sample is non-increasing.
    pub non_increasing: bool,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            seed: 0,
            count: 50,
            cells: (1, 8),
            support: (0.5, 8.0),
            value_max: 4.0,
            denominator: 64,
            value_denominator: 16,
            zero_fraction: 0.2,
            non_increasing: false,
        }
    }
}

impl EnsembleSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.cells;
        if lo == 0 || hi < lo {
            return arg("cell range must satisfy 1 ≤ min ≤ max");
        }
        let (a, b) = self.support;
        if !(a > 0.0 && b >= a && b.is_finite()) {
            return arg("support range must satisfy 0 < min ≤ max < ∞");
        }
        if (b * self.denominator as f64).floor() < hi as f64 {
            return arg("support too short for the requested cell count at this resolution");
        }
        if !(self.value_max > 0.0 && self.value_max.is_finite()) || self.denominator == 0 || self.value_denominator == 0 {
            return arg("value_max and denominators must be positive");
        }
        if !(0.0..1.0).contains(&self.zero_fraction) {
            return arg("zero_fraction must lie in [0, 1)");
        }
        Ok(())
    }

    /// Independent stream per sample index, so any subset can be regenerated.
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    pub fn sample(&self, index: usize) -> StepFunction {
        random_step(&mut self.rng(index), self)
    }

    pub fn samples(&self) -> Vec<StepFunction> {
        (0..self.count).map(|i| self.sample(i)).collect()
    }
}

pub fn random_step(rng: &mut impl Rng, spec: &EnsembleSpec) -> StepFunction {
    let den = spec.denominator as f64;
    let vden = spec.value_denominator as f64;
    let n = rng.gen_range(spec.cells.0..=spec.cells.1);
    let lo = (spec.support.0 * den).ceil().max(n as f64) as u64;
    let hi = ((spec.support.1 * den).floor() as u64).max(lo);
    let end = rng.gen_range(lo..=hi);
    // n − 1 distinct interior cut points in (0, end)
    let mut cuts = std::collections::BTreeSet::new();
    while cuts.len() + 1 < n {
        cuts.insert(rng.gen_range(1..end));
    }
    let mut breaks: Vec<f64> = cuts.into_iter().map(|k| k as f64 / den).collect();
    breaks.push(end as f64 / den);
    let vmax = (spec.value_max * vden).floor().max(1.0) as u64;
    let mut values: Vec<f64> = (0..n)
        .map(|_| if rng.gen::<f64>() < spec.zero_fraction { 0.0 } else { rng.gen_range(1..=vmax) as f64 / vden })
        .collect();
    // the last cell carries mass so the support end is exactly `end`
    if *values.last().unwrap() == 0.0 {
        *values.last_mut().unwrap() = rng.gen_range(1..=vmax) as f64 / vden;
    }
    if spec.non_increasing {
        values.sort_by(|a, b| b.total_cmp(a));
    }
    StepFunction::new(breaks, values).expect("dyadic data is valid")
}

/// Hex SHA-256 of the canonical CSV form, truncated to 16 digits.
pub fn digest(f: &StepFunction) -> String {
    digest_text(&format_step_csv(f))
}

pub fn digest_text(text: &str) -> String {
    let h = Sha256::digest(text.as_bytes());
    h.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_dyadic_and_reproducible() {
        let spec = EnsembleSpec::default().with_seed(7).with_count(40);
        spec.validate().unwrap();
        let a = spec.samples();
        assert_eq!(a, spec.samples());
        assert_eq!(a[5], spec.sample(5));
        for f in &a {
            assert!(!f.is_zero());
            assert!(f.num_cells() <= 8);
            for &t in f.breakpoints() {
                assert_eq!((t * 64.0).fract(), 0.0);
            }
            for &v in f.values() {
                assert_eq!((v * 16.0).fract(), 0.0);
                assert!(v <= 4.0);
            }
            let s = f.support_end();
            assert!((0.5..=8.0).contains(&s));
        }
        assert_ne!(a[0], EnsembleSpec::default().with_seed(8).sample(0));
    }

    #[test]
    fn digests() {
        let f = StepFunction::indicator(0.0, 1.0).unwrap();
        assert_eq!(digest(&f), digest(&f.clone()));
        assert_eq!(digest(&f).len(), 16);
        assert_ne!(digest(&f), digest(&f.scale(2.0).unwrap()));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(EnsembleSpec { cells: (0, 3), ..Default::default() }.validate().is_err());
        assert!(EnsembleSpec { support: (2.0, 1.0), ..Default::default() }.validate().is_err());
        assert!(EnsembleSpec { zero_fraction: 1.0, ..Default::default() }.validate().is_err());
    }
}
