use crate::error::{arg, Error, Result};
use crate::funcrep::IndexFunction;

/// Φ_I^m(t, s) = Λ(s,t)^{m−1} / I(t).
#[derive(Debug, Clone, PartialEq)]
pub struct PhiQuery {
    pub index: IndexFunction,
    pub order: u32,
}

impl PhiQuery {
    pub fn new(index: IndexFunction, order: u32) -> Result<Self> {
        if order < 1 {
            return arg("order m must be at least 1");
        }
        Ok(PhiQuery { index, order })
    }

    pub fn phi(&self, t: f64, s: f64) -> Result<f64> {
        if !(s > 0.0 && t >= s) {
            return arg("Φ needs 0 < s ≤ t");
        }
        Ok(self.index.lambda(s, t).powi(self.order as i32 - 1) / self.index.eval(t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EssentialDecreaseCertificate {
    pub s0: f64,
    pub t0: f64,
    /// Φ(·, s) is non-increasing on (t0, ∞) for every s < s0.
    pub monotone_beyond: bool,
    pub r_threshold: String,
}

/// Sign analysis of ∂Φ/∂t for power-law indexes; trivial for m = 1.
pub fn certify_essential_decrease(phi: &PhiQuery, s0: f64) -> Result<EssentialDecreaseCertificate> {
    if !(s0 > 0.0 && s0.is_finite()) {
        return arg("s0 must be positive and finite");
    }
    let m = phi.order;
    if m == 1 {
        return Ok(EssentialDecreaseCertificate {
            s0,
            t0: s0,
            monotone_beyond: true,
            r_threshold: "Φ = 1/I is non-increasing everywhere; r_t = t".into(),
        });
    }
    let alpha = match &phi.index {
        IndexFunction::PowerLaw(p) => p.alpha,
        IndexFunction::Step(_) => {
            return Err(Error::NoCertificate(format!("step index with m = {m} ≥ 2 is not certified")));
        }
    };
    let t0 = if alpha < 1.0 {
        return Err(Error::NoCertificate(format!("power law with alpha = {alpha} < 1 and m = {m} ≥ 2")));
    } else if alpha == 1.0 {
        s0 * ((m - 1) as f64).exp()
    } else {
        // smallest t ≥ s0 with (m−1) t^{1−α} ≤ α (s0^{1−α} − t^{1−α})/(α−1)
        let mf = (m - 1) as f64;
        let holds = |t: f64| {
            let u = t.powf(1.0 - alpha);
            mf * u <= alpha * (s0.powf(1.0 - alpha) - u) / (alpha - 1.0)
        };
        let mut hi = s0 * 2.0;
        while !holds(hi) {
            hi *= 2.0;
        }
        let mut lo = s0;
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        hi
    };
    Ok(EssentialDecreaseCertificate {
        s0,
        t0,
        monotone_beyond: true,
        r_threshold: "r_t = max(t, t0)".into(),
    })
}
