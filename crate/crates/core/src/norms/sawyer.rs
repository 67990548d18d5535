use super::Operand;
use crate::funcrep::{Piece, SampledFunction, StepFunction};
use crate::quadrature::gl16;

/// The closed expressions for the down-associate norm of L^p:
/// p = 1 gives sup_t (1/t)∫_0^t f, which is exact;
/// p > 1 gives (∫ ((1/t)∫_0^t f)^{1/(p−1)} f)^{(p−1)/p}, which is only equivalent.
pub fn down_norm_sawyer<'a>(p: f64, f: impl Into<Operand<'a>>) -> f64 {
    assert!(p >= 1.0 && p.is_finite(), "exponent must lie in [1, ∞)");
    match f.into() {
        Operand::Step(f) => {
            if p == 1.0 {
                step_sup_average(f)
            } else {
                step_integral(p, f)
            }
        }
        Operand::Sampled(u) => {
            if u.is_divergent() {
                f64::INFINITY
            } else if p == 1.0 {
                sampled_sup_average(u)
            } else {
                sampled_integral(p, u)
            }
        }
    }
}

/// F(t)/t is monotone on every cell, so the sup sits at 0+ or at a breakpoint.
fn step_sup_average(f: &StepFunction) -> f64 {
    let mut best = f.value_at_zero();
    let mut acc = 0.0;
    for c in f.cells() {
        acc += c.value * c.len();
        best = best.max(acc / c.end);
    }
    best
}

fn step_integral(p: f64, f: &StepFunction) -> f64 {
    let r = 1.0 / (p - 1.0);
    let mut acc = 0.0;
    let mut total = 0.0;
    for c in f.cells() {
        let (a, b, v) = (c.start, c.end, c.value);
        if v > 0.0 {
            total += if a == 0.0 {
                v.powf(r + 1.0) * b
            } else {
                // F(t)/t = v + (F(a) − v a)/t on this cell
                let k = acc - v * a;
                v * gl16().integrate_graded(|t| (v + k / t).powf(r), a, b)
            };
        }
        acc += v * (b - a);
    }
    total.powf((p - 1.0) / p)
}

fn sampled_sup_average(u: &SampledFunction) -> f64 {
    let x = u.grid().points();
    let head = u.head_integral();
    if !head.is_finite() {
        return f64::INFINITY;
    }
    // u(0+) when the head is flat, and 0 or ∞ for other power heads
    let mut best = match u.head_piece() {
        Some(Piece::Power { a, beta, .. }) if a > 0.0 && beta < 0.0 => return f64::INFINITY,
        Some(Piece::Power { a, beta, .. }) if beta == 0.0 => a,
        _ => 0.0,
    };
    for (t, f) in x.iter().zip(u.cumulative()) {
        best = best.max(f / t);
    }
    best
}

fn sampled_integral(p: f64, u: &SampledFunction) -> f64 {
    let r = 1.0 / (p - 1.0);
    let x = u.grid().points();
    let n = x.len();
    let mut total = 0.0;
    // head: u = a (t/x0)^β, F(t)/t = u(t)/(β+1)
    if let Some(Piece::Power { a, x0, beta }) = u.head_piece() {
        if a > 0.0 {
            let e = beta * (r + 1.0) + 1.0;
            if beta <= -1.0 || e <= 0.0 {
                return f64::INFINITY;
            }
            total += (a / (beta + 1.0)).powf(r) * a * x0 / e;
        }
    }
    let cum = u.cumulative();
    for i in 0..n - 1 {
        let piece = u.cell_model(i);
        let (lo, hi) = (x[i], x[i + 1]);
        total += gl16().integrate(|t| (((cum[i] + piece.integral(lo, t)) / t).powf(r)) * piece.eval(t), lo, hi);
    }
    if let Some(beta) = u.tail_exponent() {
        let a = u.left_value(n - 1);
        if a > 0.0 {
            // asymptotic exponent of the integrand decides finiteness
            let asym = if beta >= -1.0 { beta * (r + 1.0) } else { beta - r };
            if asym >= -1.0 {
                return f64::INFINITY;
            }
            let piece = Piece::Power { a, x0: x[n - 1], beta };
            let mut f_lo = cum[n - 1];
            let mut lo = x[n - 1];
            let h = |t: f64, f_lo: f64, lo: f64| (((f_lo + piece.integral(lo, t)) / t).powf(r)) * piece.eval(t);
            let mut tail = 0.0;
            for _ in 0..200 {
                let hi = 2.0 * lo;
                let part = gl16().integrate(|t| h(t, f_lo, lo), lo, hi);
                tail += part;
                f_lo += piece.integral(lo, hi);
                lo = hi;
                if part <= 1e-17 * (total + tail) {
                    break;
                }
            }
            // power-law remainder beyond the last doubling
            tail += h(lo, f_lo, lo) * lo / (-asym - 1.0);
            total += tail;
        }
    }
    total.powf((p - 1.0) / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::{Endpoint, Grid};

    #[test]
    fn examples() {
        let chi = StepFunction::indicator(0.0, 1.0).unwrap();
        assert_eq!(down_norm_sawyer(1.0, &chi), 1.0);
        let late = StepFunction::indicator(1.0, 2.0).unwrap();
        assert_eq!(down_norm_sawyer(1.0, &late), 0.5);
        assert!((down_norm_sawyer(2.0, &chi) - 1.0).abs() < 1e-15);
        assert_eq!(down_norm_sawyer(3.0, &StepFunction::zero()), 0.0);
    }

    #[test]
    fn late_indicator_p2() {
        // f = χ_(1,2), p = 2: ∫_1^2 (1 − 1/t) dt = 1 − ln 2
        let late = StepFunction::indicator(1.0, 2.0).unwrap();
        let want = (1.0 - 2f64.ln()).sqrt();
        assert!((down_norm_sawyer(2.0, &late) - want).abs() < 1e-14);
    }

    #[test]
    fn sampled_matches_step() {
        // u = min(t,1)/t on a fine grid, sampled model is exact per cell
        let grid = Grid::log(1e-6, 1e6, 601).unwrap().merged(&[1.0]);
        let vals = grid.points().iter().map(|&t| if t <= 1.0 { 1.0 } else { 1.0 / t }).collect();
        let u = SampledFunction::new(grid, vals, Endpoint::power(0.0), Endpoint::power(-1.0)).unwrap();
        assert!((down_norm_sawyer(1.0, &u) - 1.0).abs() < 1e-15);
        // p = 2: ∫_0^1 1 + ∫_1^∞ (1 + ln t)/t² dt = 1 + 1 + 1
        let got = down_norm_sawyer(2.0, &u);
        assert!((got - 3f64.sqrt()).abs() < 1e-9, "{got}");
    }
}
