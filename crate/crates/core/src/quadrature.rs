//! Composite Gauss–Legendre rules with geometric grading toward the origin.

use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    /// Splits [a, b] (a > 0) into pieces with ratio at most 2.
    pub fn integrate_graded<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        if a <= 0.0 {
            return self.integrate(f, a, b);
        }
        let pieces = ((b / a).log2().ceil() as usize).max(1);
        let r = (b / a).powf(1.0 / pieces as f64);
        let mut s = 0.0;
        let mut lo = a;
        for k in 0..pieces {
            let hi = if k + 1 == pieces { b } else { lo * r };
            s += self.integrate(&mut f, lo, hi);
            lo = hi;
        }
        s
    }

    /// ∫_0^b f for an integrand behaving like t^beta near 0 (beta > -1 up to
    /// a log factor). Dyadic pieces toward 0, then the analytic power tail.
    pub fn integrate_from_zero<F: FnMut(f64) -> f64>(&self, mut f: F, b: f64, beta: f64) -> f64 {
        let mut total = 0.0;
        let mut hi = b;
        for _ in 0..1100 {
            let lo = hi * 0.5;
            let piece = self.integrate(&mut f, lo, hi);
            total += piece;
            hi = lo;
            let tail = f(hi).abs() * hi / (beta + 1.0).max(1e-3);
            if tail <= 1e-17 * total.abs() || hi < 1e-300 {
                return total + f(hi) * hi / (beta + 1.0).max(1e-3);
            }
        }
        total
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_polynomials_exact() {
        for n in [1, 2, 5, 16, 20] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
            let deg = 2 * n - 1;
            let v = g.integrate(|x| x.powi(deg as i32) + 1.0, 0.0, 1.0);
            assert!((v - (1.0 / (deg as f64 + 1.0) + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_integrand_from_zero() {
        // ∫_0^1 s^{-1/2} = 2, ∫_0^1 ln(1/s) = 1
        let v = gl16().integrate_from_zero(|s| s.powf(-0.5), 1.0, -0.5);
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        let w = gl16().integrate_from_zero(|s| (1.0 / s).ln(), 1.0, 0.0);
        assert!((w - 1.0).abs() < 1e-12, "{w}");
    }

    #[test]
    fn graded_log() {
        let v = gl16().integrate_graded(|s| 1.0 / s, 1e-6, 1e6);
        assert!((v - (1e12f64).ln()).abs() < 1e-12);
    }
}
