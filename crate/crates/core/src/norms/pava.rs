/// Weighted least-squares non-increasing fit of `y` (pool adjacent violators).
pub fn pava_non_increasing(y: &[f64], w: &[f64]) -> Vec<f64> {
    assert_eq!(y.len(), w.len());
    // blocks of (weighted sum, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(y.len());
    for (&yi, &wi) in y.iter().zip(w) {
        let mut cur = (yi * wi, wi, 1usize);
        while let Some(&(s, ww, n)) = blocks.last() {
            if s / ww < cur.0 / cur.1 {
                blocks.pop();
                cur = (s + cur.0, ww + cur.1, n + cur.2);
            } else {
                break;
            }
        }
        blocks.push(cur);
    }
    let mut out = Vec::with_capacity(y.len());
    for (s, ww, n) in blocks {
        out.extend(std::iter::repeat(s / ww).take(n));
    }
    out
}

/// Weighted L² projection onto {g non-increasing, g ≥ 0}.
pub fn project_monotone_cone(y: &[f64], w: &[f64]) -> Vec<f64> {
    let mut g = pava_non_increasing(y, w);
    for v in &mut g {
        *v = v.max(0.0);
    }
    g
}
