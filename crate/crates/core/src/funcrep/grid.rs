use crate::error::{arg, Result};

/// Strictly increasing positive sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    /// `count` points spaced geometrically from `t_min` to `t_max` inclusive.
    pub fn log(t_min: f64, t_max: f64, count: usize) -> Result<Grid> {
        if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
            return arg(format!("need 0 < t_min < t_max < ∞ (got {t_min}, {t_max})"));
        }
        if count < 2 {
            return arg("grid needs at least two points");
        }
        let ratio = t_max / t_min;
        let n = (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| t_min * ratio.powf(i as f64 / n)).collect();
        points[0] = t_min;
        points[count - 1] = t_max;
        points.dedup();
        Grid::from_points(points)
    }

    pub fn from_points(points: Vec<f64>) -> Result<Grid> {
        if points.len() < 2 {
            return arg("grid needs at least two points");
        }
        let mut prev = 0.0;
        for &p in &points {
            if !(p > prev) || !p.is_finite() {
                return arg(format!("grid points must be positive, finite and strictly increasing (got {p})"));
            }
            prev = p;
        }
        Ok(Grid { points })
    }

    /// This grid plus the extra points that fall in (0, ∞).
    pub fn merged(&self, extra: &[f64]) -> Grid {
        let mut p: Vec<f64> = self
            .points
            .iter()
            .copied()
            .chain(extra.iter().copied().filter(|x| *x > 0.0 && x.is_finite()))
            .collect();
        p.sort_by(|a, b| a.total_cmp(b));
        p.dedup();
        Grid { points: p }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.points.binary_search_by(|p| p.total_cmp(&t)).ok()
    }
}

pub fn make_log_grid(t_min: f64, t_max: f64, count: usize) -> Result<Grid> {
    Grid::log(t_min, t_max, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let g = make_log_grid(1.0, 4.0, 3).unwrap();
        assert_eq!(g.points()[0], 1.0);
        assert!((g.points()[1] - 2.0).abs() < 1e-15);
        assert_eq!(g.points()[2], 4.0);
        assert_eq!(make_log_grid(1.0, 1.5, 2).unwrap().points(), &[1.0, 1.5]);
        assert!(make_log_grid(2.0, 1.0, 3).is_err());
        assert!(make_log_grid(1.0, 2.0, 1).is_err());
        assert!(make_log_grid(0.0, 2.0, 3).is_err());
    }

    #[test]
    fn merge_keeps_order() {
        let g = make_log_grid(1.0, 8.0, 4).unwrap().merged(&[3.0, 1.0, -1.0, 100.0]);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.len(), 6);
        assert_eq!(g.index_of(3.0), Some(2));
    }
}
