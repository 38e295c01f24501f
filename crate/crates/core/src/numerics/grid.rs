//! Evaluation grids over parameter intervals.

use crate::error::{Error, Result};

/// A strictly increasing set of evaluation points inside [lo, hi].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    lo: f64,
    hi: f64,
    points: Vec<f64>,
}

impl Grid {
    /// Uniform grid of `n` points on [lo, hi] endpoints included.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Grid> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!(
                "grid requires finite lo < hi, got ({lo}, {hi})"
            )));
        }
        if n < 2 {
            return Err(Error::domain("grid needs at least two points"));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let points = (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + i as f64 * step })
            .collect();
        Ok(Grid { lo, hi, points })
    }

    /// Uniform grid on the open interval (lo, hi), endpoints excluded.
    pub fn linspace_open(lo: f64, hi: f64, n: usize) -> Result<Grid> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!(
                "grid requires finite lo < hi, got ({lo}, {hi})"
            )));
        }
        if n < 1 {
            return Err(Error::domain("grid needs at least one point"));
        }
        let step = (hi - lo) / (n + 1) as f64;
        let points = (1..=n).map(|i| lo + i as f64 * step).collect();
        Ok(Grid { lo, hi, points })
    }

    /// Grid from explicit points; sorts and deduplicates.
    pub fn from_points(mut points: Vec<f64>) -> Result<Grid> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("grid points must be finite"));
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        points.dedup();
        if points.len() < 2 {
            return Err(Error::domain("grid needs at least two distinct points"));
        }
        let lo = points[0];
        let hi = *points.last().expect("non-empty");
        Ok(Grid { lo, hi, points })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
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
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints_and_order() {
        let g = Grid::linspace(0.0, 1.0, 11).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(*g.points().last().unwrap(), 1.0);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn open_grid_excludes_endpoints() {
        let g = Grid::linspace_open(0.0, 1.0, 9).unwrap();
        assert!(g.points()[0] > 0.0);
        assert!(*g.points().last().unwrap() < 1.0);
    }

    #[test]
    fn from_points_sorts_and_dedups() {
        let g = Grid::from_points(vec![3.0, 1.0, 2.0, 1.0]).unwrap();
        assert_eq!(g.points(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Grid::linspace(1.0, 1.0, 5).is_err());
        assert!(Grid::linspace(2.0, 1.0, 5).is_err());
    }
}
