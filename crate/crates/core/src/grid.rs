use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Strictly increasing evaluation grid on the real line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub const DEFAULT_HALF_WIDTH: f64 = 20.0;
    pub const DEFAULT_POINTS: usize = 4001;

    /// `n` equally spaced points on `[min, max]`, computed as convex
    /// combinations of the ends. A grid with `min = -max` is mirrored so it
    /// is exactly symmetric and contains 0 when `n` is odd.
    pub fn uniform(min: f64, max: f64, n: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::InvalidGrid(format!("bad range [{min}, {max}]")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        let last = (n - 1) as f64;
        let mut points: Vec<f64> = (0..n)
            .map(|i| {
                let w = i as f64 / last;
                min * (1.0 - w) + max * w
            })
            .collect();
        if min == -max {
            for i in 0..n / 2 {
                points[n - 1 - i] = -points[i];
            }
            if n % 2 == 1 {
                points[n / 2] = 0.0;
            }
        }
        Ok(Self { points })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::uniform(-half_width, half_width, n)
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid("non-finite grid point".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
        }
        Ok(Self { points })
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

    /// Index of the grid point equal to 0, if any.
    pub fn zero_index(&self) -> Option<usize> {
        self.points.iter().position(|&p| p == 0.0)
    }
}

impl Default for Grid {
    /// `[-20, 20]` with 4001 points.
    fn default() -> Self {
        Self::symmetric(Self::DEFAULT_HALF_WIDTH, Self::DEFAULT_POINTS).expect("valid default grid")
    }
}

/// Complex values sampled on a grid, with per-point error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub t: Vec<f64>,
    pub values: Vec<Complex64>,
    pub errors: Vec<f64>,
}

impl Sampled {
    /// Largest pointwise distance to another sample on the same grid.
    pub fn sup_distance(&self, other: &Sampled) -> f64 {
        assert_eq!(self.t.len(), other.t.len(), "samples on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }
}
