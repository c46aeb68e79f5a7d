//! Step-variable laws and the discrete random-walk engine.
//!
//! A walk observed on a time grid advances by `[n t_k] - [n t_{k-1}]` fresh
//! iid steps per grid interval; increments over disjoint intervals are
//! independent by construction.

use crate::stream::RandomStream;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("time grid must be nonempty")]
    Empty,
    #[error("time grid must start at a nonnegative time, got {0}")]
    NegativeStart(f64),
    #[error("time grid must be strictly increasing and finite at position {0}")]
    NotIncreasing(usize),
}

/// Mean-zero, unit-variance step laws with all moments finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepLaw {
    StandardGaussian,
    /// Uniform on {-1, +1}.
    Rademacher,
    /// Uniform on [-sqrt(3), sqrt(3)].
    UniformScaled,
}

impl StepLaw {
    #[inline]
    pub fn sample(self, rng: &mut RandomStream) -> f64 {
        match self {
            StepLaw::StandardGaussian => StandardNormal.sample(rng),
            StepLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            StepLaw::UniformScaled => {
                let r: f64 = rng.random();
                (2.0 * r - 1.0) * 3.0f64.sqrt()
            }
        }
    }
}

/// Strictly increasing observation times `t_0 < t_1 < ... < t_p`, `t_0 >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, GridError> {
        if points.is_empty() {
            return Err(GridError::Empty);
        }
        if !points[0].is_finite() || points[0] < 0.0 {
            return Err(GridError::NegativeStart(points[0]));
        }
        for k in 1..points.len() {
            if !points[k].is_finite() || points[k] <= points[k - 1] {
                return Err(GridError::NotIncreasing(k));
            }
        }
        Ok(TimeGrid { points })
    }

    #[inline]
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_time(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// Steps consumed per grid interval: `c_k = [n t_k] - [n t_{k-1}]` for
/// `k = 1..p`, one count per interval of a grid with `p + 1` points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepCounts {
    pub counts: Vec<u64>,
}

impl StepCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Floor of `n * t` robust against ties landing a hair below an integer.
#[inline]
pub fn scaled_floor(n: u64, t: f64) -> u64 {
    let x = n as f64 * t;
    let f = x.floor();
    if x - f > 1.0 - 1e-9 {
        f as u64 + 1
    } else {
        f as u64
    }
}

/// Number of fresh steps per grid interval at walk speed `n`.
pub fn step_counts(n: u64, grid: &TimeGrid) -> StepCounts {
    assert!(n >= 1, "walk speed must be >= 1");
    let mut counts = Vec::with_capacity(grid.len().saturating_sub(1));
    let mut prev = scaled_floor(n, grid.points()[0]);
    for &t in &grid.points()[1..] {
        let cur = scaled_floor(n, t);
        counts.push(cur - prev);
        prev = cur;
    }
    StepCounts { counts }
}

/// As [`step_counts`] but with the warm-up interval `[0, t_0]` prepended, so
/// a walk can be advanced from zero to every grid point: one count per grid
/// point.
pub fn step_counts_from_zero(n: u64, grid: &TimeGrid) -> StepCounts {
    assert!(n >= 1, "walk speed must be >= 1");
    let mut counts = Vec::with_capacity(grid.len());
    let mut prev = 0u64;
    for &t in grid.points() {
        let cur = scaled_floor(n, t);
        counts.push(cur - prev);
        prev = cur;
    }
    StepCounts { counts }
}

/// Walk increments over the grid intervals: `Delta_k` is the sum of
/// `counts[k]` fresh iid draws from `law`.
pub fn walk_increments(law: StepLaw, counts: &StepCounts, rng: &mut RandomStream) -> Vec<f64> {
    counts
        .counts
        .iter()
        .map(|&c| {
            let mut acc = 0.0;
            for _ in 0..c {
                acc += law.sample(rng);
            }
            acc
        })
        .collect()
}

/// Distributional shortcut for Gaussian steps: the sum of `c` standard
/// normals is drawn directly as one centered normal with variance `c`.
/// A zero count yields exactly 0.
pub fn gaussian_fastpath(counts: &StepCounts, rng: &mut RandomStream) -> Vec<f64> {
    counts
        .counts
        .iter()
        .map(|&c| gaussian_block(c, rng))
        .collect()
}

/// One centered Gaussian with variance `c`; 0 exactly when `c = 0`.
#[inline]
pub fn gaussian_block(c: u64, rng: &mut RandomStream) -> f64 {
    if c == 0 {
        0.0
    } else {
        let z: f64 = StandardNormal.sample(rng);
        (c as f64).sqrt() * z
    }
}
