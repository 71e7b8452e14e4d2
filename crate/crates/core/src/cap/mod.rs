//! Absorbing-potential sweeps: spectra of `P - iεx²` along a decreasing
//! schedule of ε, linked into trajectories whose stable points estimate
//! resonances, plus the cross-check against the distorted operator.

mod compare;
mod sweep;
mod track;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use compare::{
    cluster_estimates, compare_with_distortion, resolvent_probe, resonances_via_distortion, Cluster, ComparisonReport,
    MatchedPair, ProbeTable,
};
pub use sweep::{sweep, windowed_spectrum, CapProblem, SolverConfig, StepFailure, StepSummary, SweepOutcome};
pub use track::{
    link_spectra, stabilize, ResonanceEstimate, StabilizeOptions, Trajectory, TrajectoryPoint, TrajectoryStatus,
};

/// `ε_j = eps0 · ratio^j` for `j < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonSchedule {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self {
            eps0: 0.5,
            ratio: 0.6,
            count: 20,
        }
    }
}

impl EpsilonSchedule {
    pub fn new(eps0: f64, ratio: f64, count: usize) -> Result<Self> {
        let s = Self { eps0, ratio, count };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(invalid("eps0", format!("must be positive, got {}", self.eps0)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(invalid("ratio", format!("must lie in (0, 1), got {}", self.ratio)));
        }
        if self.count < 3 {
            return Err(invalid("count", format!("need at least 3 steps, got {}", self.count)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.eps0 * self.ratio.powi(j as i32)).collect()
    }

    /// Twice as many steps over the same range: every old value is kept and
    /// a geometric midpoint is inserted between neighbours.
    pub fn refined(&self) -> Self {
        Self {
            eps0: self.eps0,
            ratio: self.ratio.sqrt(),
            count: 2 * self.count - 1,
        }
    }
}

/// `re_min ≤ Re z ≤ re_max`, `im_min < Im z ≤ im_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let w = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(invalid("window", "bounds must be finite"));
        }
        if self.re_min >= self.re_max {
            return Err(invalid(
                "re_min",
                format!("need re_min < re_max, got {} >= {}", self.re_min, self.re_max),
            ));
        }
        if self.im_min >= self.im_max {
            return Err(invalid(
                "im_min",
                format!("need im_min < im_max, got {} >= {}", self.im_min, self.im_max),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im > self.im_min && z.im <= self.im_max
    }

    pub fn centroid(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn diagonal(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    /// Grid of `nx × ny` points spanning the closed rectangle, row by row
    /// from the bottom left.
    pub fn lattice(&self, nx: usize, ny: usize) -> Vec<Complex64> {
        let step = |lo: f64, hi: f64, k: usize, count: usize| {
            if count == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * k as f64 / (count - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                out.push(Complex64::new(
                    step(self.re_min, self.re_max, i, nx),
                    step(self.im_min, self.im_max, j, ny),
                ));
            }
        }
        out
    }
}
