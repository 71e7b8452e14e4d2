use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Window;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub eps: f64,
    pub lambda: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryStatus {
    /// Has a resonance estimate.
    Stabilized,
    /// Headed out of the window, or was still moving at the end of the
    /// schedule.
    Divergent,
    /// Disappeared while heading into the window, or a solver step failed.
    Lost,
}

/// One eigenvalue branch followed through decreasing ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: usize,
    pub points: Vec<TrajectoryPoint>,
    /// `|dλ/d ln ε|` at the interior points, by centered differences.
    pub speed: Vec<f64>,
    pub status: TrajectoryStatus,
    /// Predicted position at the first step where no eigenvalue continued it.
    pub exit: Option<Complex64>,
}

impl Trajectory {
    fn start(id: usize, eps: f64, lambda: Complex64) -> Self {
        Self {
            id,
            points: vec![TrajectoryPoint { eps, lambda }],
            speed: Vec::new(),
            status: TrajectoryStatus::Divergent,
            exit: None,
        }
    }

    fn predict(&self) -> Complex64 {
        match self.points.as_slice() {
            [.., p, q] => 2.0 * q.lambda - p.lambda,
            [q] => q.lambda,
            [] => unreachable!("trajectories start with a point"),
        }
    }

    /// Whether continuing along the last step for up to `reach` leaves the
    /// window.
    fn heading_out(&self, window: &Window, reach: f64) -> bool {
        let [.., p, q] = self.points.as_slice() else {
            return false;
        };
        let step = q.lambda - p.lambda;
        let len = step.norm();
        len > 0.0 && !window.contains(q.lambda + step * (reach / len))
    }

    fn compute_speed(&mut self) {
        self.speed = self
            .points
            .windows(3)
            .map(|w| {
                let dl = w[2].lambda - w[0].lambda;
                let dt = (w[2].eps.ln() - w[0].eps.ln()).abs();
                dl.norm() / dt
            })
            .collect();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceEstimate {
    pub z: Complex64,
    /// ε at which the trajectory moved slowest.
    pub eps_star: f64,
    /// The slowest speed, a heuristic error scale.
    pub uncertainty: f64,
    pub trajectory_id: usize,
    /// The slowest point is the last (or first) one with a centered speed.
    pub at_boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilizeOptions {
    pub speed_threshold: f64,
    /// Also accept a minimum at either end of the speed list, flagged.
    pub accept_boundary: bool,
}

impl Default for StabilizeOptions {
    fn default() -> Self {
        Self {
            speed_threshold: 1e-2,
            accept_boundary: false,
        }
    }
}

impl StabilizeOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.speed_threshold > 0.0 && self.speed_threshold.is_finite()) {
            return Err(invalid(
                "speed_threshold",
                format!("must be positive, got {}", self.speed_threshold),
            ));
        }
        Ok(())
    }
}

/// Links per-step eigenvalue lists into trajectories.
///
/// Each step is `(ε, eigenvalues)`, with `None` for a failed solve. Every
/// open trajectory predicts its next value by linear extrapolation (the
/// first continuation repeats the last value). Pairs are formed greedily
/// by increasing distance, capped at half the window diagonal. Leftover
/// eigenvalues open new trajectories; leftover trajectories are closed.
pub fn link_spectra(steps: &[(f64, Option<Vec<Complex64>>)], window: &Window) -> Vec<Trajectory> {
    let cap = 0.5 * window.diagonal();
    let mut all: Vec<Trajectory> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for (eps, values) in steps {
        let Some(values) = values else {
            for &t in &open {
                all[t].status = TrajectoryStatus::Lost;
            }
            open.clear();
            continue;
        };
        let mut values = values.clone();
        values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (slot, &t) in open.iter().enumerate() {
            let guess = all[t].predict();
            for (k, z) in values.iter().enumerate() {
                let d = (z - guess).norm();
                if d <= cap {
                    pairs.push((d, slot, k));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut slot_used = vec![false; open.len()];
        let mut value_used = vec![false; values.len()];
        for (_, slot, k) in pairs {
            if slot_used[slot] || value_used[k] {
                continue;
            }
            slot_used[slot] = true;
            value_used[k] = true;
            all[open[slot]].points.push(TrajectoryPoint {
                eps: *eps,
                lambda: values[k],
            });
        }

        let mut still_open = Vec::with_capacity(open.len());
        for (slot, &t) in open.iter().enumerate() {
            if slot_used[slot] {
                still_open.push(t);
            } else {
                let guess = all[t].predict();
                all[t].exit = Some(guess);
                all[t].status = if all[t].heading_out(window, cap) {
                    TrajectoryStatus::Divergent
                } else {
                    TrajectoryStatus::Lost
                };
            }
        }
        for (k, z) in values.iter().enumerate() {
            if !value_used[k] {
                still_open.push(all.len());
                all.push(Trajectory::start(all.len(), *eps, *z));
            }
        }
        open = still_open;
    }
    for t in &mut all {
        t.compute_speed();
    }
    all
}

/// Resonance estimate at the point of minimal speed, if that minimum is
/// below the threshold and not at an end of the speed list (unless
/// boundary minima are accepted). Ties go to the first interior index.
pub fn stabilize(t: &Trajectory, opts: &StabilizeOptions) -> Option<ResonanceEstimate> {
    if t.points.len() < 3 || t.speed.len() != t.points.len() - 2 {
        return None;
    }
    let s = &t.speed;
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min < opts.speed_threshold) {
        return None;
    }
    let interior = (1..s.len().saturating_sub(1)).find(|&j| s[j] == min);
    let (j, at_boundary) = match interior {
        Some(j) => (j, false),
        None if opts.accept_boundary => (s.iter().position(|&v| v == min)?, true),
        None => return None,
    };
    let p = t.points[j + 1];
    Some(ResonanceEstimate {
        z: p.lambda,
        eps_star: p.eps,
        uncertainty: min,
        trajectory_id: t.id,
        at_boundary,
    })
}
