use serde::{Deserialize, Serialize};

use super::track::{link_spectra, stabilize, ResonanceEstimate, StabilizeOptions, Trajectory, TrajectoryStatus};
use super::{EpsilonSchedule, Window};
use crate::eig::{dense_spectrum, shift_invert_arnoldi, ArnoldiOptions, SpectrumResult};
use crate::error::{invalid, Error, Result};
use crate::grid::{assemble_cap_hamiltonian, ComplexBandedMatrix, FdOrder, Grid1D, PotentialSpec};

/// Arnoldi requests stop growing here; a window holding more eigenvalues
/// than this is reported as an error.
const MAX_WINDOW_EIGENVALUES: usize = 512;

/// The operator `-d² + [x] + V - iεx²` without the value of ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapProblem {
    pub grid: Grid1D,
    pub potential: PotentialSpec,
    pub order: FdOrder,
    pub include_stark: bool,
}

impl CapProblem {
    pub fn matrix(&self, eps: f64) -> Result<ComplexBandedMatrix> {
        assemble_cap_hamiltonian(&self.grid, &self.potential, eps, self.order, self.include_stark)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverConfig {
    Dense,
    /// Shift-invert Arnoldi at the window centre, asking for `initial_k`
    /// eigenvalues and doubling until the window is covered.
    Arnoldi {
        tol: f64,
        max_restarts: usize,
        seed: u64,
        initial_k: usize,
    },
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = ArnoldiOptions::default();
        SolverConfig::Arnoldi {
            tol: o.tol,
            max_restarts: o.max_restarts,
            seed: o.seed,
            initial_k: 24,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let SolverConfig::Arnoldi { tol, initial_k, .. } = *self {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(invalid("tol", format!("must be positive, got {tol}")));
            }
            if initial_k == 0 {
                return Err(invalid("initial_k", "must be at least 1"));
            }
        }
        Ok(())
    }
}

/// All eigenvalues of `a` inside `window`.
pub fn windowed_spectrum(a: &ComplexBandedMatrix, window: &Window, solver: &SolverConfig) -> Result<SpectrumResult> {
    window.validate()?;
    solver.validate()?;
    let mut result = match *solver {
        SolverConfig::Dense => dense_spectrum(a)?,
        SolverConfig::Arnoldi {
            tol,
            max_restarts,
            seed,
            initial_k,
        } => {
            let opts = ArnoldiOptions {
                tol,
                max_restarts,
                seed,
            };
            let n = a.n();
            let centre = window.centroid();
            let radius = 0.5 * window.diagonal();
            let mut k = initial_k.min(n);
            loop {
                let r = shift_invert_arnoldi(a, centre, k, &opts)?;
                let reach = r.eigenvalues.last().map_or(0.0, |z| (z - centre).norm());
                if reach > radius || k == n {
                    break r;
                }
                if k >= MAX_WINDOW_EIGENVALUES {
                    return Err(invalid(
                        "window",
                        format!("holds more than {MAX_WINDOW_EIGENVALUES} eigenvalues"),
                    ));
                }
                k = (2 * k).min(n).min(MAX_WINDOW_EIGENVALUES);
            }
        }
    };
    result.retain(|z| window.contains(z));
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFailure {
    pub eps: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub eps: f64,
    /// Eigenvalues found in the window.
    pub count: usize,
    pub max_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub trajectories: Vec<Trajectory>,
    /// One per stabilized trajectory, by trajectory id.
    pub estimates: Vec<ResonanceEstimate>,
    pub steps: Vec<StepSummary>,
    pub failures: Vec<StepFailure>,
}

/// Windowed spectra along the schedule, linked and stabilized.
///
/// A failed solve closes the open trajectories and the sweep moves on;
/// invalid parameters fail the whole call.
pub fn sweep(
    problem: &CapProblem,
    schedule: &EpsilonSchedule,
    window: &Window,
    solver: &SolverConfig,
    stab: &StabilizeOptions,
) -> Result<SweepOutcome> {
    schedule.validate()?;
    window.validate()?;
    solver.validate()?;
    stab.validate()?;
    problem.potential.validate()?;

    let mut steps = Vec::with_capacity(schedule.count);
    let mut summaries = Vec::with_capacity(schedule.count);
    let mut failures = Vec::new();
    for eps in schedule.values() {
        let a = problem.matrix(eps)?;
        match windowed_spectrum(&a, window, solver) {
            Ok(r) => {
                summaries.push(StepSummary {
                    eps,
                    count: r.len(),
                    max_residual: r.max_residual(),
                });
                steps.push((eps, Some(r.eigenvalues)));
            }
            Err(e @ Error::InvalidParameter { .. }) if !matches!(e, Error::InvalidParameter { name: "window", .. }) => {
                return Err(e)
            }
            Err(e) => {
                failures.push(StepFailure {
                    eps,
                    message: e.to_string(),
                });
                summaries.push(StepSummary {
                    eps,
                    count: 0,
                    max_residual: None,
                });
                steps.push((eps, None));
            }
        }
    }

    let mut trajectories = link_spectra(&steps, window);
    let mut estimates = Vec::new();
    for t in &mut trajectories {
        if let Some(e) = stabilize(t, stab) {
            t.status = TrajectoryStatus::Stabilized;
            estimates.push(e);
        }
    }
    Ok(SweepOutcome {
        trajectories,
        estimates,
        steps: summaries,
        failures,
    })
}
