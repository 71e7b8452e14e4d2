use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sweep::{windowed_spectrum, SolverConfig};
use super::track::ResonanceEstimate;
use super::Window;
use crate::distort::DistortionField;
use crate::eig::{smallest_singular_value, SigmaMin, SpectrumResult};
use crate::error::{invalid, Result};
use crate::grid::{assemble_cap_distorted_hamiltonian, assemble_distorted_hamiltonian, Grid1D, PotentialSpec};

/// Eigenvalues of the distorted operator inside `window`. Requires
/// `Im θ < 0` and a window that stays above `Im θ`.
pub fn resonances_via_distortion(
    grid: &Grid1D,
    potential: &PotentialSpec,
    theta: Complex64,
    field: &DistortionField,
    window: &Window,
    solver: &SolverConfig,
) -> Result<SpectrumResult> {
    if !(theta.im < 0.0) {
        return Err(invalid(
            "theta",
            format!("needs a negative imaginary part, got {theta}"),
        ));
    }
    window.validate()?;
    if window.im_min < theta.im {
        return Err(invalid(
            "im_min",
            format!("window reaches below Im θ = {}: im_min = {}", theta.im, window.im_min),
        ));
    }
    let a = assemble_distorted_hamiltonian(grid, potential, theta, field)?;
    windowed_spectrum(&a, window, solver)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub estimate: Complex64,
    pub reference: Complex64,
    pub distance: f64,
    pub trajectory_id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub matched: Vec<MatchedPair>,
    pub unmatched_estimates: Vec<ResonanceEstimate>,
    pub unmatched_references: Vec<Complex64>,
    pub match_tol: f64,
}

impl ComparisonReport {
    /// Every reference eigenvalue has a partner.
    pub fn pass(&self) -> bool {
        self.unmatched_references.is_empty()
    }

    /// Partners in both directions.
    pub fn one_to_one(&self) -> bool {
        self.pass() && self.unmatched_estimates.is_empty()
    }

    pub fn max_distance(&self) -> f64 {
        self.matched.iter().map(|p| p.distance).fold(0.0, f64::max)
    }
}

/// Greedy nearest pairing of estimates with reference eigenvalues, closest
/// pairs first, only pairs within `match_tol`.
pub fn compare_with_distortion(
    estimates: &[ResonanceEstimate],
    reference: &SpectrumResult,
    match_tol: f64,
) -> ComparisonReport {
    let refs = &reference.eigenvalues;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, e) in estimates.iter().enumerate() {
        for (j, r) in refs.iter().enumerate() {
            let d = (e.z - r).norm();
            if d <= match_tol {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut est_used = vec![false; estimates.len()];
    let mut ref_used = vec![false; refs.len()];
    let mut matched = Vec::new();
    for (d, i, j) in pairs {
        if est_used[i] || ref_used[j] {
            continue;
        }
        est_used[i] = true;
        ref_used[j] = true;
        matched.push(MatchedPair {
            estimate: estimates[i].z,
            reference: refs[j],
            distance: d,
            trajectory_id: estimates[i].trajectory_id,
        });
    }
    ComparisonReport {
        matched,
        unmatched_estimates: estimates
            .iter()
            .zip(&est_used)
            .filter(|(_, used)| !**used)
            .map(|(e, _)| *e)
            .collect(),
        unmatched_references: refs
            .iter()
            .zip(&ref_used)
            .filter(|(_, used)| !**used)
            .map(|(r, _)| *r)
            .collect(),
        match_tol,
    }
}

/// Estimates closer than the tolerance, chained, form one cluster whose
/// size stands in for the multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: Complex64,
    pub count: usize,
    pub trajectory_ids: Vec<usize>,
}

pub fn cluster_estimates(estimates: &[ResonanceEstimate], tol: f64) -> Vec<Cluster> {
    let n = estimates.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (estimates[i].z - estimates[j].z).norm() <= tol {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut clusters: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = root(&mut label, i);
        match clusters.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(i),
            None => clusters.push((r, vec![i])),
        }
    }
    let mut out: Vec<Cluster> = clusters
        .into_iter()
        .map(|(_, members)| {
            let sum: Complex64 = members.iter().map(|&i| estimates[i].z).sum();
            let mut ids: Vec<usize> = members.iter().map(|&i| estimates[i].trajectory_id).collect();
            ids.sort_unstable();
            Cluster {
                center: sum / members.len() as f64,
                count: members.len(),
                trajectory_ids: ids,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.center
            .re
            .total_cmp(&b.center.re)
            .then(a.center.im.total_cmp(&b.center.im))
    });
    out
}

/// `σ_min(Q_{ε,θ} - z)` over a table of ε (rows) and z (columns), where
/// `Q_{ε,θ}` is the distorted absorbing operator without potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTable {
    pub eps: Vec<f64>,
    pub z: Vec<Complex64>,
    pub sigma_min: Vec<Vec<SigmaMin>>,
}

impl ProbeTable {
    pub fn minimum(&self) -> f64 {
        self.sigma_min
            .iter()
            .flatten()
            .map(|s| s.value)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn row_minimum(&self, row: usize) -> f64 {
        self.sigma_min[row]
            .iter()
            .map(|s| s.value)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn any_singular(&self) -> bool {
        self.sigma_min.iter().flatten().any(|s| s.singular)
    }
}

pub fn resolvent_probe(
    theta: Complex64,
    field: &DistortionField,
    eps_list: &[f64],
    z_grid: &[Complex64],
    grid: &Grid1D,
) -> Result<ProbeTable> {
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let a = assemble_cap_distorted_hamiltonian(grid, &PotentialSpec::Zero, theta, field, eps)?;
        let row = z_grid
            .iter()
            .map(|&z| smallest_singular_value(&a, z))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(ProbeTable {
        eps: eps_list.to_vec(),
        z: z_grid.to_vec(),
        sigma_min: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::Method;

    fn estimate(z: Complex64, id: usize) -> ResonanceEstimate {
        ResonanceEstimate {
            z,
            eps_star: 0.1,
            uncertainty: 0.0,
            trajectory_id: id,
            at_boundary: false,
        }
    }

    fn reference(values: Vec<Complex64>) -> SpectrumResult {
        SpectrumResult {
            eigenvalues: values,
            residuals: None,
            method: Method::DenseQr,
            diagnostics: None,
        }
    }

    #[test]
    fn empty_and_identical_lists() {
        let r = compare_with_distortion(&[], &reference(vec![]), 1e-3);
        assert!(r.one_to_one());
        let zs = vec![Complex64::new(-1.0, -0.3), Complex64::new(0.5, -0.1)];
        let est: Vec<_> = zs.iter().enumerate().map(|(i, z)| estimate(*z, i)).collect();
        let r = compare_with_distortion(&est, &reference(zs), 1e-3);
        assert!(r.one_to_one());
        assert_eq!(r.max_distance(), 0.0);
    }

    #[test]
    fn unmatched_sides_are_reported() {
        let est = vec![estimate(Complex64::new(0.0, -0.1), 0)];
        let r = compare_with_distortion(&est, &reference(vec![Complex64::new(0.0, -0.2)]), 1e-3);
        assert!(!r.pass());
        assert_eq!(r.unmatched_estimates.len(), 1);
        assert_eq!(r.unmatched_references.len(), 1);
    }

    #[test]
    fn clusters_chain_nearby_estimates() {
        let est = vec![
            estimate(Complex64::new(0.0, 0.0), 3),
            estimate(Complex64::new(5e-4, 0.0), 1),
            estimate(Complex64::new(1.0, 0.0), 2),
        ];
        let c = cluster_estimates(&est, 1e-3);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].count, 2);
        assert_eq!(c[0].trajectory_ids, vec![1, 3]);
        assert_eq!(c[1].count, 1);
    }
}
