//! Non-Hermitian eigenvalue kernels.

mod arnoldi;
mod banded_lu;
mod dense;
mod singular;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use arnoldi::{shift_invert_arnoldi, ArnoldiOptions};
pub use banded_lu::{banded_lu, BandedLu, PIVOT_THRESHOLD};
pub use dense::{dense_eigenvalues, schur, DENSE_LIMIT};
pub use singular::{eigen_residuals, smallest_singular_value, SigmaMin};

use crate::error::Result;
use crate::grid::ComplexBandedMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    DenseQr,
    ShiftInvertArnoldi { sigma: Complex64, k: usize },
}

/// Convergence record of an Arnoldi run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub restarts: usize,
    pub krylov_dimension: usize,
    /// `max |VᴴV - I|` of the final basis.
    pub basis_orthogonality: f64,
    /// Needed more than ten times the usual number of restarts.
    pub slow_convergence: bool,
    /// The shift hit an eigenvalue and was moved slightly.
    pub shift_perturbed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    /// `‖A v - λ v‖ / ‖v‖` per eigenvalue.
    pub residuals: Option<Vec<f64>>,
    pub method: Method,
    pub diagnostics: Option<Diagnostics>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.residuals.as_ref().map(|r| r.iter().copied().fold(0.0, f64::max))
    }

    /// Keeps the eigenvalues for which `keep` holds, with their residuals.
    pub fn retain(&mut self, mut keep: impl FnMut(Complex64) -> bool) {
        let mask: Vec<bool> = self.eigenvalues.iter().map(|z| keep(*z)).collect();
        let mut it = mask.iter();
        self.eigenvalues.retain(|_| *it.next().unwrap());
        if let Some(r) = &mut self.residuals {
            let mut it = mask.iter();
            r.retain(|_| *it.next().unwrap());
        }
    }
}

/// Total order by distance to `target`, then smaller imaginary part, then
/// smaller real part.
pub fn compare_nearest(a: Complex64, b: Complex64, target: Complex64) -> std::cmp::Ordering {
    (a - target)
        .norm()
        .total_cmp(&(b - target).norm())
        .then(a.im.total_cmp(&b.im))
        .then(a.re.total_cmp(&b.re))
}

/// Indices of `values` sorted by [`compare_nearest`].
pub fn nearest_order(values: &[Complex64], target: Complex64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| compare_nearest(values[i], values[j], target));
    idx
}

pub(crate) fn residual_norm(a: &ComplexBandedMatrix, lambda: Complex64, x: &[Complex64]) -> f64 {
    let ax = a.matvec(x);
    let r: f64 = ax.iter().zip(x).map(|(p, q)| (p - lambda * q).norm_sqr()).sum();
    let xn: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    (r / xn).sqrt()
}

/// Every eigenvalue of a band matrix by dense QR, sorted by real then
/// imaginary part, with residuals from inverse iteration.
pub fn dense_spectrum(a: &ComplexBandedMatrix) -> Result<SpectrumResult> {
    let eigenvalues = dense_eigenvalues(&a.to_dense())?;
    let residuals = eigen_residuals(a, &eigenvalues)?;
    Ok(SpectrumResult {
        eigenvalues,
        residuals: Some(residuals),
        method: Method::DenseQr,
        diagnostics: None,
    })
}

/// The `k` eigenvalues nearest `target` by dense QR, ordered as
/// [`nearest_order`], with residuals.
pub fn dense_nearest(a: &ComplexBandedMatrix, target: Complex64, k: usize) -> Result<SpectrumResult> {
    let all = dense_eigenvalues(&a.to_dense())?;
    let eigenvalues: Vec<Complex64> = nearest_order(&all, target)
        .into_iter()
        .take(k)
        .map(|i| all[i])
        .collect();
    let residuals = eigen_residuals(a, &eigenvalues)?;
    Ok(SpectrumResult {
        eigenvalues,
        residuals: Some(residuals),
        method: Method::DenseQr,
        diagnostics: None,
    })
}
