//! Closed-form spectra of the absorbing-potential model operators.
//!
//! `-Δ - iε|x|²` in `d` dimensions has eigenvalues `√ε e^{-iπ/4} (2N + d)`,
//! `N = |α|` over multi-indices `α`, each with multiplicity `C(N + d - 1, d - 1)`.
//! Adding the Stark term `x₁` completes a square and shifts the whole
//! spectrum by `-i/(4ε)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    HarmonicCap,
    FreeStarkCap,
}

/// Eigenvalues listed with multiplicity, by increasing modulus (ties by
/// imaginary part, then real part).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub formula: Formula,
}

impl OracleSpectrum {
    /// Distinct values with their multiplicities.
    pub fn levels(&self) -> Vec<(Complex64, usize)> {
        let mut out: Vec<(Complex64, usize)> = Vec::new();
        for z in &self.eigenvalues {
            match out.last_mut() {
                Some((w, count)) if w == z => *count += 1,
                _ => out.push((*z, 1)),
            }
        }
        out
    }
}

/// Number of multi-indices in `d` variables with `|α| = level`.
pub fn level_multiplicity(level: usize, dim: usize) -> usize {
    // C(level + dim - 1, dim - 1), built incrementally to stay exact
    (1..dim).fold(1usize, |acc, j| acc * (level + j) / j)
}

fn spectrum(eps: f64, dim: usize, count: usize, shift: Complex64, formula: Formula) -> Result<OracleSpectrum> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("must be positive and finite, got {eps}")));
    }
    if dim == 0 {
        return Err(invalid("dim", "must be at least 1"));
    }
    let ray = eps.sqrt() * Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
    let mut eigenvalues = Vec::with_capacity(count);
    let mut level = 0;
    // the modulus grows with the level for both formulas, so levels come out in order
    while eigenvalues.len() < count {
        let value = ray * (2 * level + dim) as f64 + shift;
        let copies = level_multiplicity(level, dim).min(count - eigenvalues.len());
        eigenvalues.extend(std::iter::repeat_n(value, copies));
        level += 1;
    }
    Ok(OracleSpectrum { eigenvalues, formula })
}

/// The `count` smallest eigenvalues of `-Δ - iε|x|²` on `ℝ^dim`.
pub fn harmonic_cap_spectrum(eps: f64, dim: usize, count: usize) -> Result<OracleSpectrum> {
    spectrum(eps, dim, count, Complex64::new(0.0, 0.0), Formula::HarmonicCap)
}

/// The `count` smallest eigenvalues of `-Δ + x₁ - iε|x|²` on `ℝ^dim`.
pub fn free_stark_cap_spectrum(eps: f64, dim: usize, count: usize) -> Result<OracleSpectrum> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("must be positive and finite, got {eps}")));
    }
    spectrum(eps, dim, count, Complex64::new(0.0, -0.25 / eps), Formula::FreeStarkCap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_states() {
        let z = free_stark_cap_spectrum(0.25, 1, 1).unwrap().eigenvalues[0];
        let expected = 0.5 * Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4) - Complex64::i();
        assert!((z - expected).norm() < 1e-15);
        assert!((z - Complex64::new(0.353553390593, -1.353553390593)).norm() < 1e-11);

        let h = harmonic_cap_spectrum(1.0, 1, 3).unwrap();
        let e = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        for (k, z) in h.eigenvalues.iter().enumerate() {
            assert!((z - e * (2 * k + 1) as f64).norm() < 1e-15);
        }
    }

    #[test]
    fn two_dimensional_multiplicities() {
        let s = free_stark_cap_spectrum(1.0, 2, 6).unwrap();
        let e = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        let levels = s.levels();
        assert!((levels[0].0 - (2.0 * e - Complex64::new(0.0, 0.25))).norm() < 1e-15);
        assert_eq!(levels.iter().map(|l| l.1).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(level_multiplicity(4, 3), 15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(harmonic_cap_spectrum(0.0, 1, 1).is_err());
        assert!(free_stark_cap_spectrum(-1.0, 1, 1).is_err());
        assert!(harmonic_cap_spectrum(1.0, 0, 1).is_err());
    }
}
