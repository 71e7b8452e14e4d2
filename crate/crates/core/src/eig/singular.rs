use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::banded_lu::banded_lu;
use super::residual_norm;
use crate::error::{Error, Result};
use crate::grid::ComplexBandedMatrix;

const MAX_ITERATIONS: usize = 500;
const RELATIVE_TOL: f64 = 1e-6;

/// Estimate of the smallest singular value of `A - z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaMin {
    pub value: f64,
    /// `A - z` was numerically singular; `value` is then 0.
    pub singular: bool,
    pub converged: bool,
    pub iterations: usize,
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut [Complex64]) -> f64 {
    let s = norm(x);
    x.iter_mut().for_each(|z| *z /= s);
    s
}

fn start_vector(n: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51_6d_a1);
    let mut x: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut x);
    x
}

/// `σ_min(A - z)` by inverse iteration on `(A - z)ᴴ (A - z)`.
pub fn smallest_singular_value(a: &ComplexBandedMatrix, z: Complex64) -> Result<SigmaMin> {
    let shifted = a.shifted(z);
    let lu = match banded_lu(&shifted) {
        Ok(lu) => lu,
        Err(Error::Singular { .. }) => {
            return Ok(SigmaMin {
                value: 0.0,
                singular: true,
                converged: true,
                iterations: 0,
            })
        }
        Err(e) => return Err(e),
    };
    let mut x = start_vector(a.n());
    let mut estimate = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        x = lu.solve(&lu.solve_adjoint(&x));
        normalize(&mut x);
        let next = norm(&shifted.matvec(&x));
        if (estimate - next).abs() <= RELATIVE_TOL * next {
            return Ok(SigmaMin {
                value: next,
                singular: false,
                converged: true,
                iterations: it,
            });
        }
        estimate = next;
    }
    Ok(SigmaMin {
        value: estimate,
        singular: false,
        converged: false,
        iterations: MAX_ITERATIONS,
    })
}

/// Residuals `‖A x - λ x‖ / ‖x‖` for approximate eigenvalues, with `x` from a
/// few steps of inverse iteration at a slightly displaced shift.
pub fn eigen_residuals(a: &ComplexBandedMatrix, eigenvalues: &[Complex64]) -> Result<Vec<f64>> {
    let start = start_vector(a.n());
    let direction = Complex64::from_polar(1.0, std::f64::consts::PI / 5.0);
    eigenvalues
        .iter()
        .map(|&lambda| {
            let mut offset = 1e-10 * (1.0 + lambda.norm());
            let lu = loop {
                match banded_lu(&a.shifted(lambda + offset * direction)) {
                    Ok(lu) => break lu,
                    Err(Error::Singular { .. }) if offset < 1e-4 => offset *= 10.0,
                    Err(e) => return Err(e),
                }
            };
            let mut x = start.clone();
            for _ in 0..3 {
                x = lu.solve(&x);
                normalize(&mut x);
            }
            Ok(residual_norm(a, lambda, &x))
        })
        .collect()
}
