//! Shift-invert Arnoldi with Krylov–Schur restarts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::banded_lu::{banded_lu, BandedLu};
use super::dense::{schur, swap_schur, triangular_eigenvector};
use super::{nearest_order, residual_norm, Diagnostics, Method, SpectrumResult};
use crate::error::{invalid, Error, Result};
use crate::grid::{ComplexBandedMatrix, ComplexDenseMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Restart counts above ten times this value are flagged as slow.
const TYPICAL_RESTARTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArnoldiOptions {
    /// Bound on `‖A v - λ v‖ / ‖v‖` for every returned pair.
    pub tol: f64,
    pub max_restarts: usize,
    /// Seed of the starting vector.
    pub seed: u64,
}

impl Default for ArnoldiOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_restarts: 300,
            seed: 0x5eed,
        }
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let s = norm(&v);
    v.iter_mut().for_each(|z| *z /= s);
    v
}

/// Orthogonalizes `w` against `basis` (two Gram–Schmidt passes) and returns
/// the accumulated coefficients.
fn orthogonalize(basis: &[Vec<Complex64>], w: &mut [Complex64]) -> Vec<Complex64> {
    let mut coef = vec![ZERO; basis.len()];
    for _ in 0..2 {
        for (c, v) in coef.iter_mut().zip(basis) {
            let h = dot(v, w);
            for (x, y) in w.iter_mut().zip(v) {
                *x -= h * y;
            }
            *c += h;
        }
    }
    coef
}

struct Krylov<'a> {
    lu: &'a BandedLu,
    n: usize,
    m: usize,
    basis: Vec<Vec<Complex64>>,
    // (m + 1) × m projected matrix, row-major
    h: Vec<Complex64>,
    rng: ChaCha8Rng,
}

impl Krylov<'_> {
    fn h_at(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.h[i * self.m + j]
    }

    /// Extends the decomposition from `start` to `m` columns.
    fn expand(&mut self, start: usize) {
        for j in start..self.m {
            let mut w = self.lu.solve(&self.basis[j]);
            let scale = norm(&w);
            let coef = orthogonalize(&self.basis[..=j], &mut w);
            for (i, c) in coef.into_iter().enumerate() {
                *self.h_at(i, j) += c;
            }
            let beta = norm(&w);
            let next = if beta > 1e-12 * scale {
                *self.h_at(j + 1, j) = Complex64::new(beta, 0.0);
                w.iter().map(|z| z / beta).collect()
            } else {
                // invariant subspace: continue with a fresh orthogonal direction
                *self.h_at(j + 1, j) = ZERO;
                let mut r = random_unit(self.n, &mut self.rng);
                orthogonalize(&self.basis[..=j], &mut r);
                let s = norm(&r);
                r.iter().map(|z| z / s).collect()
            };
            if self.basis.len() > j + 1 {
                self.basis[j + 1] = next;
            } else {
                self.basis.push(next);
            }
        }
    }
}

/// The `k` eigenvalues of `a` nearest `sigma`, by Arnoldi on `(A - σ)⁻¹`.
pub fn shift_invert_arnoldi(
    a: &ComplexBandedMatrix,
    sigma: Complex64,
    k: usize,
    opts: &ArnoldiOptions,
) -> Result<SpectrumResult> {
    let n = a.n();
    if k == 0 || k > n {
        return Err(invalid("k", format!("need 1 <= k <= n = {n}, got {k}")));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", format!("must be positive, got {}", opts.tol)));
    }
    if !a.is_finite() {
        return Err(invalid("matrix", "entries must be finite"));
    }
    let mut shift = sigma;
    let mut shift_perturbed = false;
    let lu = match banded_lu(&a.shifted(shift)) {
        Ok(lu) => lu,
        Err(Error::Singular { .. }) => {
            shift += 1e-8 * (1.0 + sigma.norm()) * Complex64::new(1.0, 1.0) / 2f64.sqrt();
            shift_perturbed = true;
            banded_lu(&a.shifted(shift))?
        }
        Err(e) => return Err(e),
    };
    let m = (2 * k + 10).max(30).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = random_unit(n, &mut rng);
    let mut kry = Krylov {
        lu: &lu,
        n,
        m,
        basis: vec![start],
        h: vec![ZERO; (m + 1) * m],
        rng,
    };
    kry.expand(0);

    let mut restarts = 0;
    loop {
        let square = ComplexDenseMatrix::from_row_major(m, kry.h[..m * m].to_vec())?;
        let (t, z) = schur(&square)?;
        let mut t = t.into_vec();
        let mut z = z.into_vec();
        let mut b: Vec<Complex64> = (0..m)
            .map(|j| (0..m).map(|i| kry.h[m * m + i] * z[i * m + j]).sum())
            .collect();

        // bring the wanted Ritz values to the top, best first
        let ritz: Vec<Complex64> = (0..m).map(|i| shift + 1.0 / t[i * m + i]).collect();
        let order = nearest_order(&ritz, shift);
        let mut placed: Vec<usize> = (0..m).collect();
        for (target, &want) in order.iter().take(k).enumerate() {
            let mut pos = placed.iter().position(|&p| p == want).unwrap();
            while pos > target {
                swap_schur(&mut t, &mut z, m, pos - 1, Some(&mut b));
                placed.swap(pos - 1, pos);
                pos -= 1;
            }
        }

        let tail = &kry.basis[m];
        let op_tail = {
            let av = a.matvec(tail);
            norm(&av.iter().zip(tail).map(|(x, y)| x - shift * y).collect::<Vec<_>>())
        };
        let mut converged = Vec::new();
        for j in 0..k {
            let y = triangular_eigenvector(&t, m, j);
            let mu = t[j * m + j];
            let est = y.iter().zip(&b).map(|(p, q)| p * q).sum::<Complex64>().norm() * op_tail / mu.norm();
            if est <= opts.tol {
                converged.push(shift + 1.0 / mu);
            }
        }

        if converged.len() == k || m == n {
            let mut eigenvalues = Vec::with_capacity(k);
            let mut vectors = Vec::with_capacity(k);
            for j in 0..k {
                let y = triangular_eigenvector(&t, m, j);
                let mut x = vec![ZERO; n];
                for (i, v) in kry.basis[..m].iter().enumerate() {
                    let coef: Complex64 = (0..y.len()).map(|l| z[i * m + l] * y[l]).sum();
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi += coef * vi;
                    }
                }
                eigenvalues.push(shift + 1.0 / t[j * m + j]);
                vectors.push(x);
            }
            let residuals: Vec<f64> = eigenvalues
                .iter()
                .zip(&vectors)
                .map(|(l, x)| residual_norm(a, *l, x))
                .collect();
            let order = nearest_order(&eigenvalues, sigma);
            let orth = orthogonality_defect(&kry.basis[..m]);
            return Ok(SpectrumResult {
                eigenvalues: order.iter().map(|&i| eigenvalues[i]).collect(),
                residuals: Some(order.iter().map(|&i| residuals[i]).collect()),
                method: Method::ShiftInvertArnoldi { sigma, k },
                diagnostics: Some(Diagnostics {
                    restarts,
                    krylov_dimension: m,
                    basis_orthogonality: orth,
                    slow_convergence: restarts > 10 * TYPICAL_RESTARTS,
                    shift_perturbed,
                }),
            });
        }
        if restarts >= opts.max_restarts {
            return Err(Error::ArnoldiStalled {
                restarts,
                converged,
                wanted: k,
            });
        }
        restarts += 1;

        // keep the leading Schur vectors
        let keep = ((k + m) / 2).max(k + 1).min(m - 1);
        let mut new_basis = Vec::with_capacity(m + 1);
        for j in 0..keep {
            let mut x = vec![ZERO; n];
            for (i, v) in kry.basis[..m].iter().enumerate() {
                let coef = z[i * m + j];
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi += coef * vi;
                }
            }
            new_basis.push(x);
        }
        new_basis.push(kry.basis[m].clone());
        kry.basis = new_basis;
        kry.h.iter_mut().for_each(|x| *x = ZERO);
        for i in 0..keep {
            for j in i..keep {
                kry.h[i * m + j] = t[i * m + j];
            }
        }
        kry.h[keep * m..keep * m + keep].copy_from_slice(&b[..keep]);
        kry.expand(keep);
    }
}

fn orthogonality_defect(basis: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate().skip(i) {
            let g = dot(u, v);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}
