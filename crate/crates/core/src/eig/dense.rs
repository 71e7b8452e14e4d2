//! Complex Hessenberg reduction and the single-shift QR algorithm.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::ComplexDenseMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest matrix the dense path accepts.
pub const DENSE_LIMIT: usize = 4000;

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Rotation `[c s; -s̄ c]` with real `c` mapping `(a, b)` to `(r, 0)`.
pub(crate) fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    if b == ZERO {
        return (1.0, ZERO, a);
    }
    if a == ZERO {
        let bn = b.norm();
        return (0.0, b.conj() / bn, Complex64::new(bn, 0.0));
    }
    let an = a.norm();
    let rho = an.hypot(b.norm());
    let phase = a / an;
    (an / rho, phase * b.conj() / rho, phase * rho)
}

/// Rows `p`, `q` of a row-major matrix, columns `cols`, left-multiplied by the rotation.
fn rotate_rows(m: &mut [Complex64], n: usize, p: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    let q = p + 1;
    for j in cols {
        let x = m[p * n + j];
        let y = m[q * n + j];
        m[p * n + j] = c * x + s * y;
        m[q * n + j] = c * y - s.conj() * x;
    }
}

/// Columns `p`, `p+1`, rows `rows`, right-multiplied by the adjoint rotation.
fn rotate_cols(m: &mut [Complex64], n: usize, p: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    for r in rows {
        let x = m[r * n + p];
        let y = m[r * n + p + 1];
        m[r * n + p] = c * x + s.conj() * y;
        m[r * n + p + 1] = c * y - s * x;
    }
}

/// Householder reduction of a row-major `n×n` matrix to upper Hessenberg form.
/// With `q`, accumulates the unitary factor (`q` must hold the identity on entry).
pub(crate) fn hessenberg(a: &mut [Complex64], n: usize, mut q: Option<&mut [Complex64]>) {
    let mut v = Vec::with_capacity(n);
    for k in 0..n.saturating_sub(2) {
        let Some(last) = (k + 2..n).rev().find(|&i| a[i * n + k] != ZERO) else {
            continue;
        };
        v.clear();
        v.extend((k + 1..=last).map(|i| a[i * n + k]));
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let phase = if v[0] == ZERO { ONE } else { v[0] / v[0].norm() };
        let alpha = -phase * norm;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        for j in k + 1..n {
            let mut s = ZERO;
            for (t, vt) in v.iter().enumerate() {
                s += vt.conj() * a[(k + 1 + t) * n + j];
            }
            s *= beta;
            for (t, vt) in v.iter().enumerate() {
                a[(k + 1 + t) * n + j] -= vt * s;
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in k + 2..=last {
            a[i * n + k] = ZERO;
        }
        let right = |m: &mut [Complex64]| {
            for i in 0..n {
                let row = &mut m[i * n + k + 1..i * n + last + 1];
                let mut s = ZERO;
                for (x, vt) in row.iter().zip(&v) {
                    s += x * vt;
                }
                s *= beta;
                for (x, vt) in row.iter_mut().zip(&v) {
                    *x -= s * vt.conj();
                }
            }
        };
        right(a);
        if let Some(q) = q.as_deref_mut() {
            right(q);
        }
    }
}

/// One implicit single-shift QR sweep on the active block `lo..=hi`.
/// `full` updates the whole matrix (Schur form) rather than just the block.
fn qr_sweep(
    h: &mut [Complex64],
    n: usize,
    lo: usize,
    hi: usize,
    shift: Complex64,
    full: bool,
    z: Option<&mut [Complex64]>,
) {
    let (first_row, last_col) = if full { (0, n) } else { (lo, hi + 1) };
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (a, b) = if k == lo {
            (h[lo * n + lo] - shift, h[(lo + 1) * n + lo])
        } else {
            (h[k * n + k - 1], h[(k + 1) * n + k - 1])
        };
        let (c, s, r) = givens(a, b);
        if k > lo {
            h[k * n + k - 1] = r;
            h[(k + 1) * n + k - 1] = ZERO;
        }
        rotate_rows(h, n, k, c, s, k..last_col);
        // rows k+1 and k+2 still take part in the chase; the rows above are
        // finished and get their column rotations afterwards, row by row
        rotate_cols(h, n, k, c, s, k + 1..(k + 3).min(hi + 1));
        rotations.push((c, s));
    }
    for r in first_row..hi {
        let start = r.max(lo);
        apply_row_rotations(&mut h[r * n..(r + 1) * n], start, &rotations[start - lo..]);
    }
    if let Some(z) = z {
        for row in z.chunks_exact_mut(n) {
            apply_row_rotations(row, lo, &rotations);
        }
    }
}

/// Right-multiplies a row by the adjoint rotations, the `i`-th acting on
/// entries `first + i` and `first + i + 1`, in order.
fn apply_row_rotations(row: &mut [Complex64], first: usize, rotations: &[(f64, Complex64)]) {
    for (i, &(c, s)) in rotations.iter().enumerate() {
        let p = first + i;
        let x = row[p];
        let y = row[p + 1];
        row[p] = c * x + s.conj() * y;
        row[p + 1] = c * y - s * x;
    }
}

/// Wilkinson shift from the trailing 2×2 block ending at row `i`.
fn wilkinson(h: &[Complex64], n: usize, i: usize) -> Complex64 {
    let mut t = h[i * n + i];
    let u = h[(i - 1) * n + i].sqrt() * h[i * n + i - 1].sqrt();
    let su = cabs1(u);
    if su != 0.0 {
        let x = 0.5 * (h[(i - 1) * n + i - 1] - t);
        let sx = cabs1(x);
        let s = su.max(sx);
        let mut y = s * ((x / s) * (x / s) + (u / s) * (u / s)).sqrt();
        if sx > 0.0 {
            let xs = x / sx;
            if xs.re * y.re + xs.im * y.im < 0.0 {
                y = -y;
            }
        }
        t -= u * (u / (x + y));
    }
    t
}

/// Whether the subdiagonal entry `h[k][k-1]` is negligible.
fn negligible(h: &[Complex64], n: usize, k: usize, hi: usize, smlnum: f64) -> bool {
    let ulp = f64::EPSILON;
    let sub = cabs1(h[k * n + k - 1]);
    if sub <= smlnum {
        return true;
    }
    let mut tst = cabs1(h[(k - 1) * n + k - 1]) + cabs1(h[k * n + k]);
    if tst == 0.0 {
        if k >= 2 {
            tst += cabs1(h[(k - 1) * n + k - 2]);
        }
        if k < hi {
            tst += cabs1(h[(k + 1) * n + k]);
        }
    }
    if sub > ulp * tst {
        return false;
    }
    // refinement of Ahues and Tisseur
    let sup = cabs1(h[(k - 1) * n + k]);
    let ab = sub.max(sup);
    let ba = sub.min(sup);
    let d = h[(k - 1) * n + k - 1] - h[k * n + k];
    let aa = cabs1(h[k * n + k]).max(cabs1(d));
    let bb = cabs1(h[k * n + k]).min(cabs1(d));
    let s = aa + ab;
    ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s)))
}

/// QR iteration on an upper Hessenberg matrix. With `z`, `h` is driven to
/// Schur form and the rotations are accumulated into `z`.
pub(crate) fn hessenberg_qr(h: &mut [Complex64], n: usize, mut z: Option<&mut [Complex64]>) -> Result<Vec<Complex64>> {
    let full = z.is_some();
    let mut eig = vec![ZERO; n];
    let smlnum = f64::MIN_POSITIVE * (n as f64 / f64::EPSILON);
    let itmax = 40 * n.max(10);
    let mut hi = n;
    while hi > 0 {
        let i = hi - 1;
        let mut its = 0;
        loop {
            let mut lo = i;
            while lo > 0 && !negligible(h, n, lo, i, smlnum) {
                lo -= 1;
            }
            if lo > 0 {
                h[lo * n + lo - 1] = ZERO;
            }
            if lo == i {
                eig[i] = h[i * n + i];
                hi -= 1;
                break;
            }
            its += 1;
            if its > itmax {
                return Err(Error::NoConvergence {
                    partial: eig[i + 1..].to_vec(),
                });
            }
            let shift = if its % 30 == 10 {
                h[lo * n + lo] + 0.75 * h[(lo + 1) * n + lo].re.abs()
            } else if its % 30 == 20 {
                h[i * n + i] + 0.75 * h[i * n + i - 1].re.abs()
            } else {
                wilkinson(h, n, i)
            };
            qr_sweep(h, n, lo, i, shift, full, z.as_deref_mut());
        }
    }
    Ok(eig)
}

fn check_dense(a: &ComplexDenseMatrix) -> Result<()> {
    if a.n() > DENSE_LIMIT {
        return Err(Error::TooLarge {
            n: a.n(),
            limit: DENSE_LIMIT,
        });
    }
    if a.as_slice().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(invalid("matrix", "entries must be finite"));
    }
    Ok(())
}

/// All eigenvalues of a dense matrix, sorted by real then imaginary part.
pub fn dense_eigenvalues(a: &ComplexDenseMatrix) -> Result<Vec<Complex64>> {
    check_dense(a)?;
    let n = a.n();
    let mut h = a.as_slice().to_vec();
    hessenberg(&mut h, n, None);
    let mut eig = hessenberg_qr(&mut h, n, None)?;
    eig.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(eig)
}

/// Complex Schur decomposition `A = Z T Zᴴ`.
pub fn schur(a: &ComplexDenseMatrix) -> Result<(ComplexDenseMatrix, ComplexDenseMatrix)> {
    check_dense(a)?;
    let n = a.n();
    let mut t = a.as_slice().to_vec();
    let mut z = ComplexDenseMatrix::identity(n).into_vec();
    hessenberg(&mut t, n, Some(&mut z));
    hessenberg_qr(&mut t, n, Some(&mut z))?;
    for i in 1..n {
        for j in 0..i {
            t[i * n + j] = ZERO;
        }
    }
    Ok((
        ComplexDenseMatrix::from_row_major(n, t)?,
        ComplexDenseMatrix::from_row_major(n, z)?,
    ))
}

/// Swaps the diagonal entries `k` and `k+1` of an upper triangular `t`,
/// updating `z` and the row vector `b` (if any) consistently.
pub(crate) fn swap_schur(t: &mut [Complex64], z: &mut [Complex64], n: usize, k: usize, b: Option<&mut [Complex64]>) {
    let t11 = t[k * n + k];
    let t22 = t[(k + 1) * n + k + 1];
    let (c, s, _) = givens(t[k * n + k + 1], t22 - t11);
    if k + 2 < n {
        rotate_rows(t, n, k, c, s, k + 2..n);
    }
    rotate_cols(t, n, k, c, s, 0..k);
    t[k * n + k] = t22;
    t[(k + 1) * n + k + 1] = t11;
    rotate_cols(z, n, k, c, s, 0..n);
    if let Some(b) = b {
        let (x, y) = (b[k], b[k + 1]);
        b[k] = c * x + s.conj() * y;
        b[k + 1] = c * y - s * x;
    }
}

/// Eigenvector of an upper triangular matrix for its `i`-th diagonal entry,
/// supported on the first `i + 1` components and normalized.
pub(crate) fn triangular_eigenvector(t: &[Complex64], n: usize, i: usize) -> Vec<Complex64> {
    let lambda = t[i * n + i];
    let scale = t.iter().map(|z| cabs1(*z)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut y = vec![ZERO; i + 1];
    y[i] = ONE;
    for j in (0..i).rev() {
        let mut s = ZERO;
        for m in j + 1..=i {
            s += t[j * n + m] * y[m];
        }
        let mut d = t[j * n + j] - lambda;
        if cabs1(d) < f64::EPSILON * scale {
            d = Complex64::new(f64::EPSILON * scale, 0.0);
        }
        y[j] = -s / d;
    }
    let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    y.iter_mut().for_each(|z| *z /= norm);
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n * n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn fro(m: &[Complex64]) -> f64 {
        m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn givens_annihilates() {
        for (a, b) in [
            (Complex64::new(1.0, 2.0), Complex64::new(-0.5, 3.0)),
            (ZERO, Complex64::new(0.0, 2.0)),
            (Complex64::new(3.0, 0.0), ZERO),
        ] {
            let (c, s, r) = givens(a, b);
            assert!((c * a + s * b - r).norm() < 1e-14);
            assert!((c * b - s.conj() * a).norm() < 1e-14);
            assert!((c * c + s.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hessenberg_is_a_similarity() {
        let n = 12;
        let a = random(n, 1);
        let mut h = a.clone();
        let mut q = ComplexDenseMatrix::identity(n).into_vec();
        hessenberg(&mut h, n, Some(&mut q));
        assert!((fro(&a) - fro(&h)).abs() < 1e-12 * fro(&a));
        for i in 2..n {
            for j in 0..i - 1 {
                assert_eq!(h[i * n + j], ZERO);
            }
        }
        // Q H Qᴴ = A
        for i in 0..n {
            for j in 0..n {
                let mut s = ZERO;
                for k in 0..n {
                    for l in 0..n {
                        s += q[i * n + k] * h[k * n + l] * q[j * n + l].conj();
                    }
                }
                assert!((s - a[i * n + j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sweep_preserves_frobenius_norm_of_the_block() {
        let n = 9;
        let mut h = random(n, 2);
        hessenberg(&mut h, n, None);
        let before = fro(&h);
        for shift in [ZERO, Complex64::new(0.3, -0.7)] {
            qr_sweep(&mut h, n, 0, n - 1, shift, false, None);
            assert!((fro(&h) - before).abs() < 1e-13 * before);
        }
    }

    #[test]
    fn eigenvalues_of_triangular_and_companion_matrices() {
        // upper triangular: eigenvalues are the diagonal
        let n = 6;
        let mut a = random(n, 3);
        for i in 0..n {
            for j in 0..i {
                a[i * n + j] = ZERO;
            }
        }
        let m = ComplexDenseMatrix::from_row_major(n, a.clone()).unwrap();
        let eig = dense_eigenvalues(&m).unwrap();
        let mut diag: Vec<_> = (0..n).map(|i| a[i * n + i]).collect();
        diag.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        for (x, y) in eig.iter().zip(&diag) {
            assert!((x - y).norm() < 1e-12);
        }
        // companion matrix of (z - 1)(z - 2i)(z + 3)
        let roots = [ONE, Complex64::new(0.0, 2.0), Complex64::new(-3.0, 0.0)];
        let c1 = -(roots[0] + roots[1] + roots[2]);
        let c2 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2];
        let c3 = -(roots[0] * roots[1] * roots[2]);
        let comp = vec![-c1, -c2, -c3, ONE, ZERO, ZERO, ZERO, ONE, ZERO];
        let eig = dense_eigenvalues(&ComplexDenseMatrix::from_row_major(3, comp).unwrap()).unwrap();
        for r in roots {
            assert!(eig.iter().any(|e| (e - r).norm() < 1e-12));
        }
    }

    #[test]
    fn schur_form_reconstructs_and_reorders() {
        let n = 8;
        let a = ComplexDenseMatrix::from_row_major(n, random(n, 4)).unwrap();
        let (t, z) = schur(&a).unwrap();
        let mut t = t.into_vec();
        let mut z = z.into_vec();
        let check = |t: &[Complex64], z: &[Complex64]| {
            for i in 0..n {
                for j in 0..n {
                    let mut s = ZERO;
                    for k in 0..n {
                        for l in 0..n {
                            s += z[i * n + k] * t[k * n + l] * z[j * n + l].conj();
                        }
                    }
                    assert!((s - a.get(i, j)).norm() < 1e-12);
                }
            }
        };
        check(&t, &z);
        let d0 = t[0];
        let d1 = t[n + 1];
        swap_schur(&mut t, &mut z, n, 0, None);
        assert_eq!(t[0], d1);
        assert_eq!(t[n + 1], d0);
        assert!(t[n].norm() == 0.0);
        check(&t, &z);
        // eigenvector of the triangular factor
        let y = triangular_eigenvector(&t, n, 3);
        let lambda = t[3 * n + 3];
        for i in 0..n {
            let mut s = ZERO;
            for (k, yk) in y.iter().enumerate() {
                s += t[i * n + k] * yk;
            }
            let yi = if i < y.len() { y[i] } else { ZERO };
            assert!((s - lambda * yi).norm() < 1e-12);
        }
    }

    #[test]
    fn too_large_is_rejected() {
        let big = ComplexDenseMatrix::zeros(DENSE_LIMIT + 1);
        assert!(matches!(dense_eigenvalues(&big), Err(Error::TooLarge { .. })));
    }
}
