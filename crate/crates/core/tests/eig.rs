use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use stark_cap::eig::{
    banded_lu, dense_eigenvalues, dense_nearest, shift_invert_arnoldi, smallest_singular_value, ArnoldiOptions, Method,
};
use stark_cap::grid::{
    assemble_cap_hamiltonian, ComplexBandedMatrix, ComplexDenseMatrix, FdOrder, Grid1D, PotentialSpec,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn diagonal(values: &[Complex64]) -> ComplexBandedMatrix {
    let mut a = ComplexBandedMatrix::zeros(values.len(), 1, 1);
    for (i, v) in values.iter().enumerate() {
        a.set(i, i, *v);
    }
    a
}

fn harmonic_cap(m: usize, order: FdOrder) -> ComplexBandedMatrix {
    let grid = Grid1D::new(-15.0, 15.0, m).unwrap();
    assemble_cap_hamiltonian(&grid, &PotentialSpec::Zero, 1.0, order, false).unwrap()
}

/// Pairs each value of `a` with its nearest unused partner in `b`.
fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

#[test]
fn dense_small_examples() {
    let a = ComplexDenseMatrix::from_row_major(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 2.0)]).unwrap();
    assert_eq!(dense_eigenvalues(&a).unwrap(), vec![c(0.0, 2.0), c(1.0, 0.0)]);
    let rot = ComplexDenseMatrix::from_row_major(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let e = dense_eigenvalues(&rot).unwrap();
    assert!((e[0] - c(0.0, -1.0)).norm() < 1e-14 && (e[1] - c(0.0, 1.0)).norm() < 1e-14);
}

/// Number of eigenvalues below `x` of the real symmetric tridiagonal matrix
/// with diagonal `d` and constant off-diagonal `e` (Sturm count).
fn sturm_count(d: &[f64], e: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, di) in d.iter().enumerate() {
        q = di - x - if i == 0 { 0.0 } else { e * e / q };
        if q == 0.0 {
            q = f64::EPSILON;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect_eigenvalue(d: &[f64], e: f64, k: usize) -> f64 {
    let (mut lo, mut hi) = (-10.0, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn dense_harmonic_oscillator() {
    let grid = Grid1D::new(-12.0, 12.0, 1200).unwrap();
    // −u″ + x²u: a quadratic well with no Stark term and no absorption
    let mut a = assemble_cap_hamiltonian(&grid, &PotentialSpec::Zero, 0.0, FdOrder::Second, false).unwrap();
    for i in 0..grid.len() {
        let x = grid.node(i);
        a.add(i, i, c(x * x, 0.0));
    }
    let h = grid.spacing();
    let diag: Vec<f64> = (0..grid.len()).map(|i| a.get(i, i).re).collect();
    let mut e = dense_eigenvalues(&a.to_dense()).unwrap();
    e.sort_by(|p, q| p.re.total_cmp(&q.re));
    for (k, z) in e.iter().take(5).enumerate() {
        assert!((z.re - bisect_eigenvalue(&diag, -1.0 / (h * h), k)).abs() < 1e-9);
        assert!(z.im.abs() < 1e-10);
        // the second-order scheme is off by about h²⟨p⁴⟩/12, which is 1.02e-3 at level 4
        let budget = if k < 4 { 1e-3 } else { 1.1e-3 };
        assert!((z.re - (2 * k + 1) as f64).abs() < budget, "level {k}: {z}");
    }
}

#[test]
fn dense_matches_nalgebra_on_random_matrices() {
    for seed in 0..4u64 {
        let n = 40 + 10 * seed as usize;
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let data: Vec<Complex64> = (0..n * n).map(|_| c(next(), next())).collect();
        let ours = dense_eigenvalues(&ComplexDenseMatrix::from_row_major(n, data.clone()).unwrap()).unwrap();
        let reference: Vec<Complex64> = DMatrix::from_row_slice(n, n, &data)
            .schur()
            .eigenvalues()
            .unwrap()
            .iter()
            .copied()
            .collect();
        assert!(multiset_distance(&ours, &reference) < 1e-10);
    }
}

#[test]
fn identity_and_poisson_solves() {
    let n = 50;
    let id = diagonal(&vec![c(1.0, 0.0); n]);
    let b: Vec<Complex64> = (0..n).map(|k| c(k as f64, -(k as f64))).collect();
    assert_eq!(banded_lu(&id).unwrap().solve(&b), b);

    let mut poisson = ComplexBandedMatrix::zeros(n, 1, 1);
    for i in 0..n {
        poisson.set(i, i, c(2.0, 0.0));
        if i + 1 < n {
            poisson.set(i, i + 1, c(-1.0, 0.0));
            poisson.set(i + 1, i, c(-1.0, 0.0));
        }
    }
    let x = banded_lu(&poisson).unwrap().solve(&vec![c(1.0, 0.0); n]);
    for (i, xi) in x.iter().enumerate() {
        // discrete solution of -u'' = 1 with zero ends: k(n+1-k)/2 at node k = i+1
        let k = (i + 1) as f64;
        let exact = k * (n as f64 + 1.0 - k) / 2.0;
        assert!((xi - exact).norm() < 1e-10 * exact.max(1.0));
    }
}

#[test]
fn arnoldi_diagonal_examples() {
    let a = diagonal(&[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0), c(5.0, 1.0)]);
    let opts = ArnoldiOptions::default();
    let r = shift_invert_arnoldi(&a, c(0.0, 2.1), 1, &opts).unwrap();
    assert!((r.eigenvalues[0] - c(0.0, 2.0)).norm() < 1e-10);
    let r = shift_invert_arnoldi(&a, c(0.0, 0.0), 2, &opts).unwrap();
    assert!((r.eigenvalues[0] - c(1.0, 0.0)).norm() < 1e-10);
    assert!((r.eigenvalues[1] - c(0.0, 2.0)).norm() < 1e-10);
    assert!(matches!(r.method, Method::ShiftInvertArnoldi { k: 2, .. }));
}

#[test]
fn arnoldi_retries_a_singular_shift() {
    let values: Vec<Complex64> = (0..60).map(|k| c(k as f64, 0.5 * k as f64)).collect();
    let a = diagonal(&values);
    let r = shift_invert_arnoldi(&a, c(3.0, 1.5), 1, &ArnoldiOptions::default()).unwrap();
    assert!(r.diagnostics.unwrap().shift_perturbed);
    assert!((r.eigenvalues[0] - c(3.0, 1.5)).norm() < 1e-7);
}

#[test]
fn arnoldi_matches_dense_on_harmonic_cap() {
    let a = harmonic_cap(1500, FdOrder::Second);
    let sigma = c(0.7, -0.7);
    let opts = ArnoldiOptions::default();
    let r = shift_invert_arnoldi(&a, sigma, 3, &opts).unwrap();
    let reference = dense_nearest(&a, sigma, 3).unwrap();
    for (x, y) in r.eigenvalues.iter().zip(&reference.eigenvalues) {
        assert!((x - y).norm() < 1e-6, "{x} vs {y}");
    }
    for res in r.residuals.unwrap() {
        assert!(res <= opts.tol);
    }
    assert!(r.diagnostics.unwrap().basis_orthogonality < 1e-10);
}

#[test]
fn sigma_min_examples() {
    let id = diagonal(&[c(1.0, 0.0); 8]);
    let s = smallest_singular_value(&id, c(0.0, 0.0)).unwrap();
    assert!((s.value - 1.0).abs() < 1e-12 && !s.singular);
    let d = diagonal(&[c(1.0, 0.0), c(3.0, 0.0)]);
    let s = smallest_singular_value(&d, c(1.0, 0.0)).unwrap();
    assert!(s.singular && s.value == 0.0);
}

#[test]
fn sigma_min_matches_dense_svd() {
    let grid = Grid1D::new(-10.0, 10.0, 200).unwrap();
    let a = assemble_cap_hamiltonian(&grid, &PotentialSpec::Zero, 0.1, FdOrder::Second, true).unwrap();
    for z in [c(0.0, 0.0), c(0.5, 0.3), c(-1.0, -0.2)] {
        let shifted = a.shifted(z).to_dense();
        let m = DMatrix::from_row_slice(200, 200, shifted.as_slice());
        let sv = m.singular_values();
        let exact = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let ours = smallest_singular_value(&a, z).unwrap();
        assert!(ours.converged);
        assert!((ours.value - exact).abs() <= 1e-5 * exact, "{} vs {exact}", ours.value);
        // σ_min · ‖(A - z)⁻¹‖ = 1
        let inv_norm = m.try_inverse().unwrap().singular_values().max();
        assert!((ours.value * inv_norm - 1.0).abs() < 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn similarity_invariance(seed in any::<u64>(), n in 5usize..60) {
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let data: Vec<Complex64> = (0..n * n).map(|_| c(next() - 0.5, next() - 0.5)).collect();
        let scale: Vec<f64> = (0..n).map(|_| 0.5 * 4f64.powf(next())).collect();
        let scaled: Vec<Complex64> = (0..n * n)
            .map(|k| data[k] * scale[k % n] / scale[k / n])
            .collect();
        let e1 = dense_eigenvalues(&ComplexDenseMatrix::from_row_major(n, data).unwrap()).unwrap();
        let e2 = dense_eigenvalues(&ComplexDenseMatrix::from_row_major(n, scaled).unwrap()).unwrap();
        prop_assert!(multiset_distance(&e1, &e2) < 1e-8);
    }

    #[test]
    fn banded_lu_backward_error(seed in any::<u64>(), n in 3usize..120, kl in 0usize..4, ku in 0usize..4) {
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut a = ComplexBandedMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in a.row_range(i) {
                a.set(i, j, c(next(), next()));
            }
        }
        let b: Vec<Complex64> = (0..n).map(|_| c(next(), next())).collect();
        if let Ok(lu) = banded_lu(&a) {
            let x = lu.solve(&b);
            let ax = a.matvec(&x);
            let r = ax.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
            let xn = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(r <= 1e-10 * a.norm_inf() * xn);
        }
    }
}
