use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::ComplexBandedMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pivots below this fraction of `‖A‖∞` count as singular.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// LU factors of a band matrix with partial pivoting, `P A = L U`.
///
/// Column-major band storage with room for the fill-in caused by pivoting:
/// entry (i, j) sits at `ab[(kl + ku + i - j) + j * ldab]`, `ldab = 2 kl + ku + 1`.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<Complex64>,
    ipiv: Vec<usize>,
}

/// Factorizes `a`, failing with [`Error::Singular`] on a negligible pivot.
pub fn banded_lu(a: &ComplexBandedMatrix) -> Result<BandedLu> {
    BandedLu::factor(a)
}

impl BandedLu {
    pub fn factor(a: &ComplexBandedMatrix) -> Result<Self> {
        let n = a.n();
        let kl = a.lower_bandwidth();
        let ku = a.upper_bandwidth();
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![ZERO; ldab * n];
        for i in 0..n {
            for j in a.row_range(i) {
                ab[kv + i - j + j * ldab] = a.get(i, j);
            }
        }
        let threshold = PIVOT_THRESHOLD * a.norm_inf();
        let mut ipiv = vec![0; n];
        let mut ju = 0;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ldab + kv;
            let mut jp = 0;
            let mut best = ab[col].norm();
            for t in 1..=km {
                let m = ab[col + t].norm();
                if m > best {
                    best = m;
                    jp = t;
                }
            }
            if !(best > threshold) {
                return Err(Error::Singular { row: j, pivot: best });
            }
            ipiv[j] = j + jp;
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    ab.swap(kv + j - c + c * ldab, kv + j + jp - c + c * ldab);
                }
            }
            let pivot = ab[col];
            for t in 1..=km {
                ab[col + t] /= pivot;
            }
            for c in j + 1..=ju {
                let u = ab[kv + j - c + c * ldab];
                if u == ZERO {
                    continue;
                }
                for t in 1..=km {
                    let l = ab[col + t];
                    ab[kv + j + t - c + c * ldab] -= l * u;
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            ldab,
            ab,
            ipiv,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn kv(&self) -> usize {
        self.kl + self.ku
    }

    fn upper(&self, i: usize, j: usize) -> Complex64 {
        self.ab[self.kv() + i - j + j * self.ldab]
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for j in 0..n.saturating_sub(1) {
            let p = self.ipiv[j];
            if p != j {
                x.swap(p, j);
            }
            let xj = x[j];
            let km = self.kl.min(n - 1 - j);
            let col = j * self.ldab + self.kv();
            for t in 1..=km {
                x[j + t] -= self.ab[col + t] * xj;
            }
        }
        let kv = self.kv();
        for j in (0..n).rev() {
            x[j] /= self.upper(j, j);
            let xj = x[j];
            for i in j.saturating_sub(kv)..j {
                x[i] -= self.upper(i, j) * xj;
            }
        }
        x
    }

    /// Solves `Aᴴ x = b` with the same factors.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let kv = self.kv();
        let mut x = b.to_vec();
        // Uᴴ is lower triangular
        for i in 0..n {
            let mut s = x[i];
            for j in i.saturating_sub(kv)..i {
                s -= self.upper(j, i).conj() * x[j];
            }
            x[i] = s / self.upper(i, i).conj();
        }
        for j in (0..n.saturating_sub(1)).rev() {
            let km = self.kl.min(n - 1 - j);
            let col = j * self.ldab + kv;
            let mut s = x[j];
            for t in 1..=km {
                s -= self.ab[col + t].conj() * x[j + t];
            }
            x[j] = s;
            let p = self.ipiv[j];
            if p != j {
                x.swap(p, j);
            }
        }
        x
    }
}
