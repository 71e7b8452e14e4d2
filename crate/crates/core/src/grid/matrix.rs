use num_complex::Complex64;

use crate::error::{invalid, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex band matrix with `kl` sub- and `ku` super-diagonals, stored
/// row by row: entry (i, j) lives at `data[i * (kl + ku + 1) + (j + kl - i)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<Complex64>,
}

impl ComplexBandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![ZERO; n * (kl + ku + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[i * self.width() + j + self.kl - i]
        } else {
            ZERO
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let w = self.width();
        self.data[i * w + j + self.kl - i] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let w = self.width();
        self.data[i * w + j + self.kl - i] += value;
    }

    /// Column range of row `i` inside the band.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![ZERO; self.n];
        let w = self.width();
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.data[i * w..(i + 1) * w];
            let mut acc = ZERO;
            for j in self.row_range(i) {
                acc += row[j + self.kl - i] * x[j];
            }
            *yi = acc;
        }
        y
    }

    /// `self - z I`.
    pub fn shifted(&self, z: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.add(i, i, -z);
        }
        out
    }

    /// Conjugate transpose, with the bandwidths exchanged.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            for j in self.row_range(i) {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> ComplexDenseMatrix {
        let mut d = ComplexDenseMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in self.row_range(i) {
                d.set(i, j, self.get(i, j));
            }
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexDenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(invalid(
                "data",
                format!("expected {} entries, got {}", n * n, data.len()),
            ));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(invalid("data", "entries must be finite"));
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.n + j] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}
