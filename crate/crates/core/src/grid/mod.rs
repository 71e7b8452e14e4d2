//! Uniform grids, potentials, band matrices and finite-difference assembly of
//! the absorbing and the distorted Stark operators.

mod matrix;
mod potential;

pub use matrix::{ComplexBandedMatrix, ComplexDenseMatrix};
pub use potential::PotentialSpec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distort::DistortionField;
use crate::error::{invalid, Error, Result};

/// Interior nodes `a + i·h`, `i = 1..=m`, of `[a, b]` with `h = (b - a)/(m + 1)`.
/// Dirichlet conditions at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    a: f64,
    b: f64,
    m: usize,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid("a, b", format!("need finite a < b, got [{a}, {b}]")));
        }
        if m < 3 {
            return Err(invalid("m", format!("need at least 3 nodes, got {m}")));
        }
        Ok(Self { a, b, m })
    }

    /// Grid with spacing as close as possible to `h` (never coarser).
    pub fn with_spacing(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid("h", format!("must be positive, got {h}")));
        }
        let m = ((b - a) / h).ceil() as usize;
        Self::new(a, b, m.saturating_sub(1).max(3))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.m as f64 + 1.0)
    }

    /// Position of the zero-based interior node `i`.
    pub fn node(&self, i: usize) -> f64 {
        self.a + (i as f64 + 1.0) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.node(i)).collect()
    }
}

/// Accuracy order of the centered second-difference stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum FdOrder {
    Second,
    Fourth,
}

impl FdOrder {
    fn half_width(self) -> usize {
        match self {
            FdOrder::Second => 1,
            FdOrder::Fourth => 2,
        }
    }

    /// Weights of `-d²/dx²` at offsets 0, 1, 2 (times `1/h²`).
    fn stencil(self) -> &'static [f64] {
        match self {
            FdOrder::Second => &[2.0, -1.0],
            FdOrder::Fourth => &[30.0 / 12.0, -16.0 / 12.0, 1.0 / 12.0],
        }
    }
}

impl TryFrom<u8> for FdOrder {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(FdOrder::Second),
            4 => Ok(FdOrder::Fourth),
            other => Err(format!("finite-difference order must be 2 or 4, got {other}")),
        }
    }
}

impl From<FdOrder> for u8 {
    fn from(o: FdOrder) -> u8 {
        match o {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }
}

/// `-d² + [x] + V - iεx²` on the grid. The Stark term `x` is dropped when
/// `include_stark` is false.
pub fn assemble_cap_hamiltonian(
    grid: &Grid1D,
    potential: &PotentialSpec,
    eps: f64,
    order: FdOrder,
    include_stark: bool,
) -> Result<ComplexBandedMatrix> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("must be finite and >= 0, got {eps}")));
    }
    potential.validate()?;
    Ok(cap_matrix(grid, potential, eps, order, include_stark))
}

/// Same assembly for any real `eps`; negative values give the emitting
/// (adjoint) operator.
pub(crate) fn cap_matrix(
    grid: &Grid1D,
    potential: &PotentialSpec,
    eps: f64,
    order: FdOrder,
    include_stark: bool,
) -> ComplexBandedMatrix {
    let n = grid.len();
    let w = order.half_width();
    let stencil = order.stencil();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let mut a = ComplexBandedMatrix::zeros(n, w, w);
    for i in 0..n {
        let x = grid.node(i);
        let stark = if include_stark { x } else { 0.0 };
        let diag = stencil[0] * inv_h2 + stark + potential.eval(x);
        a.set(i, i, Complex64::new(diag, -eps * x * x));
        for (off, &c) in stencil.iter().enumerate().skip(1) {
            if i + off < n {
                a.set(i, i + off, Complex64::new(c * inv_h2, 0.0));
                a.set(i + off, i, Complex64::new(c * inv_h2, 0.0));
            }
        }
    }
    a
}

/// Pointwise data of a distortion on the grid: nodes and midpoints.
struct Distortion {
    shift_nodes: Vec<Complex64>,
    reg_nodes: Vec<Complex64>,
    metric_mid: Vec<Complex64>,
}

fn sample_distortion(grid: &Grid1D, theta: Complex64, field: &DistortionField) -> Result<Distortion> {
    let n = grid.len();
    let h = grid.spacing();
    let mut min_modulus = f64::INFINITY;
    let mut shift_nodes = Vec::with_capacity(n);
    let mut reg_nodes = Vec::with_capacity(n);
    for i in 0..n {
        let x = grid.node(i);
        let jac = 1.0 + theta * field.dv(x);
        let djac = theta * field.d2v(x);
        let d2jac = theta * field.d3v(x);
        // -J^{-1/2} (J^{-1} (J^{-1/2})')' expanded
        let reg = 0.5 * d2jac / jac.powi(3) - 1.25 * djac * djac / jac.powi(4);
        min_modulus = min_modulus.min(jac.norm());
        shift_nodes.push(theta * field.v(x));
        reg_nodes.push(reg);
    }
    let mut metric_mid = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let x = grid.a() + (k as f64 + 0.5) * h;
        let jac = 1.0 + theta * field.dv(x);
        min_modulus = min_modulus.min(jac.norm());
        metric_mid.push(1.0 / (jac * jac));
    }
    if min_modulus < 0.1 {
        return Err(Error::SingularJacobian { min_modulus });
    }
    Ok(Distortion {
        shift_nodes,
        reg_nodes,
        metric_mid,
    })
}

/// Tridiagonal matrix of `-D g D` with `g = (1 + θv')^{-2}` sampled at midpoints.
pub fn assemble_divergence_block(
    grid: &Grid1D,
    theta: Complex64,
    field: &DistortionField,
) -> Result<ComplexBandedMatrix> {
    let d = sample_distortion(grid, theta, field)?;
    Ok(divergence_block(grid, &d))
}

fn divergence_block(grid: &Grid1D, d: &Distortion) -> ComplexBandedMatrix {
    let n = grid.len();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let g = &d.metric_mid;
    let mut a = ComplexBandedMatrix::zeros(n, 1, 1);
    for i in 0..n {
        a.set(i, i, (g[i] + g[i + 1]) * inv_h2);
        if i + 1 < n {
            a.set(i, i + 1, -g[i + 1] * inv_h2);
            a.set(i + 1, i, -g[i + 1] * inv_h2);
        }
    }
    a
}

/// Distorted Stark operator `-D g D + r_θ + x + θv + V(x + θv)`, second order.
pub fn assemble_distorted_hamiltonian(
    grid: &Grid1D,
    potential: &PotentialSpec,
    theta: Complex64,
    field: &DistortionField,
) -> Result<ComplexBandedMatrix> {
    distorted_matrix(grid, potential, theta, field, 0.0)
}

/// Distorted operator plus the distorted absorbing term `-iε(x + θv)²`.
pub fn assemble_cap_distorted_hamiltonian(
    grid: &Grid1D,
    potential: &PotentialSpec,
    theta: Complex64,
    field: &DistortionField,
    eps: f64,
) -> Result<ComplexBandedMatrix> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("must be finite and >= 0, got {eps}")));
    }
    distorted_matrix(grid, potential, theta, field, eps)
}

fn distorted_matrix(
    grid: &Grid1D,
    potential: &PotentialSpec,
    theta: Complex64,
    field: &DistortionField,
    eps: f64,
) -> Result<ComplexBandedMatrix> {
    if !(theta.re.is_finite() && theta.im.is_finite()) {
        return Err(invalid("theta", "must be finite"));
    }
    potential.validate()?;
    let d = sample_distortion(grid, theta, field)?;
    let mut a = divergence_block(grid, &d);
    let i_eps = Complex64::new(0.0, -eps);
    for i in 0..grid.len() {
        let x = grid.node(i);
        let z = x + d.shift_nodes[i];
        let v = potential.eval_complex(z)?;
        a.add(i, i, d.reg_nodes[i] + z + v + i_eps * z * z);
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distort::ConeParams;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_spacing_and_nodes() {
        let g = Grid1D::new(-1.0, 1.0, 3).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.nodes(), vec![-0.5, 0.0, 0.5]);
        assert!(Grid1D::new(-1.0, 1.0, 2).is_err());
        assert!(Grid1D::new(1.0, 1.0, 10).is_err());
    }

    #[test]
    fn small_stark_matrix_by_hand() {
        let g = Grid1D::new(-1.0, 1.0, 3).unwrap();
        let a = assemble_cap_hamiltonian(&g, &PotentialSpec::Zero, 0.0, FdOrder::Second, true).unwrap();
        let h2 = 0.25;
        for (i, x) in g.nodes().iter().enumerate() {
            assert_eq!(a.get(i, i), c(2.0 / h2 + x, 0.0));
        }
        assert_eq!(a.get(0, 1), c(-1.0 / h2, 0.0));
        assert_eq!(a.get(2, 1), c(-1.0 / h2, 0.0));
        assert_eq!(a.get(0, 2), c(0.0, 0.0));
    }

    #[test]
    fn negative_eps_rejected() {
        let g = Grid1D::new(-1.0, 1.0, 5).unwrap();
        let err = assemble_cap_hamiltonian(&g, &PotentialSpec::Zero, -1.0, FdOrder::Second, true).unwrap_err();
        assert!(err.to_string().contains("eps"));
    }

    #[test]
    fn adjoint_flips_the_absorber() {
        let g = Grid1D::new(-4.0, 3.0, 40).unwrap();
        let v = PotentialSpec::GaussianWell {
            depth: 2.0,
            width: 1.0,
            center: 0.0,
        };
        for order in [FdOrder::Second, FdOrder::Fourth] {
            let a = cap_matrix(&g, &v, 0.3, order, true);
            let b = cap_matrix(&g, &v, -0.3, order, true);
            assert_eq!(a.adjoint(), b);
        }
    }

    #[test]
    fn zero_field_reduces_to_plain_operator() {
        // cone far to the left of the box: v vanishes on every node
        let field = DistortionField::new(ConeParams::new(1.0, 100.0, 1.0).unwrap());
        let g = Grid1D::new(-40.0, 10.0, 200).unwrap();
        let v = PotentialSpec::GaussianWell {
            depth: 2.0,
            width: 1.0,
            center: 0.0,
        };
        let a = assemble_distorted_hamiltonian(&g, &v, c(0.0, -0.3), &field).unwrap();
        let b = assemble_cap_hamiltonian(&g, &v, 0.0, FdOrder::Second, true).unwrap();
        for i in 0..g.len() {
            for j in a.row_range(i) {
                assert!((a.get(i, j) - b.get(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn distorted_with_zero_eps_matches_plain_distorted() {
        let field = DistortionField::new(ConeParams::new(1.0, 5.0, 1.0).unwrap());
        let g = Grid1D::new(-20.0, 5.0, 120).unwrap();
        let a = assemble_distorted_hamiltonian(&g, &PotentialSpec::Zero, c(0.0, -0.3), &field).unwrap();
        let b = assemble_cap_distorted_hamiltonian(&g, &PotentialSpec::Zero, c(0.0, -0.3), &field, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn large_real_theta_trips_the_jacobian_check() {
        let field = DistortionField::new(ConeParams::new(1.0, 5.0, 1.0).unwrap());
        let g = Grid1D::new(-20.0, 5.0, 400).unwrap();
        // |v'| peaks near c·max φ ≈ 1.2, so θ = 2 drives 1 + θv' through zero
        let err = assemble_distorted_hamiltonian(&g, &PotentialSpec::Zero, c(2.0, 0.0), &field).unwrap_err();
        assert!(matches!(err, Error::SingularJacobian { .. }));
    }
}
