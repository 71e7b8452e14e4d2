//! Resonances of one-dimensional Stark Hamiltonians `-d²/dx² + x + V` computed
//! two ways: by sweeping a quadratic complex absorbing potential `-iεx²` to zero,
//! and by exterior complex distortion of the coordinate.
//!
//! Module layout:
//! - [`grid`]: potentials, uniform grids, band matrices and operator assembly
//! - [`distort`]: cone geometry and the smooth distortion vector field
//! - [`eig`]: dense QR, banded LU, shift-invert Arnoldi, smallest singular values
//! - [`cap`]: ε-schedules, trajectory linking, stabilization, cross-checks
//! - [`oracle`]: closed-form spectra of the exactly solvable absorbing models

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops read closer to the triangular-solve formulas
#![allow(clippy::needless_range_loop)]

pub mod cap;
pub mod distort;
pub mod eig;
mod error;
pub mod grid;
pub mod oracle;
pub mod quad;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
