use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("distortion Jacobian nearly singular: min |1 + θv'| = {min_modulus:.3e} < 0.1")]
    SingularJacobian { min_modulus: f64 },

    #[error("potential evaluated outside its analytic domain at z = {z}")]
    PotentialDomain { z: Complex64 },

    #[error("matrix is numerically singular (pivot {pivot:.3e} at row {row})")]
    Singular { row: usize, pivot: f64 },

    #[error("QR iteration did not converge; {} eigenvalues found before failure", partial.len())]
    NoConvergence { partial: Vec<Complex64> },

    #[error("Arnoldi did not converge after {restarts} restarts ({} of {wanted} Ritz pairs converged)", converged.len())]
    ArnoldiStalled {
        restarts: usize,
        /// The Ritz values that did meet the tolerance.
        converged: Vec<Complex64>,
        wanted: usize,
    },

    #[error("dense eigensolver limited to n <= {limit}, got n = {n}")]
    TooLarge { n: usize, limit: usize },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
