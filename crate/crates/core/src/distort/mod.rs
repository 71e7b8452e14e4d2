//! Exterior distortion field built from the distance to a cone.
//!
//! The cone `C(K, ρ) = {x : |x'| ≤ K (x₁ + ρ)}` opens towards `+x₁`. Its apex is
//! rounded off into a smooth convex set `C̃`, equal to the cone for `x₁ > -ρ + 1`.
//! With `F = -(1 + K⁻²)^{1/2} · dist(·, C̃) ∗ φ` for a radial bump `φ` the field
//! is `v = ∇F`: zero deep inside the cone, pointing along `+x₁` outside it.

mod field1d;
mod field2d;
mod mollifier;

pub use field1d::DistortionField;
pub use field2d::DistortionField2d;
pub use mollifier::Mollifier;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeParams {
    /// Slope of the cone boundary.
    pub k: f64,
    /// The apex sits at `x₁ = -rho`.
    pub rho: f64,
    /// Support radius of the bump, at most 1.
    pub mollifier_radius: f64,
}

impl ConeParams {
    pub fn new(k: f64, rho: f64, mollifier_radius: f64) -> Result<Self> {
        let p = Self {
            k,
            rho,
            mollifier_radius,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(invalid("k", format!("must be positive, got {}", self.k)));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(invalid("rho", format!("must be positive, got {}", self.rho)));
        }
        if !(self.mollifier_radius > 0.0 && self.mollifier_radius <= 1.0) {
            return Err(invalid(
                "mollifier_radius",
                format!("must lie in (0, 1], got {}", self.mollifier_radius),
            ));
        }
        Ok(())
    }

    /// `(1 + K⁻²)^{1/2}`, the amplitude of `v` on the axis behind the apex.
    pub fn amplitude(&self) -> f64 {
        (1.0 + 1.0 / (self.k * self.k)).sqrt()
    }
}

/// Membership in `C(K, ρ)`; `point[0]` is the axial coordinate.
pub fn cone_contains(point: &[f64], k: f64, rho: f64) -> bool {
    let radial = point[1..].iter().map(|t| t * t).sum::<f64>().sqrt();
    radial <= k * (point[0] + rho)
}
