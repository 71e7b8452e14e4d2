use super::{ConeParams, Mollifier};
use crate::quad::integrate_scalar;

/// One-dimensional field: `v(x) = c ∫_{x+ρ}^∞ φ`, equal to `c = (1 + K⁻²)^{1/2}`
/// for `x < -ρ - r` and to zero for `x > -ρ + r`.
#[derive(Debug, Clone, Copy)]
pub struct DistortionField {
    params: ConeParams,
    amplitude: f64,
    bump: Mollifier,
}

impl DistortionField {
    /// `params` must already be valid (see [`ConeParams::new`]).
    pub fn new(params: ConeParams) -> Self {
        Self {
            params,
            amplitude: params.amplitude(),
            bump: Mollifier::line(params.mollifier_radius),
        }
    }

    pub fn params(&self) -> &ConeParams {
        &self.params
    }

    /// Value of `v` behind the cone.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn v(&self, x: f64) -> f64 {
        let r = self.bump.radius();
        let s = x + self.params.rho;
        if s <= -r {
            self.amplitude
        } else if s >= r {
            0.0
        } else if s <= 0.0 {
            // integrate over the shorter side for accuracy
            self.amplitude * (1.0 - integrate_scalar(|t| self.bump.value(t), -r, s, 1e-16))
        } else {
            self.amplitude * integrate_scalar(|t| self.bump.value(t), s, r, 1e-16)
        }
    }

    pub fn dv(&self, x: f64) -> f64 {
        -self.amplitude * self.bump.jet(x + self.params.rho)[0]
    }

    pub fn d2v(&self, x: f64) -> f64 {
        -self.amplitude * self.bump.jet(x + self.params.rho)[1]
    }

    pub fn d3v(&self, x: f64) -> f64 {
        -self.amplitude * self.bump.jet(x + self.params.rho)[2]
    }

    /// The potential `F` with `F' = v`, normalized to vanish inside the cone.
    pub fn potential(&self, x: f64) -> f64 {
        let r = self.bump.radius();
        let s = x + self.params.rho;
        if s >= r {
            return 0.0;
        }
        // -c ∫ dist(x + t) φ(t) dt with dist(y) = max(-ρ - y, 0)
        let upper = (-s).min(r);
        -self.amplitude * integrate_scalar(|t| (-s - t) * self.bump.value(t), -r, upper, 1e-15)
    }
}
