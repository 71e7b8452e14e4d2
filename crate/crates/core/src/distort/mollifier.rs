use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::quad::integrate_scalar;

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// `∫_{-1}^{1} exp(-1/(1 - u²)) du`.
fn line_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| 2.0 * integrate_scalar(bump, 0.0, 1.0, 1e-16))
}

/// `∫_{|u|<1} exp(-1/(1 - |u|²)) du` over the unit disk.
fn disk_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| 2.0 * PI * integrate_scalar(|s| bump(s) * s, 0.0, 1.0, 1e-16))
}

/// Normalized bump `c · exp(-1/(1 - (t/r)²))` supported in `|t| < r`,
/// as a function of the radius in dimension 1 or 2.
#[derive(Debug, Clone, Copy)]
pub struct Mollifier {
    radius: f64,
    norm: f64,
}

impl Mollifier {
    pub fn line(radius: f64) -> Self {
        Self {
            radius,
            norm: 1.0 / (line_mass() * radius),
        }
    }

    pub fn disk(radius: f64) -> Self {
        Self {
            radius,
            norm: 1.0 / (disk_mass() * radius * radius),
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn value(&self, t: f64) -> f64 {
        self.norm * bump(t / self.radius)
    }

    /// Value and the first two derivatives in `t`.
    pub fn jet(&self, t: f64) -> [f64; 3] {
        let r = self.radius;
        let u = t / r;
        if u.abs() >= 1.0 {
            return [0.0; 3];
        }
        let w = 1.0 - u * u;
        let f = self.norm * (-1.0 / w).exp();
        // q = -1/w, q' = -2u/w², q'' = -2/w² - 8u²/w³
        let q1 = -2.0 * u / (w * w);
        let q2 = -2.0 / (w * w) - 8.0 * u * u / (w * w * w);
        [f, f * q1 / r, f * (q1 * q1 + q2) / (r * r)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_in_one_and_two_dimensions() {
        for r in [0.3, 1.0] {
            let m = Mollifier::line(r);
            let mass = integrate_scalar(|t| m.value(t), -r, r, 1e-15);
            assert!((mass - 1.0).abs() < 1e-13);
            let d = Mollifier::disk(r);
            let mass = 2.0 * PI * integrate_scalar(|s| d.value(s) * s, 0.0, r, 1e-15);
            assert!((mass - 1.0).abs() < 1e-13);
        }
        // reference value of the unnormalized line integral
        assert!((line_mass() - 0.443_993_816_168_079_4).abs() < 1e-12);
    }

    #[test]
    fn jet_matches_finite_differences() {
        let m = Mollifier::line(0.8);
        let step = 1e-5;
        for t in [-0.6, -0.2, 0.0, 0.35, 0.7] {
            let [f, d1, d2] = m.jet(t);
            assert_eq!(f, m.value(t));
            let fd1 = (m.value(t + step) - m.value(t - step)) / (2.0 * step);
            let fd2 = (m.value(t + step) - 2.0 * f + m.value(t - step)) / (step * step);
            assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()));
            assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()));
        }
    }
}
