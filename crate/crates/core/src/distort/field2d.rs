use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{ConeParams, Mollifier};
use crate::quad::{gauss_legendre, integrate};

const RADIAL_TOL: f64 = 1e-12;
const ANGULAR_TOL: f64 = 1e-11;
const SMOOTH_ANGLES: usize = 32;
const SMOOTH_RADII: usize = 48;

fn smooth_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(SMOOTH_RADII))
}

type Vec2 = [f64; 2];

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// The cone with its apex replaced by a circular arc tangent to both rays at
/// `x₁ = -ρ + 1/2`.
#[derive(Debug, Clone, Copy)]
struct RoundedCone {
    apex: Vec2,
    // unit directions of the rays and their outward normals
    up_dir: Vec2,
    up_normal: Vec2,
    low_dir: Vec2,
    low_normal: Vec2,
    // distance from the apex to the tangency points along each ray
    tangent_len: f64,
    tangent_x1: f64,
    center: Vec2,
    radius: f64,
}

#[derive(Debug, Clone, Copy)]
enum Region {
    Inside,
    Upper,
    Lower,
    Arc,
}

impl RoundedCone {
    fn new(k: f64, rho: f64) -> Self {
        let cos = 1.0 / (1.0 + k * k).sqrt();
        let sin = k * cos;
        let tangent_len = 0.5 / cos;
        Self {
            apex: [-rho, 0.0],
            up_dir: [cos, sin],
            up_normal: [-sin, cos],
            low_dir: [cos, -sin],
            low_normal: [-sin, -cos],
            tangent_len,
            tangent_x1: -rho + 0.5,
            center: [-rho + tangent_len / cos, 0.0],
            radius: tangent_len * k,
        }
    }

    fn rel(&self, y: Vec2) -> Vec2 {
        [y[0] - self.apex[0], y[1] - self.apex[1]]
    }

    fn region(&self, y: Vec2) -> Region {
        let q = self.rel(y);
        let du = dot(q, self.up_normal);
        let dl = dot(q, self.low_normal);
        let inside = if y[0] >= self.tangent_x1 {
            du <= 0.0 && dl <= 0.0
        } else {
            let (a, b) = (y[0] - self.center[0], y[1] - self.center[1]);
            a * a + b * b <= self.radius * self.radius
        };
        if inside {
            Region::Inside
        } else if du > 0.0 && dot(q, self.up_dir) >= self.tangent_len {
            Region::Upper
        } else if dl > 0.0 && dot(q, self.low_dir) >= self.tangent_len {
            Region::Lower
        } else {
            Region::Arc
        }
    }

    /// Distance to the set and its gradient (zero inside).
    fn dist_grad(&self, y: Vec2) -> (f64, Vec2) {
        match self.region(y) {
            Region::Inside => (0.0, [0.0, 0.0]),
            Region::Upper => (dot(self.rel(y), self.up_normal), self.up_normal),
            Region::Lower => (dot(self.rel(y), self.low_normal), self.low_normal),
            Region::Arc => {
                let d = [y[0] - self.center[0], y[1] - self.center[1]];
                let r = dot(d, d).sqrt();
                (r - self.radius, [d[0] / r, d[1] / r])
            }
        }
    }

    /// Parameters `s ∈ (0, reach)` where the ray `x + s ω` crosses a boundary of
    /// the piecewise description of `dist`.
    fn ray_breaks(&self, x: Vec2, omega: Vec2, reach: f64, out: &mut Vec<f64>) {
        out.clear();
        let q = self.rel(x);
        let mut line = |offset: f64, slope: f64| {
            if slope != 0.0 {
                let s = -offset / slope;
                if s > 0.0 && s < reach {
                    out.push(s);
                }
            }
        };
        line(dot(q, self.up_normal), dot(omega, self.up_normal));
        line(dot(q, self.low_normal), dot(omega, self.low_normal));
        line(dot(q, self.up_dir) - self.tangent_len, dot(omega, self.up_dir));
        line(dot(q, self.low_dir) - self.tangent_len, dot(omega, self.low_dir));
        line(x[0] - self.tangent_x1, omega[0]);
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let b = dot(d, omega);
        let disc = b * b - (dot(d, d) - self.radius * self.radius);
        if disc > 0.0 {
            let root = disc.sqrt();
            for s in [-b - root, -b + root] {
                if s > 0.0 && s < reach {
                    out.push(s);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
    }
}

impl RoundedCone {
    /// Angles around `x` at which the radial integrand can change character
    /// abruptly: directions of every boundary line and of the rays where a
    /// line or the arc enters the disk of radius `reach`, plus directions to
    /// the corners. The angular rule is split there.
    fn angle_breaks(&self, x: Vec2, reach: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(48);
        let q = self.rel(x);
        let mut line = |offset: f64, dir: Vec2| {
            // lines that miss the disk leave no trace in the integrand
            let ratio = offset.abs() / reach;
            if ratio < 1.0 {
                let base = dir[1].atan2(dir[0]);
                let a = ratio.asin();
                out.extend([base, base + PI, base + a, base - a, base + PI + a, base + PI - a]);
            }
        };
        // lines given as offset of x from the line, direction of the line
        line(dot(q, self.up_normal), self.up_dir);
        line(dot(q, self.low_normal), self.low_dir);
        line(dot(q, self.up_dir) - self.tangent_len, self.up_normal);
        line(dot(q, self.low_dir) - self.tangent_len, self.low_normal);
        line(x[0] - self.tangent_x1, [0.0, 1.0]);
        let d = [self.center[0] - x[0], self.center[1] - x[1]];
        let dist = dot(d, d).sqrt();
        if (dist - self.radius).abs() < reach {
            let toward = d[1].atan2(d[0]);
            out.extend([toward, toward + PI, toward + 0.5 * PI, toward - 0.5 * PI]);
            if dist > self.radius {
                let a = (self.radius / dist).asin();
                out.extend([toward + a, toward - a]);
            }
        }
        for corner in [
            self.apex,
            [
                self.apex[0] + self.tangent_len * self.up_dir[0],
                self.apex[1] + self.tangent_len * self.up_dir[1],
            ],
            [
                self.apex[0] + self.tangent_len * self.low_dir[0],
                self.apex[1] + self.tangent_len * self.low_dir[1],
            ],
        ] {
            let (a, b) = (corner[0] - x[0], corner[1] - x[1]);
            if (a != 0.0 || b != 0.0) && a.hypot(b) < reach {
                out.push(b.atan2(a));
            }
        }
        for k in 0..8 {
            out.push(k as f64 * PI / 4.0);
        }
        let mut out: Vec<f64> = out.into_iter().map(|t| t.rem_euclid(2.0 * PI)).collect();
        out.push(2.0 * PI);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        out
    }
}

/// Two-dimensional field `v = ∇F` with `F = -(1 + K⁻²)^{1/2} dist(·, C̃) ∗ φ`,
/// evaluated by polar quadrature over the support of the bump.
#[derive(Debug, Clone, Copy)]
pub struct DistortionField2d {
    params: ConeParams,
    amplitude: f64,
    bump: Mollifier,
    cone: RoundedCone,
}

impl DistortionField2d {
    /// `params` must already be valid (see [`ConeParams::new`]).
    pub fn new(params: ConeParams) -> Self {
        Self {
            params,
            amplitude: params.amplitude(),
            bump: Mollifier::disk(params.mollifier_radius),
            cone: RoundedCone::new(params.k, params.rho),
        }
    }

    pub fn params(&self) -> &ConeParams {
        &self.params
    }

    /// Membership in the rounded cone `C̃`.
    pub fn smoothed_cone_contains(&self, x: Vec2) -> bool {
        matches!(self.cone.region(x), Region::Inside)
    }

    /// Cases where the bump support sits inside one linear piece of `dist`.
    fn trivial(&self, x: Vec2) -> Option<Region> {
        let r = self.bump.radius();
        let c = &self.cone;
        let q = c.rel(x);
        let du = dot(q, c.up_normal);
        let dl = dot(q, c.low_normal);
        if (x[0] - r >= c.tangent_x1 && du <= -r && dl <= -r)
            || ((x[0] - c.center[0]).hypot(x[1] - c.center[1]) <= c.radius - r)
        {
            Some(Region::Inside)
        } else if du >= r && dot(q, c.up_dir) >= c.tangent_len + r {
            Some(Region::Upper)
        } else if dl >= r && dot(q, c.low_dir) >= c.tangent_len + r {
            Some(Region::Lower)
        } else if x[0] + r < c.tangent_x1
            && (x[0] - c.center[0]).hypot(x[1] - c.center[1]) >= c.radius + r
            && dot(q, c.up_dir) + r <= c.tangent_len
            && dot(q, c.low_dir) + r <= c.tangent_len
        {
            Some(Region::Arc)
        } else {
            None
        }
    }

    /// `∫ f(s, ω, dist(x + sω), ∇dist(x + sω)) s ds dθ` over the disk of radius r.
    fn ball<const N: usize>(&self, x: Vec2, f: impl Fn(f64, Vec2, f64, Vec2) -> [f64; N]) -> [f64; N] {
        if matches!(self.trivial(x), Some(Region::Arc)) {
            return self.smooth_ball(x, f);
        }
        let reach = self.bump.radius();
        let mut breaks = Vec::with_capacity(8);
        let radial = |theta: f64, breaks: &mut Vec<f64>| -> [f64; N] {
            let omega = [theta.cos(), theta.sin()];
            self.cone.ray_breaks(x, omega, reach, breaks);
            let mut acc = [0.0; N];
            let mut lo = 0.0;
            for hi in breaks.iter().copied().chain(std::iter::once(reach)) {
                let piece = integrate(
                    |s| {
                        let y = [x[0] + s * omega[0], x[1] + s * omega[1]];
                        let (d, g) = self.cone.dist_grad(y);
                        f(s, omega, d, g).map(|v| v * s)
                    },
                    lo,
                    hi,
                    RADIAL_TOL,
                );
                for (a, p) in acc.iter_mut().zip(piece) {
                    *a += p;
                }
                lo = hi;
            }
            acc
        };
        let angles = self.cone.angle_breaks(x, reach);
        let mut total = [0.0; N];
        let share = ANGULAR_TOL / angles.len() as f64;
        for pair in angles.windows(2) {
            let part = integrate(|t| radial(t, &mut breaks), pair[0], pair[1], share);
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        total
    }

    /// Fixed tensor rule (periodic trapezoid in angle, Gauss–Legendre in
    /// radius) for balls where `dist` is smooth.
    fn smooth_ball<const N: usize>(&self, x: Vec2, f: impl Fn(f64, Vec2, f64, Vec2) -> [f64; N]) -> [f64; N] {
        let (nodes, weights) = smooth_rule();
        let reach = self.bump.radius();
        let mut total = [0.0; N];
        for k in 0..SMOOTH_ANGLES {
            let theta = (k as f64 + 0.5) * 2.0 * PI / SMOOTH_ANGLES as f64;
            let omega = [theta.cos(), theta.sin()];
            for (t, w) in nodes.iter().zip(weights) {
                let s = 0.5 * reach * (t + 1.0);
                let y = [x[0] + s * omega[0], x[1] + s * omega[1]];
                let (d, g) = self.cone.dist_grad(y);
                for (acc, val) in total.iter_mut().zip(f(s, omega, d, g)) {
                    *acc += w * val * s;
                }
            }
        }
        let scale = 0.5 * reach * 2.0 * PI / SMOOTH_ANGLES as f64;
        total.map(|t| t * scale)
    }

    pub fn v(&self, x: Vec2) -> Vec2 {
        let c = self.amplitude;
        match self.trivial(x) {
            Some(Region::Inside) => return [0.0, 0.0],
            Some(Region::Upper) => return [-c * self.cone.up_normal[0], -c * self.cone.up_normal[1]],
            Some(Region::Lower) => return [-c * self.cone.low_normal[0], -c * self.cone.low_normal[1]],
            _ => {}
        }
        let phi = self.bump;
        let [a, b] = self.ball(x, |s, _, _, g| {
            let w = phi.value(s);
            [g[0] * w, g[1] * w]
        });
        [-c * a, -c * b]
    }

    /// Jacobian `∂v_i/∂x_j`, row-major.
    pub fn dv(&self, x: Vec2) -> [[f64; 2]; 2] {
        if matches!(self.trivial(x), Some(Region::Inside | Region::Upper | Region::Lower)) {
            return [[0.0; 2]; 2];
        }
        let c = self.amplitude;
        let phi = self.bump;
        let [a, b, d, e] = self.ball(x, |s, omega, _, g| {
            let w = phi.jet(s)[1];
            [
                g[0] * w * omega[0],
                g[0] * w * omega[1],
                g[1] * w * omega[0],
                g[1] * w * omega[1],
            ]
        });
        [[c * a, c * b], [c * d, c * e]]
    }

    pub fn potential(&self, x: Vec2) -> f64 {
        let c = self.amplitude;
        let cone = &self.cone;
        match self.trivial(x) {
            Some(Region::Inside) => return 0.0,
            Some(Region::Upper) => return -c * dot(cone.rel(x), cone.up_normal),
            Some(Region::Lower) => return -c * dot(cone.rel(x), cone.low_normal),
            _ => {}
        }
        let phi = self.bump;
        -c * self.ball(x, |s, _, d, _| [d * phi.value(s)])[0]
    }
}
