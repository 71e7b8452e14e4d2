//! Gauss–Legendre rules and adaptive bisection quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const PANEL: usize = 16;

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL))
}

fn panel<const N: usize>(f: &mut impl FnMut(f64) -> [f64; N], a: f64, b: f64) -> [f64; N] {
    let (nodes, weights) = panel_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = [0.0; N];
    for (x, w) in nodes.iter().zip(weights) {
        let y = f(mid + half * x);
        for (s, v) in acc.iter_mut().zip(y) {
            *s += w * v;
        }
    }
    acc.map(|s| s * half)
}

/// Integrates a vector-valued function over [a, b] by recursive bisection of
/// 16-point Gauss–Legendre panels until each panel agrees with its two halves
/// to within `tol` (absolute, max-norm).
pub fn integrate<const N: usize>(mut f: impl FnMut(f64) -> [f64; N], a: f64, b: f64, tol: f64) -> [f64; N] {
    if a == b {
        return [0.0; N];
    }
    let whole = panel(&mut f, a, b);
    bisect(&mut f, a, b, whole, tol, 0)
}

fn bisect<const N: usize>(
    f: &mut impl FnMut(f64) -> [f64; N],
    a: f64,
    b: f64,
    whole: [f64; N],
    tol: f64,
    depth: usize,
) -> [f64; N] {
    let mid = 0.5 * (a + b);
    let left = panel(f, a, mid);
    let right = panel(f, mid, b);
    let mut sum = [0.0; N];
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..N {
        sum[i] = left[i] + right[i];
        err = err.max((sum[i] - whole[i]).abs());
        scale = scale.max(sum[i].abs());
    }
    // stop at the tolerance, at rounding level, or at a depth cap
    if err <= tol || err <= 1e-15 * scale || depth >= 30 {
        return sum;
    }
    let l = bisect(f, a, mid, left, 0.5 * tol, depth + 1);
    let r = bisect(f, mid, b, right, 0.5 * tol, depth + 1);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = l[i] + r[i];
    }
    out
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    integrate(|x| [f(x)], a, b, tol)[0]
}
