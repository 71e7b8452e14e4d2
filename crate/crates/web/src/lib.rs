//! JSON-in, JSON-out entry points for the browser page. The `*_json`
//! functions are plain Rust and tested natively; the `#[wasm_bindgen]`
//! wrappers only translate errors.

use serde::{Deserialize, Serialize};
use stark_cap::cap::{sweep, CapProblem, EpsilonSchedule, SolverConfig, StabilizeOptions, Window};
use stark_cap::distort::{cone_contains, ConeParams, DistortionField2d};
use stark_cap::eig::{shift_invert_arnoldi, ArnoldiOptions};
use stark_cap::grid::{assemble_cap_hamiltonian, FdOrder, Grid1D, PotentialSpec};
use stark_cap::Complex64;
use wasm_bindgen::prelude::*;

/// Keeps a single request within a second or two in the browser.
pub const MAX_NODES: usize = 20_000;
pub const MAX_FIELD_SIDE: usize = 80;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumRequest {
    pub potential: PotentialSpec,
    #[serde(default = "yes")]
    pub include_stark: bool,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub eps: f64,
    pub sigma: [f64; 2],
    pub k: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRequest {
    pub potential: PotentialSpec,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub window: Window,
    #[serde(default)]
    pub schedule: Option<EpsilonSchedule>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRequest {
    pub k: f64,
    pub rho: f64,
    /// Samples cover `[-extent, extent]²`.
    pub extent: f64,
    pub n: usize,
}

#[derive(Debug, Serialize)]
struct Eigen {
    re: f64,
    im: f64,
}

impl From<Complex64> for Eigen {
    fn from(z: Complex64) -> Self {
        Eigen { re: z.re, im: z.im }
    }
}

fn yes() -> bool {
    true
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("bad request: {e}"))
}

fn grid(a: f64, b: f64, h: f64) -> Result<Grid1D, String> {
    let g = Grid1D::with_spacing(a, b, h).map_err(|e| e.to_string())?;
    if g.len() > MAX_NODES {
        return Err(format!("grid has {} nodes, the page allows {MAX_NODES}", g.len()));
    }
    Ok(g)
}

fn to_json(v: serde_json::Value) -> String {
    v.to_string()
}

/// The `k` eigenvalues of the absorbing operator nearest `sigma`.
pub fn cap_spectrum_json(request: &str) -> Result<String, String> {
    let r: SpectrumRequest = parse(request)?;
    let g = grid(r.a, r.b, r.h)?;
    if r.k == 0 || r.k > g.len().min(64) {
        return Err(format!("k must lie in 1..={}", g.len().min(64)));
    }
    let a = assemble_cap_hamiltonian(&g, &r.potential, r.eps, FdOrder::Second, r.include_stark)
        .map_err(|e| e.to_string())?;
    let s = shift_invert_arnoldi(
        &a,
        Complex64::new(r.sigma[0], r.sigma[1]),
        r.k,
        &ArnoldiOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    Ok(to_json(serde_json::json!({
        "n": g.len(),
        "eigenvalues": s.eigenvalues.iter().map(|z| Eigen::from(*z)).collect::<Vec<_>>(),
        "residuals": s.residuals,
    })))
}

/// Trajectories and resonance estimates of an ε-sweep.
pub fn sweep_json(request: &str) -> Result<String, String> {
    let r: SweepRequest = parse(request)?;
    let problem = CapProblem {
        grid: grid(r.a, r.b, r.h)?,
        potential: r.potential,
        order: FdOrder::Second,
        include_stark: true,
    };
    let out = sweep(
        &problem,
        &r.schedule.unwrap_or_default(),
        &r.window,
        &SolverConfig::default(),
        &StabilizeOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let trajectories: Vec<serde_json::Value> = out
        .trajectories
        .iter()
        .map(|t| {
            serde_json::json!({
                "id": t.id,
                "status": t.status,
                "points": t.points.iter().map(|p| [p.eps, p.lambda.re, p.lambda.im]).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(to_json(serde_json::json!({
        "trajectories": trajectories,
        "estimates": out.estimates,
        "failures": out.failures.len(),
    })))
}

/// The planar distortion field on an `n × n` lattice, with cone membership.
pub fn field_map_json(request: &str) -> Result<String, String> {
    let r: FieldRequest = parse(request)?;
    if !(2..=MAX_FIELD_SIDE).contains(&r.n) {
        return Err(format!("n must lie in 2..={MAX_FIELD_SIDE}"));
    }
    if !(r.extent > 0.0 && r.extent.is_finite()) {
        return Err("extent must be positive".into());
    }
    let params = ConeParams::new(r.k, r.rho, 1.0).map_err(|e| e.to_string())?;
    let field = DistortionField2d::new(params);
    let step = 2.0 * r.extent / (r.n - 1) as f64;
    let mut samples = Vec::with_capacity(r.n * r.n);
    for i in 0..r.n {
        for j in 0..r.n {
            let x = [-r.extent + j as f64 * step, -r.extent + i as f64 * step];
            let v = field.v(x);
            samples.push(serde_json::json!({
                "x": x,
                "v": v,
                "in_cone": cone_contains(&x, r.k, r.rho),
            }));
        }
    }
    Ok(to_json(serde_json::json!({
        "amplitude": params.amplitude(),
        "samples": samples,
    })))
}

#[wasm_bindgen]
pub fn cap_spectrum(request: &str) -> Result<String, JsValue> {
    cap_spectrum_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sweep_trajectories(request: &str) -> Result<String, JsValue> {
    sweep_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn field_map(request: &str) -> Result<String, JsValue> {
    field_map_json(request).map_err(|e| JsValue::from_str(&e))
}
