//! Canned property suites behind `starkcap verify`.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stark_cap::cap::{
    compare_with_distortion, resolvent_probe, resonances_via_distortion, sweep, CapProblem, EpsilonSchedule,
    SolverConfig, StabilizeOptions, Window,
};
use stark_cap::distort::{cone_contains, ConeParams, DistortionField, DistortionField2d};
use stark_cap::eig::{shift_invert_arnoldi, ArnoldiOptions};
use stark_cap::grid::{assemble_cap_hamiltonian, assemble_divergence_block, FdOrder, Grid1D, PotentialSpec};
use stark_cap::oracle::{free_stark_cap_spectrum, harmonic_cap_spectrum};
use stark_cap::{Complex64, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Suite {
    /// x·v(x) ≤ 0, v₁ ≥ 0, and v₁ ≥ 1 outside the widened cone
    FieldSigns,
    /// discrete absorbing spectra against their closed forms
    Oracles,
    /// Im⟨u, L u⟩ ≤ 0 for the distorted kinetic block
    FormSign,
    /// σ_min of the distorted absorbing operator stays away from zero
    Resolvent,
    /// absorbing-potential estimates against distorted eigenvalues
    Crossmethod,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        pass,
        detail,
    }
}

pub fn run(suite: Suite) -> Result<Vec<Check>> {
    match suite {
        Suite::FieldSigns => field_signs(),
        Suite::Oracles => oracles(),
        Suite::FormSign => form_sign(),
        Suite::Resolvent => resolvent(),
        Suite::Crossmethod => crossmethod(),
    }
}

pub fn table(suite: Suite, checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = format!(
        "suite {}\n",
        suite
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    );
    for c in checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("  [{tag}] {:<width$}  {}\n", c.name, c.detail));
    }
    out
}

fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn field_signs() -> Result<Vec<Check>> {
    let (k, rho) = (1.0, 2.0);
    let params = ConeParams::new(k, rho, 1.0)?;
    let plane = DistortionField2d::new(params);
    let line = DistortionField::new(params);
    let (mut dot2, mut dot1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut v1, mut v1_outside) = (f64::INFINITY, f64::INFINITY);
    for i in 1..=10_000 {
        let x = [100.0 * halton(i, 2) - 50.0, 100.0 * halton(i, 3) - 50.0];
        let v = plane.v(x);
        dot2 = dot2.max(x[0] * v[0] + x[1] * v[1]);
        v1 = v1.min(v[0]);
        if !cone_contains(&x, k, rho + 1.0) {
            v1_outside = v1_outside.min(v[0]);
        }
        dot1 = dot1.max(x[0] * line.v(x[0]));
    }
    Ok(vec![
        check(
            "2D x.v <= 1e-8",
            dot2 <= 1e-8,
            format!("max {dot2:.3e} over 10^4 points"),
        ),
        check(
            "1D x.v <= 1e-8",
            dot1 <= 1e-8,
            format!("max {dot1:.3e} over 10^4 points"),
        ),
        check("2D v1 >= 0", v1 >= 0.0, format!("min {v1:.3e}")),
        check(
            "2D v1 >= 1 outside the cone widened by 1",
            v1_outside >= 1.0 - 1e-8,
            format!("min {v1_outside:.6}"),
        ),
    ])
}

fn relative_errors(found: &[Complex64], exact: &[Complex64]) -> Vec<f64> {
    exact
        .iter()
        .map(|e| {
            found
                .iter()
                .map(|z| (z - e).norm() / e.norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

fn worst(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn oracles() -> Result<Vec<Check>> {
    let opts = ArnoldiOptions::default();
    let exact = harmonic_cap_spectrum(1.0, 1, 5)?.eigenvalues;
    let grid = Grid1D::new(-15.0, 15.0, 1500)?;
    let mut harmonic = Vec::new();
    for order in [FdOrder::Second, FdOrder::Fourth] {
        let a = assemble_cap_hamiltonian(&grid, &PotentialSpec::Zero, 1.0, order, false)?;
        harmonic.push(relative_errors(
            &shift_invert_arnoldi(&a, Complex64::new(0.0, 0.0), 5, &opts)?.eigenvalues,
            &exact,
        ));
    }
    let gain = harmonic[0]
        .iter()
        .zip(&harmonic[1])
        .map(|(a, b)| a / b)
        .fold(f64::INFINITY, f64::min);

    let exact = free_stark_cap_spectrum(0.25, 1, 3)?.eigenvalues;
    let mut stark = Vec::new();
    for m in [2400, 4800] {
        let grid = Grid1D::new(-30.0, 30.0, m)?;
        let a = assemble_cap_hamiltonian(&grid, &PotentialSpec::Zero, 0.25, FdOrder::Second, true)?;
        stark.push(relative_errors(
            &shift_invert_arnoldi(&a, Complex64::new(0.3536, -1.3536), 3, &opts)?.eigenvalues,
            &exact,
        ));
    }
    let shrinks = stark[1].iter().zip(&stark[0]).all(|(f, c)| f < c);
    Ok(vec![
        check(
            "harmonic, order 2, rel err < 1e-3",
            worst(&harmonic[0]) < 1e-3,
            format!("max {:.3e}", worst(&harmonic[0])),
        ),
        check(
            "harmonic, order 4 gain >= 5",
            gain >= 5.0,
            format!("min gain {gain:.0}"),
        ),
        check(
            "free Stark, m=2400, rel err < 1e-2",
            worst(&stark[0]) < 1e-2,
            format!("max {:.3e}", worst(&stark[0])),
        ),
        check(
            "free Stark, refinement shrinks errors",
            shrinks,
            format!("m=4800 max {:.3e}", worst(&stark[1])),
        ),
    ])
}

fn form_sign() -> Result<Vec<Check>> {
    let field = DistortionField::new(ConeParams::new(1.0, 5.0, 1.0)?);
    let grid = Grid1D::with_spacing(-40.0, 15.0, 0.02)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut out = Vec::new();
    for delta in [0.1, 0.3] {
        let l = assemble_divergence_block(&grid, Complex64::new(0.0, -delta), &field)?;
        let mut top = f64::NEG_INFINITY;
        for _ in 0..100 {
            let u: Vec<Complex64> = (0..grid.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let lu = l.matvec(&u);
            let form: Complex64 = u.iter().zip(&lu).map(|(a, b)| a.conj() * b).sum();
            let norm2: f64 = u.iter().map(|a| a.norm_sqr()).sum();
            top = top.max(form.im / norm2);
        }
        out.push(check(
            &format!("delta {delta}: Im<u,Lu> <= 1e-10 |u|^2"),
            top <= 1e-10,
            format!("max {top:.3e} over 100 vectors"),
        ));
    }
    Ok(out)
}

fn resolvent() -> Result<Vec<Check>> {
    let field = DistortionField::new(ConeParams::new(1.0, 5.0, 1.0)?);
    let grid = Grid1D::with_spacing(-40.0, 15.0, 0.05)?;
    let omega = Window::new(-1.0, 1.0, -0.2, 0.5)?.lattice(5, 5);
    let t = resolvent_probe(
        Complex64::new(0.0, -0.3),
        &field,
        &[1e-1, 1e-2, 1e-3, 1e-4],
        &omega,
        &grid,
    )?;
    let min = t.minimum();
    let tail = t.row_minimum(2).min(t.row_minimum(3));
    let rows: Vec<String> = (0..4).map(|i| format!("{:.3e}", t.row_minimum(i))).collect();
    Ok(vec![
        check(
            "table minimum > 0",
            min > 0.0 && !t.any_singular(),
            format!("{min:.3e}"),
        ),
        check(
            "smallest two eps within 50% of the minimum",
            (tail - min).abs() < 0.5 * min,
            format!("row minima [{}]", rows.join(", ")),
        ),
    ])
}

fn crossmethod() -> Result<Vec<Check>> {
    let well = PotentialSpec::GaussianWell {
        depth: 2.0,
        width: 1.0,
        center: 0.0,
    };
    let window = Window::new(-2.0, 1.0, -0.45, 0.0)?;
    let problem = CapProblem {
        grid: Grid1D::with_spacing(-100.0, 15.0, 0.02)?,
        potential: well,
        order: FdOrder::Second,
        include_stark: true,
    };
    let solver = SolverConfig::default();
    let out = sweep(
        &problem,
        &EpsilonSchedule::default(),
        &window,
        &solver,
        &StabilizeOptions::default(),
    )?;
    let field = DistortionField::new(ConeParams::new(0.5, 5.0, 1.0)?);
    let grid = Grid1D::with_spacing(-60.0, 10.0, 0.01)?;
    let reference = resonances_via_distortion(&grid, &well, Complex64::new(0.0, -0.5), &field, &window, &solver)?;
    let report = compare_with_distortion(&out.estimates, &reference, 1e-3);
    Ok(vec![
        check(
            "reference eigenvalues matched within 1e-3",
            report.pass() && !reference.is_empty(),
            format!(
                "{} reference, max distance {:.3e}",
                reference.len(),
                report.max_distance()
            ),
        ),
        check(
            "no unmatched estimates",
            report.unmatched_estimates.is_empty(),
            format!("{} estimates", out.estimates.len()),
        ),
    ])
}
