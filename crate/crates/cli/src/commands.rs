use std::time::Instant;

use serde_json::json;
use stark_cap::cap::{
    compare_with_distortion, resolvent_probe, resonances_via_distortion, sweep, CapProblem, ComparisonReport,
    SweepOutcome,
};
use stark_cap::eig::{dense_spectrum, eigen_residuals, shift_invert_arnoldi, ArnoldiOptions, SpectrumResult};
use stark_cap::grid::{assemble_cap_hamiltonian, FdOrder, PotentialSpec};
use stark_cap::Complex64;

use crate::config::{ConfigError, MethodSection, RunConfig};
use crate::output::{csv, json_document, num, Artifacts};
use crate::svg::trajectory_plot;
use crate::verify;
use crate::{Command, RunArgs};

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Solver(stark_cap::Error),
    Io(std::io::Error),
    Checks(usize),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Checks(_) => 1,
            Failure::Config(_) => 2,
            Failure::Solver(stark_cap::Error::InvalidParameter { .. }) => 2,
            Failure::Solver(_) | Failure::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "{e}"),
            Failure::Solver(e) => write!(f, "solver: {e}"),
            Failure::Io(e) => write!(f, "io: {e}"),
            Failure::Checks(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<stark_cap::Error> for Failure {
    fn from(e: stark_cap::Error) -> Self {
        Failure::Solver(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

pub fn run(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Spectrum(args) => with_config(args, "spectrum", spectrum),
        Command::Sweep(args) => with_config(args, "sweep", cap_sweep),
        Command::Probe(args) => with_config(args, "probe", probe),
        Command::Verify { suite } => run_verify(*suite),
    }
}

/// Loads the config, runs `body`, and logs timing to the sidecar.
fn with_config(
    args: &RunArgs,
    name: &str,
    body: fn(&RunConfig, &str, &mut Artifacts) -> Result<String, Failure>,
) -> Result<(), Failure> {
    let config = RunConfig::load(&args.config)?;
    let hash = config.hash();
    let mut out = Artifacts::new(&args.output_dir, &config.output.stem)?;
    let started = Instant::now();
    let note = body(&config, &hash, &mut out)?;
    out.log(name, &hash, started.elapsed(), &note)?;
    for p in out.written() {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn z_json(z: Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn spectrum(config: &RunConfig, hash: &str, out: &mut Artifacts) -> Result<String, Failure> {
    let eps = config.require_spectrum()?.eps;
    let grid = config.grid()?;
    let a = assemble_cap_hamiltonian(
        &grid,
        &config.problem.potential,
        eps,
        config.grid.fd_order,
        config.problem.include_stark,
    )?;
    let mut result: SpectrumResult = match config.method {
        MethodSection::Dense => dense_spectrum(&a)?,
        MethodSection::Arnoldi {
            sigma,
            k,
            tol,
            max_restarts,
            seed,
        } => {
            if k > grid.len() {
                return Err(ConfigError {
                    key: "method.k".into(),
                    message: format!("exceeds the number of grid nodes ({})", grid.len()),
                }
                .into());
            }
            let opts = ArnoldiOptions {
                tol,
                max_restarts,
                seed,
            };
            shift_invert_arnoldi(&a, Complex64::new(sigma[0], sigma[1]), k, &opts)?
        }
    };
    if result.residuals.is_none() {
        result.residuals = Some(eigen_residuals(&a, &result.eigenvalues)?);
    }
    let residuals = result.residuals.clone().unwrap_or_default();

    if config.output.csv {
        let rows: Vec<Vec<String>> = result
            .eigenvalues
            .iter()
            .zip(&residuals)
            .map(|(z, r)| vec![num(z.re), num(z.im), num(*r)])
            .collect();
        out.write("spectrum.csv", &csv(hash, &["re", "im", "residual"], &rows))?;
    }
    if config.output.json {
        let results = json!({
            "eps": eps,
            "n": grid.len(),
            "method": result.method,
            "eigenvalues": result.eigenvalues.iter().map(|z| z_json(*z)).collect::<Vec<_>>(),
            "diagnostics": result.diagnostics,
        });
        out.write("spectrum.json", &json_document(config, hash, results, &residuals))?;
    }
    Ok(format!("eigenvalues={}", result.len()))
}

fn trajectory_rows(outcome: &SweepOutcome) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for t in &outcome.trajectories {
        let status = serde_json::to_value(t.status)
            .ok()
            .and_then(|v| v.as_str().map(String::from));
        for (i, p) in t.points.iter().enumerate() {
            // speeds exist at interior points only
            let speed = i
                .checked_sub(1)
                .and_then(|j| t.speed.get(j))
                .map(|s| num(*s))
                .unwrap_or_default();
            rows.push(vec![
                t.id.to_string(),
                num(p.eps),
                num(p.lambda.re),
                num(p.lambda.im),
                speed,
                status.clone().unwrap_or_default(),
            ]);
        }
    }
    rows
}

fn cap_sweep(config: &RunConfig, hash: &str, out: &mut Artifacts) -> Result<String, Failure> {
    let (cap, schedule, stab) = config.require_cap()?;
    let problem = CapProblem {
        grid: config.grid()?,
        potential: config.problem.potential,
        order: config.grid.fd_order,
        include_stark: config.problem.include_stark,
    };
    let solver = config.solver();
    let outcome = sweep(&problem, &schedule, &cap.window, &solver, &stab)?;
    for f in &outcome.failures {
        eprintln!("warning: solve failed at eps={:.3e}: {}", f.eps, f.message);
    }

    let mut comparison: Option<(SpectrumResult, ComparisonReport)> = None;
    if let Some((field, theta)) = config.optional_distortion() {
        if config.grid.fd_order == FdOrder::Fourth {
            eprintln!("note: the distorted operator is assembled at second order");
        }
        if !config.problem.include_stark {
            eprintln!("note: the distorted operator always carries the Stark term");
        }
        let reference =
            resonances_via_distortion(&problem.grid, &problem.potential, theta, &field, &cap.window, &solver)?;
        let report = compare_with_distortion(&outcome.estimates, &reference, cap.match_tol);
        comparison = Some((reference, report));
    }

    if config.output.csv {
        out.write(
            "trajectories.csv",
            &csv(
                hash,
                &["trajectory_id", "eps", "re", "im", "speed", "status"],
                &trajectory_rows(&outcome),
            ),
        )?;
        let rows: Vec<Vec<String>> = outcome
            .estimates
            .iter()
            .map(|e| {
                vec![
                    e.trajectory_id.to_string(),
                    num(e.z.re),
                    num(e.z.im),
                    num(e.eps_star),
                    num(e.uncertainty),
                    e.at_boundary.to_string(),
                ]
            })
            .collect();
        out.write(
            "estimates.csv",
            &csv(
                hash,
                &["trajectory_id", "re", "im", "eps_star", "uncertainty", "at_boundary"],
                &rows,
            ),
        )?;
    }
    if config.output.json {
        let distortion = comparison.as_ref().map(|(reference, report)| {
            json!({
                "reference": reference.eigenvalues.iter().map(|z| z_json(*z)).collect::<Vec<_>>(),
                "reference_residuals": reference.residuals,
                "matched": report.matched,
                "unmatched_estimates": report.unmatched_estimates,
                "unmatched_references": report.unmatched_references,
                "match_tol": report.match_tol,
                "pass": report.pass(),
            })
        });
        let results = json!({
            "schedule": schedule.values(),
            "trajectories": outcome.trajectories,
            "estimates": outcome.estimates,
            "failures": outcome.failures,
            "distortion": distortion,
        });
        out.write("sweep.json", &json_document(config, hash, results, &outcome.steps))?;
    }
    if config.output.svg {
        out.write(
            "sweep.svg",
            &trajectory_plot(&cap.window, &outcome.trajectories, &outcome.estimates, hash),
        )?;
    }
    let mut note = format!(
        "trajectories={} estimates={} failures={}",
        outcome.trajectories.len(),
        outcome.estimates.len(),
        outcome.failures.len()
    );
    if let Some((_, report)) = &comparison {
        note.push_str(&format!(" distortion_pass={}", report.pass()));
    }
    Ok(note)
}

fn probe(config: &RunConfig, hash: &str, out: &mut Artifacts) -> Result<String, Failure> {
    let p = config.require_probe()?;
    let (field, theta) = config.require_distortion()?;
    if config.problem.potential != PotentialSpec::Zero {
        eprintln!("note: the probe uses the free Stark operator; problem.potential is ignored");
    }
    let lattice = p.window.lattice(p.nx, p.ny);
    let table = resolvent_probe(theta, &field, &p.eps, &lattice, &config.grid()?)?;

    if config.output.csv {
        let mut rows = Vec::new();
        for (eps, row) in table.eps.iter().zip(&table.sigma_min) {
            for (z, s) in table.z.iter().zip(row) {
                rows.push(vec![
                    num(*eps),
                    num(z.re),
                    num(z.im),
                    num(s.value),
                    s.singular.to_string(),
                    s.converged.to_string(),
                ]);
            }
        }
        out.write(
            "probe.csv",
            &csv(
                hash,
                &["eps", "z_re", "z_im", "sigma_min", "singular", "converged"],
                &rows,
            ),
        )?;
    }
    let row_minima: Vec<f64> = (0..table.eps.len()).map(|i| table.row_minimum(i)).collect();
    if config.output.json {
        let results = json!({
            "eps": table.eps,
            "row_minima": row_minima,
            "minimum": table.minimum(),
            "any_singular": table.any_singular(),
        });
        let unconverged = table.sigma_min.iter().flatten().filter(|s| !s.converged).count();
        out.write(
            "probe.json",
            &json_document(config, hash, results, json!({ "unconverged": unconverged })),
        )?;
    }
    Ok(format!("minimum={:.6e}", table.minimum()))
}

fn run_verify(suite: verify::Suite) -> Result<(), Failure> {
    let checks = verify::run(suite)?;
    print!("{}", verify::table(suite, &checks));
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Checks(failed))
    }
}
