use num_complex::Complex64;
use proptest::prelude::*;
use stark_cap::cap::{
    compare_with_distortion, link_spectra, resolvent_probe, resonances_via_distortion, sweep, CapProblem,
    EpsilonSchedule, SolverConfig, StabilizeOptions, SweepOutcome, Trajectory, TrajectoryStatus, Window,
};
use stark_cap::distort::{ConeParams, DistortionField};
use stark_cap::eig::{shift_invert_arnoldi, ArnoldiOptions};
use stark_cap::grid::{assemble_cap_distorted_hamiltonian, FdOrder, Grid1D, PotentialSpec};
use stark_cap::oracle::free_stark_cap_spectrum;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn well() -> PotentialSpec {
    PotentialSpec::GaussianWell {
        depth: 2.0,
        width: 1.0,
        center: 0.0,
    }
}

fn field(k: f64) -> DistortionField {
    DistortionField::new(ConeParams::new(k, 5.0, 1.0).unwrap())
}

/// Box long enough that box states stay below the window until late in the
/// default schedule.
fn problem(potential: PotentialSpec) -> CapProblem {
    CapProblem {
        grid: Grid1D::with_spacing(-100.0, 15.0, 0.02).unwrap(),
        potential,
        order: FdOrder::Second,
        include_stark: true,
    }
}

fn window() -> Window {
    Window::new(-2.0, 1.0, -0.45, 0.0).unwrap()
}

fn run(potential: PotentialSpec, schedule: &EpsilonSchedule, window: &Window) -> SweepOutcome {
    sweep(
        &problem(potential),
        schedule,
        window,
        &SolverConfig::default(),
        &StabilizeOptions::default(),
    )
    .unwrap()
}

fn reference() -> Vec<Complex64> {
    let grid = Grid1D::with_spacing(-60.0, 10.0, 0.01).unwrap();
    resonances_via_distortion(
        &grid,
        &well(),
        c(0.0, -0.5),
        &field(0.5),
        &window(),
        &SolverConfig::default(),
    )
    .unwrap()
    .eigenvalues
}

#[test]
fn free_branch_passes_through_the_closed_form_value() {
    let p = CapProblem {
        grid: Grid1D::with_spacing(-40.0, 15.0, 0.02).unwrap(),
        potential: PotentialSpec::Zero,
        order: FdOrder::Second,
        include_stark: true,
    };
    let w = Window::new(0.0, 1.0, -2.0, -1.0).unwrap();
    let schedule = EpsilonSchedule::new(0.25, 0.6, 4).unwrap();
    let out = sweep(
        &p,
        &schedule,
        &w,
        &SolverConfig::default(),
        &StabilizeOptions::default(),
    )
    .unwrap();
    let expected = free_stark_cap_spectrum(0.25, 1, 1).unwrap().eigenvalues[0];
    assert!((expected - c(0.35355, -1.35355)).norm() < 1e-5);
    let start = out
        .trajectories
        .iter()
        .map(|t| t.points[0])
        .find(|p| p.eps == 0.25 && (p.lambda - expected).norm() < 1e-3);
    assert!(start.is_some(), "{:?}", out.trajectories);
    assert!(out.estimates.is_empty());
}

#[test]
fn free_operator_has_no_estimates() {
    let out = run(PotentialSpec::Zero, &EpsilonSchedule::default(), &window());
    assert!(out.estimates.is_empty());
    assert!(out
        .trajectories
        .iter()
        .all(|t| t.status != TrajectoryStatus::Stabilized));
    assert!(out.failures.is_empty());
}

#[test]
fn free_operator_has_no_distorted_eigenvalues() {
    let grid = Grid1D::with_spacing(-60.0, 10.0, 0.02).unwrap();
    let r = resonances_via_distortion(
        &grid,
        &PotentialSpec::Zero,
        c(0.0, -0.5),
        &field(0.5),
        &window(),
        &SolverConfig::default(),
    )
    .unwrap();
    assert!(r.is_empty(), "{:?}", r.eigenvalues);
}

#[test]
fn well_resonance_is_found_by_both_methods() {
    let out = run(well(), &EpsilonSchedule::default(), &window());
    let reference = reference();
    assert_eq!(reference.len(), 1);
    let report = compare_with_distortion(
        &out.estimates,
        &stark_cap::eig::SpectrumResult {
            eigenvalues: reference,
            residuals: None,
            method: stark_cap::eig::Method::DenseQr,
            diagnostics: None,
        },
        1e-3,
    );
    assert!(report.one_to_one(), "{report:?}");
    let e = &out.estimates[0];
    assert!(!e.at_boundary);
    let t = &out.trajectories[e.trajectory_id];
    assert_eq!(t.status, TrajectoryStatus::Stabilized);
    assert!(t.points.iter().any(|p| p.eps == e.eps_star && p.lambda == e.z));
    assert_eq!(t.speed.len(), t.points.len() - 2);
}

#[test]
fn estimates_survive_a_denser_schedule() {
    let coarse = EpsilonSchedule::default();
    let a = run(well(), &coarse, &window());
    let b = run(well(), &coarse.refined(), &window());
    assert_eq!(a.estimates.len(), b.estimates.len());
    for e in &a.estimates {
        let moved = b
            .estimates
            .iter()
            .map(|f| (f.z - e.z).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(
            moved < e.uncertainty + 1e-4,
            "moved {moved}, uncertainty {}",
            e.uncertainty
        );
    }
}

fn contains_run(big: &Trajectory, small: &Trajectory) -> bool {
    small.points.iter().all(|p| {
        big.points
            .iter()
            .any(|q| q.eps == p.eps && (q.lambda - p.lambda).norm() < 1e-8)
    })
}

#[test]
fn enlarging_the_window_keeps_trajectories() {
    let schedule = EpsilonSchedule::default();
    let small = run(well(), &schedule, &window());
    let large = run(well(), &schedule, &Window::new(-2.5, 1.5, -0.5, 0.0).unwrap());
    for t in &small.trajectories {
        assert!(
            large.trajectories.iter().any(|u| contains_run(u, t)),
            "trajectory {} lost",
            t.id
        );
    }
}

#[test]
fn square_well_resonance_converges_at_second_order() {
    let w = Window::new(-6.0, 1.0, -0.25, 0.0).unwrap();
    let sq = PotentialSpec::SquareWell {
        depth: 5.0,
        half_width: 1.0,
    };
    let values: Vec<Complex64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|h| {
            // the jumps at ±1 fall halfway between nodes
            let grid = Grid1D::with_spacing(-40.0 - h / 2.0, 10.0 + h / 2.0, *h).unwrap();
            let r =
                resonances_via_distortion(&grid, &sq, c(0.0, -0.3), &field(1.0), &w, &SolverConfig::default()).unwrap();
            assert_eq!(r.len(), 1);
            r.eigenvalues[0]
        })
        .collect();
    assert!(values[0].im < 0.0);
    let d1 = (values[0] - values[1]).norm();
    let d2 = (values[1] - values[2]).norm();
    assert!((3.0..5.0).contains(&(d1 / d2)), "{d1} {d2}");
}

#[test]
fn distortion_rejects_bad_theta_and_deep_windows() {
    let grid = Grid1D::with_spacing(-40.0, 10.0, 0.05).unwrap();
    let s = SolverConfig::default();
    assert!(resonances_via_distortion(&grid, &well(), c(0.0, 0.3), &field(1.0), &window(), &s).is_err());
    let deep = Window::new(-2.0, 1.0, -0.4, 0.0).unwrap();
    assert!(resonances_via_distortion(&grid, &well(), c(0.0, -0.3), &field(1.0), &deep, &s).is_err());
}

#[test]
fn probe_dips_towards_an_eigenvalue() {
    let grid = Grid1D::with_spacing(-20.0, 10.0, 0.05).unwrap();
    let theta = c(0.0, -0.3);
    let eps = 0.01;
    let a = assemble_cap_distorted_hamiltonian(&grid, &PotentialSpec::Zero, theta, &field(1.0), eps).unwrap();
    let lambda = shift_invert_arnoldi(&a, c(0.0, -1.0), 1, &ArnoldiOptions::default())
        .unwrap()
        .eigenvalues[0];
    let z: Vec<Complex64> = (0..6).map(|k| lambda + c(0.3, 0.2) * 0.1f64.powi(k)).collect();
    let table = resolvent_probe(theta, &field(1.0), &[eps], &z, &grid).unwrap();
    let row: Vec<f64> = table.sigma_min[0].iter().map(|s| s.value).collect();
    for w in row.windows(2) {
        assert!(w[1] < w[0], "{row:?}");
    }
    assert!(row[5] < 1e-4);
}

#[test]
fn probe_is_insensitive_to_the_box() {
    let omega = Window::new(-1.0, 1.0, -0.2, 0.5).unwrap().lattice(5, 5);
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let table = |a: f64| {
        let grid = Grid1D::with_spacing(a, 15.0, 0.05).unwrap();
        resolvent_probe(c(0.0, -0.3), &field(1.0), &eps, &omega, &grid).unwrap()
    };
    let short = table(-40.0);
    let long = table(-80.0);
    assert!(short.minimum() > 0.0 && !short.any_singular());
    for (r, s) in short.sigma_min.iter().zip(&long.sigma_min) {
        for (p, q) in r.iter().zip(s) {
            assert!(p.converged && q.converged);
            assert!((p.value - q.value).abs() < 0.1 * p.value, "{} vs {}", p.value, q.value);
        }
    }
}

fn synthetic_steps(seed: u64) -> Vec<(f64, Option<Vec<Complex64>>)> {
    let w = Window::new(-2.0, 2.0, -2.0, 0.0).unwrap();
    EpsilonSchedule::new(0.5, 0.7, 12)
        .unwrap()
        .values()
        .into_iter()
        .map(|e| {
            let values: Vec<Complex64> = (0..6)
                .map(|k| {
                    let k = k as f64;
                    c(-1.5 + 0.5 * k + 0.01 * seed as f64, -0.1 - 0.05 * k) + c(0.05, -0.1 * k) * e.ln()
                })
                .filter(|z| w.contains(*z))
                .collect();
            (e, Some(values))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linking_ignores_input_order(seed in 0u64..20, shuffles in prop::collection::vec(any::<u64>(), 12)) {
        let w = Window::new(-2.0, 2.0, -2.0, 0.0).unwrap();
        let steps = synthetic_steps(seed);
        let shuffled: Vec<_> = steps
            .iter()
            .zip(&shuffles)
            .map(|((e, v), s)| {
                let mut v = v.clone().unwrap();
                let n = v.len().max(1);
                v.rotate_left((*s as usize) % n);
                if s % 2 == 1 {
                    v.reverse();
                }
                (*e, Some(v))
            })
            .collect();
        prop_assert_eq!(link_spectra(&steps, &w), link_spectra(&shuffled, &w));
    }

    #[test]
    fn trajectories_are_ordered_and_sized(seed in 0u64..20) {
        let w = Window::new(-2.0, 2.0, -2.0, 0.0).unwrap();
        for t in link_spectra(&synthetic_steps(seed), &w) {
            prop_assert!(t.points.windows(2).all(|p| p[1].eps < p[0].eps));
            prop_assert_eq!(t.speed.len(), t.points.len().saturating_sub(2));
            prop_assert!(t.speed.iter().all(|s| *s >= 0.0));
        }
    }
}
