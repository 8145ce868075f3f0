use std::f64::consts::PI;

use curvspec::par::Execution;
use curvspec::shooting::{integrate_ivp, slope_from_amplitude};
use curvspec::spectrum::{
    solve_nodal, spectrum_interval, trace_branch_with, NodalClass, Settings, Sign,
};
use curvspec::Error;

fn class(n: u32, nu: Sign) -> NodalClass {
    NodalClass::new(n, nu).unwrap()
}

#[test]
fn three_hump_zeros_confirmed_by_shooting() {
    let sol = solve_nodal(-1.0, 10.0 * PI * PI, class(3, Sign::Plus), &Settings::default()).unwrap();
    let traj = integrate_ivp(-1.0, sol.lambda, sol.boundary_slope, 1.0, 1e-12).unwrap();
    let zeros = traj.interior_zeros(1e-6).unwrap();
    assert_eq!(zeros.len(), 2);
    assert!((zeros[0] - 1.0 / 3.0).abs() < 1e-7);
    assert!((zeros[1] - 2.0 / 3.0).abs() < 1e-7);
    assert!(traj.end().u.abs() < 1e-6);
}

#[test]
fn profile_matches_shooting_replay() {
    for &(kappa, lambda) in &[(1.0, 6.0), (-1.0, 20.0), (0.5, 8.0)] {
        let sol = solve_nodal(kappa, lambda, class(1, Sign::Plus), &Settings::default()).unwrap();
        let traj = integrate_ivp(kappa, lambda, sol.boundary_slope, 1.0, 1e-12).unwrap();
        let sup = sol
            .grid
            .iter()
            .map(|p| (traj.eval(p.x).unwrap() - p.u).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-6, "kappa {kappa}: {sup}");
    }
}

#[test]
fn negative_class_is_reflection() {
    let s = Settings::default();
    let p = solve_nodal(1.0, 6.0, class(2, Sign::Plus), &s);
    // λ = 6 lies below the n = 2 Euclidean interval.
    assert!(matches!(p, Err(Error::NoSolution { .. })));
    let plus = solve_nodal(1.0, 6.0, class(1, Sign::Plus), &s).unwrap();
    let minus = solve_nodal(1.0, 6.0, class(1, Sign::Minus), &s).unwrap();
    for (a, b) in plus.grid.iter().zip(&minus.grid) {
        assert_eq!(a.u, -b.u);
    }
    assert_eq!(plus.boundary_slope, -minus.boundary_slope);
}

#[test]
fn solution_exists_exactly_inside_interval() {
    let s = Settings::default();
    for &kappa in &[2.0, -2.0] {
        for n in 1..=2 {
            let iv = spectrum_interval(kappa, n).unwrap();
            let inside = if iv.upper.is_finite() {
                0.5 * (iv.lower + iv.upper)
            } else {
                1.5 * iv.lower
            };
            assert!(solve_nodal(kappa, inside, class(n, Sign::Plus), &s).is_ok());
            assert!(solve_nodal(kappa, iv.lower * 0.98, class(n, Sign::Plus), &s).is_err());
        }
    }
}

#[test]
fn sequential_and_parallel_branches_agree() {
    let grid: Vec<f64> = (1..=16).map(|k| 0.025 * k as f64).collect();
    let seq = Settings {
        execution: Execution::Sequential,
        ..Settings::default()
    };
    let par = Settings {
        execution: Execution::Parallel,
        ..Settings::default()
    };
    for &kappa in &[1.0, -1.0] {
        let a = trace_branch_with(kappa, class(2, Sign::Plus), &grid, &seq).unwrap();
        let b = trace_branch_with(kappa, class(2, Sign::Plus), &grid, &par).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn branch_slopes_match_closed_form() {
    let grid = [0.1, 0.2, 0.3, 0.4];
    let br = trace_branch_with(-1.0, class(1, Sign::Plus), &grid, &Settings::default()).unwrap();
    for p in &br.points {
        let b = slope_from_amplitude(-1.0, p.lambda, p.xi).unwrap();
        assert_eq!(b, p.b);
        assert!(p.b < 1.0);
        assert!(p.residual_j.abs() < 1e-10);
    }
}

#[test]
fn infeasible_euclidean_amplitudes_are_skipped() {
    // Beyond 1/(2B) no one-hump Euclidean solution exists.
    let grid = [0.2, 0.5, 0.9, 1.2];
    let br = trace_branch_with(1.0, class(1, Sign::Plus), &grid, &Settings::default()).unwrap();
    assert_eq!(br.points.len(), 2);
    assert_eq!(br.skipped.len(), 2);
}
