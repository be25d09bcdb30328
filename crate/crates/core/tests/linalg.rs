use std::sync::Arc;

use rand::{Rng, SeedableRng};
use telegraph_core::basis::UniformMesh;
use telegraph_core::linalg::{dense_solve_oracle, solve, CornerTridiagonalSystem, LinalgError};
use telegraph_core::problem::{builtin_problem, BoundaryKind, BoundarySpec, TelegraphProblem};
use telegraph_core::solver::{assemble_step, initial_coefficients, step, SchemeParams};

fn rel_diff(x: &[f64], y: &[f64]) -> f64 {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    x.iter().zip(y).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale
}

fn check_against_oracle(system: &CornerTridiagonalSystem, tol: f64) {
    let fast = solve(system).unwrap();
    let oracle = dense_solve_oracle(&system.to_dense(), &system.rhs).unwrap();
    let err = rel_diff(&fast, &oracle);
    assert!(err <= tol, "n={} relative difference {err:e}", system.size());
}

#[test]
fn random_dominant_systems_match_dense_elimination() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    for case in 0..200 {
        let n = if case < 20 { 4 + case } else { rng.gen_range(4..=500) };
        let mut sys = CornerTridiagonalSystem::zeros(n);
        for row in 0..n {
            let l: f64 = rng.gen_range(-1.0..1.0);
            let r: f64 = rng.gen_range(-1.0..1.0);
            let margin = rng.gen_range(0.1..3.0);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let c = sign * (l.abs() + r.abs() + margin);
            sys.set_row(row, [l, c, r], rng.gen_range(-10.0..10.0));
        }
        check_against_oracle(&sys, 1e-12);
    }
}

/// Same data, boundary conditions swapped to the requested kind using the
/// exact solution's trace.
fn with_kind(problem: &TelegraphProblem, kind: BoundaryKind) -> TelegraphProblem {
    if problem.boundary().kind == kind {
        return problem.clone();
    }
    let (a, b) = problem.domain();
    let p = Arc::new(problem.clone());
    let trace = |x: f64| {
        let p = Arc::clone(&p);
        let e = 1e-5;
        move |t: f64| match kind {
            BoundaryKind::Dirichlet => p.exact(x, t).unwrap(),
            BoundaryKind::Neumann => {
                (p.exact(x + e, t).unwrap() - p.exact(x - e, t).unwrap()) / (2.0 * e)
            }
        }
    };
    let boundary = match kind {
        BoundaryKind::Dirichlet => BoundarySpec::dirichlet(trace(a), trace(b)),
        BoundaryKind::Neumann => BoundarySpec::neumann(trace(a), trace(b)),
    };
    let (p1, p2, p3) = (Arc::clone(&p), Arc::clone(&p), Arc::clone(&p));
    TelegraphProblem::new(
        problem.alpha(),
        problem.beta(),
        (a, b),
        Arc::new(move |x, t| p1.forcing(x, t)),
        Arc::new(move |x| p2.initial_value(x)),
        Arc::new(move |x| p3.initial_velocity(x)),
        boundary,
    )
    .unwrap()
}

#[test]
fn assembled_systems_match_dense_elimination() {
    for id in 1..=5 {
        let base = builtin_problem(id).unwrap();
        for kind in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
            let problem = with_kind(&base, kind);
            let (a, b) = problem.domain();
            for (n, dt, theta) in [(10, 0.1, 0.5), (40, 0.01, 0.5), (25, 0.05, 1.0), (60, 0.001, 0.75)] {
                let mesh = UniformMesh::new(a, b, n).unwrap();
                let params = SchemeParams::new(theta, dt, 1.0).unwrap();
                let c0 = initial_coefficients(&problem, &mesh).unwrap();
                let first = assemble_step(&problem, &mesh, &params, &c0, None, 0.0).unwrap();
                check_against_oracle(&first, 1e-12);
                let c1 = step(&problem, &mesh, &params, &c0, None).unwrap();
                let second =
                    assemble_step(&problem, &mesh, &params, &c1, Some(&c0), dt).unwrap();
                check_against_oracle(&second, 1e-12);
            }
        }
    }
}

#[test]
fn residual_is_small_on_random_systems() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let n = 300;
    let mut sys = CornerTridiagonalSystem::zeros(n);
    for row in 0..n {
        sys.set_row(row, [rng.gen(), 3.0 + rng.gen::<f64>(), rng.gen()], rng.gen());
    }
    let x = solve(&sys).unwrap();
    assert!(sys.residual_inf(&x) < 1e-12);
}

#[test]
fn zero_pivot_is_reported() {
    let mut sys = CornerTridiagonalSystem::zeros(5);
    for row in 0..5 {
        sys.set_row(row, [1.0, 4.0, 1.0], 1.0);
    }
    sys.set_row(0, [0.0, 0.0, 1.0], 1.0);
    assert!(matches!(solve(&sys), Err(LinalgError::ZeroPivot { row: 0, .. })));
}
