use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use telegraph_core::basis::{basis_weights, evaluate_solution, DerivativeOrder, UniformMesh};
use telegraph_core::metrics::error_norms;
use telegraph_core::problem::{builtin_problem, BoundaryKind, TelegraphProblem};
use telegraph_core::solver::{run, CoefficientFrame, SchemeParams, SolverError, Stepper};

fn at(frame: &CoefficientFrame, x: f64, mesh: &UniformMesh, order: DerivativeOrder) -> f64 {
    evaluate_solution(frame.values(), x, mesh, order).unwrap()
}

/// The discrete equation at knot `x`, written as a difference quotient and
/// evaluated through the basis functions directly:
///
/// (U+ - 2U + U-)/k^2 + 2 alpha (U+ - U)/k + beta^2 (th U+ + (1-th) U)
///     - (th Uxx+ + (1-th) Uxx) - q(x, t_j)
fn recurrence_residual(
    problem: &TelegraphProblem,
    mesh: &UniformMesh,
    frames: [&CoefficientFrame; 3],
    x: f64,
    t_j: f64,
    k: f64,
    theta: f64,
) -> (f64, f64) {
    let [prev, now, next] = frames;
    let v = DerivativeOrder::Value;
    let d2 = DerivativeOrder::Second;
    let (um, u, up) = (at(prev, x, mesh, v), at(now, x, mesh, v), at(next, x, mesh, v));
    let (uxx, uxxp) = (at(now, x, mesh, d2), at(next, x, mesh, d2));
    let (alpha, beta2) = (problem.alpha(), problem.beta().powi(2));
    let terms = [
        (up - 2.0 * u + um) / (k * k),
        2.0 * alpha * (up - u) / k,
        beta2 * (theta * up + (1.0 - theta) * u),
        -(theta * uxxp + (1.0 - theta) * uxx),
        -problem.forcing(x, t_j),
    ];
    let scale = terms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (terms.iter().sum(), scale)
}

#[test]
fn interior_rows_satisfy_the_recurrence() {
    let problem = builtin_problem(1).unwrap();
    let mesh = UniformMesh::new(0.0, PI, 40).unwrap();
    let (k, theta) = (0.01, 0.5);
    let params = SchemeParams::new(theta, k, 1.0).unwrap();
    let mut stepper = Stepper::new(&problem, mesh, params).unwrap();
    for _ in 0..6 {
        stepper.advance().unwrap();
    }
    let prev = stepper.current().clone();
    let now = stepper.advance().unwrap().clone();
    let next = stepper.advance().unwrap().clone();
    let t_j = now.time();

    let mut rng = rand::rngs::StdRng::seed_from_u64(14);
    for _ in 0..5 {
        let i = rng.gen_range(0..=40);
        let x = mesh.knot(i);
        let (r, scale) = recurrence_residual(&problem, &mesh, [&prev, &now, &next], x, t_j, k, theta);
        // Division by k^2 amplifies rounding in U by 1e4.
        assert!(r.abs() <= 1e-9 * scale.max(1.0), "knot {i}: residual {r:e}");
    }
}

#[test]
fn interior_rows_hold_for_other_problems() {
    for (id, theta) in [(3, 1.0), (4, 0.75), (5, 0.5)] {
        let problem = builtin_problem(id).unwrap();
        let (a, b) = problem.domain();
        let mesh = UniformMesh::new(a, b, 20).unwrap();
        let k = 0.02;
        let params = SchemeParams::new(theta, k, 1.0).unwrap();
        let mut stepper = Stepper::new(&problem, mesh, params).unwrap();
        stepper.advance().unwrap();
        let prev = stepper.current().clone();
        let now = stepper.advance().unwrap().clone();
        let next = stepper.advance().unwrap().clone();
        for i in 0..=20 {
            let x = mesh.knot(i);
            let (r, scale) =
                recurrence_residual(&problem, &mesh, [&prev, &now, &next], x, now.time(), k, theta);
            assert!(r.abs() <= 1e-9 * scale.max(1.0), "problem {id} knot {i}: {r:e}");
        }
    }
}

#[test]
fn first_step_uses_initial_velocity() {
    // With the ghost level C^{-1} = C^1 - 2k g2 the first step is the
    // general recurrence with that substitution.
    let problem = builtin_problem(4).unwrap();
    let mesh = UniformMesh::new(0.0, 1.0, 16).unwrap();
    let (k, theta) = (0.05, 0.5);
    let params = SchemeParams::new(theta, k, 1.0).unwrap();
    let mut stepper = Stepper::new(&problem, mesh, params).unwrap();
    let c0 = stepper.current().clone();
    let c1 = stepper.advance().unwrap().clone();
    for i in 0..=16 {
        let x = mesh.knot(i);
        let (r, scale) = {
            let v = DerivativeOrder::Value;
            let d2 = DerivativeOrder::Second;
            let up = at(&c1, x, &mesh, v);
            let um = up - 2.0 * k * problem.initial_velocity(x);
            let u = at(&c0, x, &mesh, v);
            let (uxx, uxxp) = (at(&c0, x, &mesh, d2), at(&c1, x, &mesh, d2));
            let terms = [
                (up - 2.0 * u + um) / (k * k),
                2.0 * problem.alpha() * (up - u) / k,
                problem.beta().powi(2) * (theta * up + (1.0 - theta) * u),
                -(theta * uxxp + (1.0 - theta) * uxx),
                -problem.forcing(x, 0.0),
            ];
            (terms.iter().sum::<f64>(), terms.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        };
        assert!(r.abs() <= 1e-9 * scale.max(1.0), "knot {i}: {r:e}");
    }
}

#[test]
fn boundary_conditions_hold_at_every_step() {
    for id in 1..=5 {
        let problem = builtin_problem(id).unwrap();
        let (a, b) = problem.domain();
        let mesh = UniformMesh::new(a, b, 30).unwrap();
        let params = SchemeParams::new(0.5, 0.01, 1.0).unwrap();
        let mut stepper = Stepper::new(&problem, mesh, params).unwrap();
        for _ in 0..100 {
            let frame = stepper.advance().unwrap().clone();
            let t = frame.time();
            let (order, tol) = match problem.boundary().kind {
                BoundaryKind::Dirichlet => (DerivativeOrder::Value, 1e-12),
                BoundaryKind::Neumann => (DerivativeOrder::First, 1e-9),
            };
            let left = at(&frame, a, &mesh, order);
            let right = at(&frame, b, &mesh, order);
            let scale = 1.0f64.max(problem.boundary_right(t).abs());
            assert!((left - problem.boundary_left(t)).abs() <= tol * scale, "problem {id} t={t}");
            assert!((right - problem.boundary_right(t)).abs() <= tol * scale, "problem {id} t={t}");
        }
    }
}

#[test]
fn initial_frame_interpolates_and_matches_slopes() {
    for id in 1..=5 {
        let problem = builtin_problem(id).unwrap();
        let (a, b) = problem.domain();
        let mesh = UniformMesh::new(a, b, 24).unwrap();
        let params = SchemeParams::new(0.5, 0.01, 1.0).unwrap();
        let stepper = Stepper::new(&problem, mesh, params).unwrap();
        let c0 = stepper.current();
        for x in mesh.knots() {
            let u = at(c0, x, &mesh, DerivativeOrder::Value);
            assert!((u - problem.initial_value(x)).abs() < 1e-12, "problem {id} x={x}");
        }
        for x in [a, b] {
            let s = at(c0, x, &mesh, DerivativeOrder::First);
            assert!((s - problem.initial_slope(x, 1e-6)).abs() < 1e-10, "problem {id} x={x}");
        }
    }
}

#[test]
fn spatial_error_decreases_with_refinement() {
    // Problem 1 with a small step so the time error stays below the
    // spatial one.
    let problem = builtin_problem(1).unwrap();
    let mut errors = Vec::new();
    for n in [8, 16, 32] {
        let mesh = UniformMesh::new(0.0, PI, n).unwrap();
        let params = SchemeParams::new(0.5, 1e-4, 0.1).unwrap();
        let history = run(&problem, &mesh, &params, &[0.1]).unwrap();
        errors.push(error_norms(&history.frames[0], &problem, &mesh).unwrap().l_inf);
    }
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn time_weight_changes_the_solution_only_slightly() {
    // Problem 3 at moderate resolution: theta = 1/2 and theta = 1 differ by
    // O(k) but both track the exact solution.
    let problem = builtin_problem(3).unwrap();
    let mesh = UniformMesh::new(0.0, 1.0, 20).unwrap();
    let mut out = Vec::new();
    for theta in [0.5, 0.75, 1.0] {
        let params = SchemeParams::new(theta, 0.01, 1.0).unwrap();
        let history = run(&problem, &mesh, &params, &[1.0]).unwrap();
        let w = basis_weights(&mesh).unwrap();
        out.push(history.frames[0].knot_values(&w));
        let e = error_norms(&history.frames[0], &problem, &mesh).unwrap();
        assert!(e.l_inf < 5e-3, "theta {theta}: {e:?}");
    }
    let diff = out[0].iter().zip(&out[2]).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(diff > 0.0 && diff < 5e-3, "{diff}");
}

#[test]
fn runs_are_deterministic() {
    let problem = builtin_problem(2).unwrap();
    let mesh = UniformMesh::new(0.0, 2.0, 33).unwrap();
    let params = SchemeParams::new(0.5, 0.01, 1.0).unwrap();
    let a = run(&problem, &mesh, &params, &[0.5, 1.0]).unwrap();
    let b = run(&problem, &mesh, &params, &[0.5, 1.0]).unwrap();
    for (fa, fb) in a.frames.iter().zip(&b.frames) {
        assert_eq!(fa.values(), fb.values());
        assert_eq!(fa.time(), fb.time());
    }
}

#[test]
fn run_rejects_bad_output_times() {
    let problem = builtin_problem(1).unwrap();
    let mesh = UniformMesh::new(0.0, PI, 10).unwrap();
    let params = SchemeParams::new(0.5, 0.1, 1.0).unwrap();
    assert!(matches!(
        run(&problem, &mesh, &params, &[0.55]),
        Err(SolverError::OutputTime { .. })
    ));
    assert!(run(&problem, &mesh, &params, &[0.5, 0.3]).is_err());
    assert!(run(&problem, &mesh, &params, &[1.5]).is_err());
    let wrong_domain = UniformMesh::new(0.0, 1.0, 10).unwrap();
    assert!(matches!(
        run(&problem, &wrong_domain, &params, &[0.5]),
        Err(SolverError::Domain { .. })
    ));
}
