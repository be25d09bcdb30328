use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use telegraph_core::basis::{basis_weights, UniformMesh};
use telegraph_core::problem::{BoundarySpec, TelegraphProblem};
use telegraph_core::solver::{assemble_step, CoefficientFrame, SchemeParams};
use telegraph_core::stability::{
    amplification_roots, fourier_coefficients, routh_hurwitz_conditions, scan_with_weights,
    stability_scan, AmplificationRoots, FourierCoefficients,
};

fn homogeneous(alpha: f64, beta: f64) -> TelegraphProblem {
    TelegraphProblem::new(
        alpha,
        beta,
        (0.0, 1.0),
        Arc::new(|_, _| 0.0),
        Arc::new(|_| 0.0),
        Arc::new(|_| 0.0),
        BoundarySpec::dirichlet(|_| 0.0, |_| 0.0),
    )
    .unwrap()
}

fn unit(n: usize, m: usize) -> CoefficientFrame {
    let mut v = vec![0.0; n];
    v[m] = 1.0;
    CoefficientFrame::new(v, 0.0)
}

/// Reads the stencil weights off assembled systems: the implicit row gives
/// (w1, w2), the response of the right-hand side to a unit coefficient in
/// C^j gives (w3, w4) and in C^{j-1} gives -(a1, a2).
#[test]
fn fourier_weights_match_assembled_rows() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(8);
    for _ in 0..20 {
        let alpha = rng.gen_range(0.0..10.0);
        let beta = rng.gen_range(0.0..5.0);
        let theta = rng.gen_range(0.0..=1.0);
        let dt = 10f64.powf(rng.gen_range(-3.0..0.0));
        let n_cells = rng.gen_range(10..50);
        let problem = homogeneous(alpha, beta);
        let mesh = UniformMesh::new(0.0, 1.0, n_cells).unwrap();
        let params = SchemeParams::new(theta, dt, 10.0).unwrap();
        let fc = fourier_coefficients(alpha, beta, theta, dt, &basis_weights(&mesh).unwrap());
        let n = mesh.n_coefficients();
        let m = n / 2;
        let zero = CoefficientFrame::new(vec![0.0; n], 0.0);

        let sys = assemble_step(&problem, &mesh, &params, &unit(n, m), Some(&zero), 0.0).unwrap();
        let row = m;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        assert!(close(sys.sub[row - 1], fc.w1) && close(sys.sup[row], fc.w1));
        assert!(close(sys.diag[row], fc.w2));
        // C_m appears in the rows of knots m-2, m-1, m (rows m-1, m, m+1).
        assert!(close(sys.rhs[m - 1], fc.w3), "{} vs {}", sys.rhs[m - 1], fc.w3);
        assert!(close(sys.rhs[m], fc.w4), "{} vs {}", sys.rhs[m], fc.w4);
        assert!(close(sys.rhs[m + 1], fc.w3));

        let sys = assemble_step(&problem, &mesh, &params, &zero, Some(&unit(n, m)), 0.0).unwrap();
        assert!(close(sys.rhs[m], -fc.a2) && close(sys.rhs[m + 1], -fc.a1));
    }
}

fn random_coefficients(rng: &mut impl Rng) -> FourierCoefficients {
    let alpha = rng.gen_range(0.0..10.0);
    let beta = rng.gen_range(0.0..5.0);
    let theta = rng.gen_range(0.0..=1.0);
    let dt = 10f64.powf(rng.gen_range(-3.0..0.5));
    let h = rng.gen_range(0.01..1.0);
    let w = telegraph_core::basis::BasisWeights::for_step(h).unwrap();
    fourier_coefficients(alpha, beta, theta, dt, &w)
}

#[test]
fn roots_satisfy_vieta() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(21);
    for _ in 0..1000 {
        let fc = random_coefficients(&mut rng);
        let phi = rng.gen_range(0.0..=PI);
        let (a, b, c) = fc.quadratic(phi);
        let AmplificationRoots::Pair(r1, r2) = amplification_roots(&fc, phi) else {
            continue;
        };
        let sum = r1 + r2;
        let prod = r1 * r2;
        let scale = 1.0 + (b / a).abs() + (c / a).abs();
        assert!((sum - Complex64::new(b / a, 0.0)).norm() <= 1e-12 * scale, "{fc:?} {phi}");
        assert!((prod - Complex64::new(c / a, 0.0)).norm() <= 1e-12 * scale, "{fc:?} {phi}");
        for r in [r1, r2] {
            let residual = a * r * r - b * r + c;
            assert!(residual.norm() <= 1e-10 * (a.abs() + b.abs() + c.abs()) * scale.powi(2));
        }
    }
}

#[test]
fn routh_hurwitz_agrees_with_root_magnitudes() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(22);
    let mut checked = [0usize; 2];
    for _ in 0..5000 {
        let a: f64 = rng.gen_range(0.1..2.0);
        let b: f64 = rng.gen_range(-4.0..4.0);
        let c: f64 = rng.gen_range(-2.0..2.0);
        // w2 = A, w4 = B, a2 = C at phi = pi/2.
        let fc = FourierCoefficients { w1: 0.0, w2: a, w3: 0.0, w4: b, a1: 0.0, a2: c, a5: 0.0, a6: 0.0 };
        let (s, d, m) = routh_hurwitz_conditions(&fc, PI / 2.0);
        let max = amplification_roots(&fc, PI / 2.0).max_magnitude();
        let margin = s.min(d).min(m);
        if margin.abs() < 1e-6 || (max - 1.0).abs() < 1e-6 {
            continue;
        }
        assert_eq!(margin > 0.0, max < 1.0, "A={a} B={b} C={c}: rh {margin}, |delta| {max}");
        checked[usize::from(max < 1.0)] += 1;
    }
    assert!(checked[0] > 100 && checked[1] > 100, "{checked:?}");
}

#[test]
fn implicit_weights_are_stable_on_random_parameters() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(23);
    for _ in 0..200 {
        let alpha = rng.gen_range(0.0..10.0);
        let beta = rng.gen_range(0.0..5.0);
        let theta = rng.gen_range(0.5..=1.0);
        let dt = 10f64.powf(rng.gen_range(-3.0..0.0));
        let n = rng.gen_range(4..100);
        let mesh = UniformMesh::new(0.0, PI, n).unwrap();
        let r = stability_scan(alpha, beta, theta, dt, &mesh, 181).unwrap();
        assert!(r.stable, "alpha={alpha} beta={beta} theta={theta} dt={dt} n={n}: {r:?}");
    }
}

#[test]
fn scan_reports_the_worst_sample() {
    let mesh = UniformMesh::new(0.0, PI, 40).unwrap();
    let w = basis_weights(&mesh).unwrap();
    let r = scan_with_weights(0.0, 0.0, 0.0, 1.0, &w, 721);
    let fc = fourier_coefficients(0.0, 0.0, 0.0, 1.0, &w);
    let at_worst = amplification_roots(&fc, r.worst_phi).max_magnitude();
    assert_eq!(at_worst, r.max_amplification);
    for i in 0..=720 {
        let phi = PI * i as f64 / 720.0;
        assert!(amplification_roots(&fc, phi).max_magnitude() <= r.max_amplification);
    }
}
