//! Von Neumann analysis of the collocation recurrence.
//!
//! Substituting the Fourier mode `C_m^j = delta^j exp(i m phi)` into the
//! interior recurrence gives the amplification quadratic
//!
//! ```text
//! A delta^2 - B delta + C = 0
//! A = w2 + 2 w1 cos(phi)
//! B = w4 + 2 w3 cos(phi)
//! C = a2 + 2 a1 cos(phi)
//! ```
//!
//! and the scheme is stable when both roots stay in the closed unit disk
//! for every `phi` in `[0, pi]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::basis::{BasisError, BasisWeights, UniformMesh};

/// Leading coefficients below this are treated as a degenerate quadratic.
pub const LEADING_EPS: f64 = 1e-14;
/// Slack on the unit-disk test.
pub const STABILITY_SLACK: f64 = 1e-12;
/// Half-degree resolution over `[0, pi]`.
pub const DEFAULT_PHI_SAMPLES: usize = 721;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierCoefficients {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
    pub a1: f64,
    pub a2: f64,
    pub a5: f64,
    pub a6: f64,
}

impl FourierCoefficients {
    /// `(A, B, C)` at wave number `phi`.
    pub fn quadratic(&self, phi: f64) -> (f64, f64, f64) {
        let c = phi.cos();
        (
            self.w2 + 2.0 * self.w1 * c,
            self.w4 + 2.0 * self.w3 * c,
            self.a2 + 2.0 * self.a1 * c,
        )
    }
}

pub fn fourier_coefficients(
    alpha: f64,
    beta: f64,
    theta: f64,
    dt: f64,
    weights: &BasisWeights,
) -> FourierCoefficients {
    let k2 = dt * dt;
    let beta2 = beta * beta;
    let implicit = 1.0 + 2.0 * alpha * dt + k2 * theta * beta2;
    let explicit = 2.0 + 2.0 * alpha * dt - (1.0 - theta) * k2 * beta2;
    let w = weights;
    FourierCoefficients {
        w1: implicit * w.a1 - k2 * theta * w.a5,
        w2: implicit * w.a2 - k2 * theta * w.a6,
        w3: explicit * w.a1 + (1.0 - theta) * k2 * w.a5,
        w4: explicit * w.a2 + (1.0 - theta) * k2 * w.a6,
        a1: w.a1,
        a2: w.a2,
        a5: w.a5,
        a6: w.a6,
    }
}

/// Roots of the amplification quadratic at one wave number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplificationRoots {
    Pair(Complex64, Complex64),
    /// `|A|` vanished: the single root of `-B delta + C = 0`, the other
    /// root having escaped to infinity.
    Degenerate(Complex64),
}

impl AmplificationRoots {
    pub fn max_magnitude(&self) -> f64 {
        match self {
            AmplificationRoots::Pair(r1, r2) => r1.norm().max(r2.norm()),
            AmplificationRoots::Degenerate(_) => f64::INFINITY,
        }
    }
}

pub fn amplification_roots(fc: &FourierCoefficients, phi: f64) -> AmplificationRoots {
    let (a, b, c) = fc.quadratic(phi);
    if a.abs() < LEADING_EPS {
        let root = if b == 0.0 { f64::INFINITY } else { c / b };
        return AmplificationRoots::Degenerate(Complex64::new(root, 0.0));
    }
    // a d^2 - b d + c = 0
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        // Pick the cancellation-free root first, recover the other from the
        // product c / a.
        let s = disc.sqrt();
        let q = 0.5 * (b + b.signum() * s);
        if q == 0.0 {
            return AmplificationRoots::Pair(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        }
        let r1 = q / a;
        let r2 = c / q;
        AmplificationRoots::Pair(Complex64::new(r1, 0.0), Complex64::new(r2, 0.0))
    } else {
        let re = b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        AmplificationRoots::Pair(Complex64::new(re, im), Complex64::new(re, -im))
    }
}

/// `(A + B + C, A - C, A - B + C)`; all three nonnegative means both roots
/// lie in the closed unit disk.
pub fn routh_hurwitz_conditions(fc: &FourierCoefficients, phi: f64) -> (f64, f64, f64) {
    let (a, b, c) = fc.quadratic(phi);
    (a + b + c, a - c, a - b + c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub max_amplification: f64,
    pub worst_phi: f64,
    /// Routh-Hurwitz quantities at `phi = pi`.
    pub rh_conditions: (f64, f64, f64),
    pub stable: bool,
}

/// Uniform `phi` grid on `[0, pi]`, endpoints included.
pub fn phi_grid(samples: usize) -> impl Iterator<Item = f64> {
    let last = samples.saturating_sub(1).max(1);
    (0..samples).map(move |i| if i == last { PI } else { PI * i as f64 / last as f64 })
}

/// Fails only for `phi_samples < 2` or a degenerate mesh.
pub fn stability_scan(
    alpha: f64,
    beta: f64,
    theta: f64,
    dt: f64,
    mesh: &UniformMesh,
    phi_samples: usize,
) -> Result<StabilityReport, BasisError> {
    let weights = BasisWeights::for_step(mesh.h())?;
    Ok(scan_with_weights(alpha, beta, theta, dt, &weights, phi_samples))
}

/// Same as [`stability_scan`] for precomputed weights.
///
/// # Panics
///
/// If `phi_samples < 2`.
pub fn scan_with_weights(
    alpha: f64,
    beta: f64,
    theta: f64,
    dt: f64,
    weights: &BasisWeights,
    phi_samples: usize,
) -> StabilityReport {
    assert!(phi_samples >= 2, "need at least two phi samples");
    let fc = fourier_coefficients(alpha, beta, theta, dt, weights);
    let (mut worst, mut worst_phi) = (0.0f64, 0.0);
    for phi in phi_grid(phi_samples) {
        let m = amplification_roots(&fc, phi).max_magnitude();
        // NaN counts as unstable.
        if m > worst || m.is_nan() {
            worst = if m.is_nan() { f64::INFINITY } else { m };
            worst_phi = phi;
        }
    }
    StabilityReport {
        max_amplification: worst,
        worst_phi,
        rh_conditions: routh_hurwitz_conditions(&fc, PI),
        stable: worst <= 1.0 + STABILITY_SLACK,
    }
}
