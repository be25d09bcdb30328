//! Cubic trigonometric B-spline basis on a uniform mesh.
//!
//! `TB_i` is supported on the four cells `[x_i, x_{i+4}]` and is built from
//! the half-angle sines
//!
//! ```text
//! xi_k(x)   = sin((x - x_k) / 2)
//! zeta_k(x) = sin((x_k - x) / 2)
//! ```
//!
//! normalised by `sin(h/2) sin(h) sin(3h/2)`. Knots outside `[a, b]` are
//! extended uniformly with spacing `h`, so basis indices `-3..=N-1` are all
//! addressable.

use std::ops::{Add, Mul};

use thiserror::Error;

/// Smallest magnitude accepted for any trigonometric denominator.
const DEGENERATE_EPS: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("degenerate mesh: {quantity} = {value:e} vanishes for h = {h}")]
    DegenerateMesh {
        quantity: &'static str,
        value: f64,
        h: f64,
    },
    #[error("x = {x} lies outside the domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("derivative order {0} is not supported (use 0, 1 or 2)")]
    DerivativeOrder(u8),
}

/// Uniform partition `a = x_0 < x_1 < ... < x_N = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformMesh {
    a: f64,
    b: f64,
    n_cells: usize,
    h: f64,
}

impl UniformMesh {
    pub fn new(a: f64, b: f64, n_cells: usize) -> Result<Self, BasisError> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(BasisError::InvalidMesh(format!(
                "domain [{a}, {b}] must be finite with b > a"
            )));
        }
        if n_cells < 3 {
            return Err(BasisError::InvalidMesh(format!(
                "need at least 3 cells, got {n_cells}"
            )));
        }
        let h = (b - a) / n_cells as f64;
        if !(h > 0.0 && h < std::f64::consts::PI) {
            return Err(BasisError::InvalidMesh(format!(
                "cell width h = {h} must lie in (0, pi)"
            )));
        }
        Ok(Self { a, b, n_cells, h })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of spline coefficients, `N + 3`.
    pub fn n_coefficients(&self) -> usize {
        self.n_cells + 3
    }

    /// Knot `x_i`; any integer index is valid (extended knots are uniform).
    /// `x_N` is pinned to `b` exactly.
    pub fn knot(&self, i: isize) -> f64 {
        if i == self.n_cells as isize {
            self.b
        } else {
            self.a + i as f64 * self.h
        }
    }

    /// Mesh knots `x_0 ..= x_N`.
    pub fn knots(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_cells as isize).map(|i| self.knot(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * (self.b - self.a);
        x >= self.a - slack && x <= self.b + slack
    }
}

/// Knot values of `TB_i` and its first two derivatives.
///
/// | | `x_i` | `x_{i+1}` | `x_{i+2}` | `x_{i+3}` | `x_{i+4}` |
/// |---|---|---|---|---|---|
/// | `TB_i` | 0 | a1 | a2 | a1 | 0 |
/// | `TB_i'` | 0 | a4 | 0 | a3 | 0 |
/// | `TB_i''` | 0 | a5 | a6 | a5 | 0 |
///
/// `a3 = -a4 < 0`: the spline rises on its left half, so the positive
/// slope `a4` sits at `x_{i+1}`. The collocation formula
/// `U_x(x_i) = a3 C_{i-3} + a4 C_{i-1}` uses this orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisWeights {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
}

impl BasisWeights {
    pub fn for_step(h: f64) -> Result<Self, BasisError> {
        let half = h / 2.0;
        let s_half = half.sin();
        let s_one = h.sin();
        let s_three_half = (1.5 * h).sin();
        let one_two_cos = 1.0 + 2.0 * h.cos();
        let mixed_cos = 2.0 * half.cos() + (1.5 * h).cos();
        for (quantity, value) in [
            ("sin(h/2)", s_half),
            ("sin(h)", s_one),
            ("sin(3h/2)", s_three_half),
            ("1 + 2cos(h)", one_two_cos),
            ("2cos(h/2) + cos(3h/2)", mixed_cos),
        ] {
            if value.abs() <= DEGENERATE_EPS || value.is_nan() {
                return Err(BasisError::DegenerateMesh { quantity, value, h });
            }
        }

        let slope = 3.0 / (4.0 * s_three_half);
        Ok(Self {
            a1: s_half * s_half / (s_one * s_three_half),
            a2: 2.0 / one_two_cos,
            a3: -slope,
            a4: slope,
            a5: 3.0 * (1.0 + 3.0 * h.cos()) / (16.0 * s_half * s_half * mixed_cos),
            a6: -3.0 * half.cos().powi(2) / (2.0 * s_half * s_half * one_two_cos),
        })
    }
}

pub fn basis_weights(mesh: &UniformMesh) -> Result<BasisWeights, BasisError> {
    BasisWeights::for_step(mesh.h())
}

/// Value and first two derivatives of a function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BasisValue {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl BasisValue {
    pub fn get(&self, order: DerivativeOrder) -> f64 {
        match order {
            DerivativeOrder::Value => self.value,
            DerivativeOrder::First => self.d1,
            DerivativeOrder::Second => self.d2,
        }
    }

    fn scale(self, s: f64) -> Self {
        Self {
            value: self.value * s,
            d1: self.d1 * s,
            d2: self.d2 * s,
        }
    }
}

impl Add for BasisValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            d1: self.d1 + rhs.d1,
            d2: self.d2 + rhs.d2,
        }
    }
}

// Leibniz rule up to second order.
impl Mul for BasisValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            value: self.value * rhs.value,
            d1: self.d1 * rhs.value + self.value * rhs.d1,
            d2: self.d2 * rhs.value + 2.0 * self.d1 * rhs.d1 + self.value * rhs.d2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivativeOrder {
    Value,
    First,
    Second,
}

impl TryFrom<u8> for DerivativeOrder {
    type Error = BasisError;
    fn try_from(order: u8) -> Result<Self, BasisError> {
        match order {
            0 => Ok(Self::Value),
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            other => Err(BasisError::DerivativeOrder(other)),
        }
    }
}

/// `sin((x - x_k)/2)` with derivatives in `x`.
fn xi(x: f64, knot: f64) -> BasisValue {
    let arg = (x - knot) / 2.0;
    let (s, c) = arg.sin_cos();
    BasisValue {
        value: s,
        d1: c / 2.0,
        d2: -s / 4.0,
    }
}

/// `sin((x_k - x)/2)` with derivatives in `x`.
fn zeta(x: f64, knot: f64) -> BasisValue {
    let arg = (knot - x) / 2.0;
    let (s, c) = arg.sin_cos();
    BasisValue {
        value: s,
        d1: -c / 2.0,
        d2: -s / 4.0,
    }
}

/// `TB_i(x)` together with its first and second derivatives.
pub fn eval_basis_full(i: isize, x: f64, mesh: &UniformMesh) -> BasisValue {
    let h = mesh.h();
    let x0 = mesh.knot(i);
    let offset = x - x0;
    if offset < 0.0 || offset > 4.0 * h {
        return BasisValue::default();
    }
    // Points on a shared knot take the left branch.
    let segment = ((offset / h).ceil() as isize - 1).clamp(0, 3);
    let k = |j: isize| x0 + j as f64 * h;
    let omega = (h / 2.0).sin() * h.sin() * (1.5 * h).sin();

    let raw = match segment {
        0 => {
            let p = xi(x, k(0));
            p * p * p
        }
        1 => {
            let xi0 = xi(x, k(0));
            let xi1 = xi(x, k(1));
            xi0 * (xi0 * zeta(x, k(2)) + zeta(x, k(3)) * xi1) + zeta(x, k(4)) * xi1 * xi1
        }
        2 => {
            let z3 = zeta(x, k(3));
            let z4 = zeta(x, k(4));
            z4 * (xi(x, k(1)) * z3 + z4 * xi(x, k(2))) + xi(x, k(0)) * z3 * z3
        }
        _ => {
            let p = zeta(x, k(4));
            p * p * p
        }
    };
    raw.scale(1.0 / omega)
}

/// `TB_i(x)` or one of its first two derivatives; zero outside `[x_i, x_{i+4}]`.
pub fn eval_basis(i: isize, x: f64, mesh: &UniformMesh, order: DerivativeOrder) -> f64 {
    eval_basis_full(i, x, mesh).get(order)
}

/// `sum_k C_k TB_k(x)` with `coeffs[0]` holding `C_{-3}`.
pub fn evaluate_solution(
    coeffs: &[f64],
    x: f64,
    mesh: &UniformMesh,
    order: DerivativeOrder,
) -> Result<f64, BasisError> {
    let expected = mesh.n_coefficients();
    if coeffs.len() != expected {
        return Err(BasisError::CoefficientCount {
            expected,
            got: coeffs.len(),
        });
    }
    if !mesh.contains(x) {
        return Err(BasisError::OutOfDomain {
            x,
            a: mesh.a(),
            b: mesh.b(),
        });
    }
    let n = mesh.n_cells() as isize;
    let cell = (((x - mesh.a()) / mesh.h()).floor() as isize).clamp(0, n - 1);
    let total = ((cell - 3)..=cell)
        .map(|k| coeffs[(k + 3) as usize] * eval_basis(k, x, mesh, order))
        .sum();
    Ok(total)
}
