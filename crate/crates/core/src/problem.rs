//! Telegraph-equation problem instances
//!
//! `u_tt + 2 alpha u_t + beta^2 u = u_xx + q(x, t)` on `[a, b]`, with
//! `u(x, 0) = g1(x)`, `u_t(x, 0) = g2(x)` and either Dirichlet or Neumann
//! data at both ends.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::basis::UniformMesh;

pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tolerance for `exact(x, 0) = g1(x)` and Dirichlet corner agreement.
pub const VALUE_COMPAT_TOL: f64 = 1e-10;
/// Tolerance for Neumann corner agreement against a differenced `g1'`.
pub const SLOPE_COMPAT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("unknown builtin problem {0} (expected 1..=5)")]
    UnknownId(u32),
    #[error("invalid problem: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryKind::Dirichlet => write!(f, "dirichlet"),
            BoundaryKind::Neumann => write!(f, "neumann"),
        }
    }
}

/// Boundary data: values (`f1`, `f2`) for Dirichlet, slopes (`w1`, `w2`)
/// for Neumann.
#[derive(Clone)]
pub struct BoundarySpec {
    pub kind: BoundaryKind,
    pub left: TimeFn,
    pub right: TimeFn,
}

impl BoundarySpec {
    pub fn dirichlet(
        left: impl Fn(f64) -> f64 + Send + Sync + 'static,
        right: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: BoundaryKind::Dirichlet,
            left: Arc::new(left),
            right: Arc::new(right),
        }
    }

    pub fn neumann(
        left: impl Fn(f64) -> f64 + Send + Sync + 'static,
        right: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: BoundaryKind::Neumann,
            left: Arc::new(left),
            right: Arc::new(right),
        }
    }
}

impl fmt::Debug for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundarySpec")
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub struct TelegraphProblem {
    name: String,
    alpha: f64,
    beta: f64,
    a: f64,
    b: f64,
    forcing: SpaceTimeFn,
    initial_value: SpaceFn,
    initial_slope: Option<SpaceFn>,
    initial_velocity: SpaceFn,
    boundary: BoundarySpec,
    exact: Option<SpaceTimeFn>,
    max_time: Option<f64>,
}

impl fmt::Debug for TelegraphProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TelegraphProblem")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("domain", &(self.a, self.b))
            .field("boundary", &self.boundary)
            .field("has_exact", &self.exact.is_some())
            .field("max_time", &self.max_time)
            .finish_non_exhaustive()
    }
}

impl TelegraphProblem {
    pub fn new(
        alpha: f64,
        beta: f64,
        domain: (f64, f64),
        forcing: SpaceTimeFn,
        initial_value: SpaceFn,
        initial_velocity: SpaceFn,
        boundary: BoundarySpec,
    ) -> Result<Self, ProblemError> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(ProblemError::Invalid(format!(
                "domain [{a}, {b}] must be finite with b > a"
            )));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(ProblemError::Invalid(format!("alpha = {alpha} must be >= 0")));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(ProblemError::Invalid(format!("beta = {beta} must be >= 0")));
        }
        Ok(Self {
            name: "custom".to_string(),
            alpha,
            beta,
            a,
            b,
            forcing,
            initial_value,
            initial_slope: None,
            initial_velocity,
            boundary,
            exact: None,
            max_time: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_exact(mut self, exact: SpaceTimeFn) -> Self {
        self.exact = Some(exact);
        self
    }

    /// Analytic `g1'`; without it the slope is central-differenced.
    pub fn with_initial_slope(mut self, slope: SpaceFn) -> Self {
        self.initial_slope = Some(slope);
        self
    }

    /// Latest time at which the problem data stay finite.
    pub fn with_max_time(mut self, t: f64) -> Self {
        self.max_time = Some(t);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn boundary(&self) -> &BoundarySpec {
        &self.boundary
    }

    pub fn max_time(&self) -> Option<f64> {
        self.max_time
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn forcing(&self, x: f64, t: f64) -> f64 {
        (self.forcing)(x, t)
    }

    pub fn initial_value(&self, x: f64) -> f64 {
        (self.initial_value)(x)
    }

    pub fn initial_velocity(&self, x: f64) -> f64 {
        (self.initial_velocity)(x)
    }

    /// `g1'(x)`: analytic when supplied, otherwise a central difference
    /// with the given step.
    pub fn initial_slope(&self, x: f64, fd_step: f64) -> f64 {
        match &self.initial_slope {
            Some(f) => f(x),
            None => {
                let g = &self.initial_value;
                (g(x + fd_step) - g(x - fd_step)) / (2.0 * fd_step)
            }
        }
    }

    pub fn has_analytic_slope(&self) -> bool {
        self.initial_slope.is_some()
    }

    pub fn boundary_left(&self, t: f64) -> f64 {
        (self.boundary.left)(t)
    }

    pub fn boundary_right(&self, t: f64) -> f64 {
        (self.boundary.right)(t)
    }

    pub fn exact(&self, x: f64, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|u| u(x, t))
    }
}

fn space_time(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> SpaceTimeFn {
    Arc::new(f)
}

fn space(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SpaceFn {
    Arc::new(f)
}

/// The five reference problems.
pub fn builtin_problem(id: u32) -> Result<TelegraphProblem, ProblemError> {
    let problem = match id {
        1 => {
            let (alpha, beta) = (2.0, 2f64.sqrt());
            // For u = e^{-t} sin x the forcing is (2 - 2 alpha + beta^2) u,
            // which vanishes for these coefficients.
            let gain = 2.0 - 2.0 * alpha + beta * beta;
            TelegraphProblem::new(
                alpha,
                beta,
                (0.0, PI),
                space_time(move |x, t| gain * (-t).exp() * x.sin()),
                space(f64::sin),
                space(|x| -x.sin()),
                BoundarySpec::dirichlet(|_| 0.0, |_| 0.0),
            )?
            .with_initial_slope(space(f64::cos))
            .with_exact(space_time(|x, t| (-t).exp() * x.sin()))
        }
        2 => {
            let (alpha, beta) = (10.0, 5.0);
            TelegraphProblem::new(
                alpha,
                beta,
                (0.0, 2.0),
                space_time(move |x, t| {
                    let s = ((x + t) / 2.0).tan();
                    alpha * (1.0 + s * s) + beta * beta * s
                }),
                space(|x| (x / 2.0).tan()),
                space(|x| 0.5 * (1.0 + (x / 2.0).tan().powi(2))),
                BoundarySpec::dirichlet(|t| (t / 2.0).tan(), |t| ((2.0 + t) / 2.0).tan()),
            )?
            .with_initial_slope(space(|x| 0.5 * (1.0 + (x / 2.0).tan().powi(2))))
            .with_exact(space_time(|x, t| ((x + t) / 2.0).tan()))
            .with_max_time(1.0)
        }
        3 => TelegraphProblem::new(
            0.5,
            1.0,
            (0.0, 1.0),
            space_time(|x, t| {
                let decay = (-t).exp();
                (2.0 - 2.0 * t + t * t) * (x - x * x) * decay + 2.0 * t * t * decay
            }),
            space(|_| 0.0),
            space(|_| 0.0),
            BoundarySpec::dirichlet(|_| 0.0, |_| 0.0),
        )?
        .with_initial_slope(space(|_| 0.0))
        .with_exact(space_time(|x, t| (x - x * x) * t * t * (-t).exp())),
        4 => {
            let (alpha, beta) = (6.0, 2.0);
            TelegraphProblem::new(
                alpha,
                beta,
                (0.0, 1.0),
                space_time(move |x, t| {
                    -2.0 * alpha * t.sin() * x.sin() + beta * beta * t.cos() * x.sin()
                }),
                space(f64::sin),
                space(|_| 0.0),
                BoundarySpec::dirichlet(|_| 0.0, |t| t.cos() * 1f64.sin()),
            )?
            .with_initial_slope(space(f64::cos))
            .with_exact(space_time(|x, t| t.cos() * x.sin()))
        }
        5 => TelegraphProblem::new(
            4.0,
            2.0,
            (0.0, 2.0 * PI),
            space_time(|x, t| -2.0 * (-t).exp() * x.sin()),
            space(f64::sin),
            space(|x| -x.sin()),
            BoundarySpec::neumann(|t| (-t).exp(), |t| (-t).exp()),
        )?
        .with_initial_slope(space(f64::cos))
        .with_exact(space_time(|x, t| (-t).exp() * x.sin())),
        other => return Err(ProblemError::UnknownId(other)),
    };
    Ok(problem.with_name(format!("problem-{id}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// Boundary data at `(a, 0)` disagrees with the initial data.
    LeftCorner,
    /// Boundary data at `(b, 0)` disagrees with the initial data.
    RightCorner,
    /// `exact(x, 0) != g1(x)` at a knot.
    ExactInitialMismatch,
    /// Initial or boundary data are not finite at a knot.
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub x: f64,
    pub magnitude: f64,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            DiagnosticKind::LeftCorner => "left corner mismatch",
            DiagnosticKind::RightCorner => "right corner mismatch",
            DiagnosticKind::ExactInitialMismatch => "exact(x, 0) differs from g1",
            DiagnosticKind::NonFinite => "non-finite data",
        };
        write!(f, "{what} at x = {} (|difference| = {:e})", self.x, self.magnitude)
    }
}

/// Every violated compatibility condition between initial, boundary and
/// exact data on the given mesh. An empty list means consistent.
pub fn validate(problem: &TelegraphProblem, mesh: &UniformMesh) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let (a, b) = (mesh.a(), mesh.b());

    let (left_target, right_target, tol) = match problem.boundary.kind {
        BoundaryKind::Dirichlet => (
            problem.initial_value(a),
            problem.initial_value(b),
            VALUE_COMPAT_TOL,
        ),
        BoundaryKind::Neumann => {
            let step = 1e-6 * (b - a);
            let fd = |x: f64| {
                (problem.initial_value(x + step) - problem.initial_value(x - step)) / (2.0 * step)
            };
            (fd(a), fd(b), SLOPE_COMPAT_TOL)
        }
    };
    for (kind, x, bc, target) in [
        (DiagnosticKind::LeftCorner, a, problem.boundary_left(0.0), left_target),
        (DiagnosticKind::RightCorner, b, problem.boundary_right(0.0), right_target),
    ] {
        let diff = (bc - target).abs();
        if !diff.is_finite() {
            out.push(Diagnostic { kind: DiagnosticKind::NonFinite, x, magnitude: f64::NAN });
        } else if diff > tol {
            out.push(Diagnostic { kind, x, magnitude: diff });
        }
    }

    for x in mesh.knots() {
        let g1 = problem.initial_value(x);
        let g2 = problem.initial_velocity(x);
        if !(g1.is_finite() && g2.is_finite()) {
            out.push(Diagnostic { kind: DiagnosticKind::NonFinite, x, magnitude: f64::NAN });
            continue;
        }
        if let Some(u0) = problem.exact(x, 0.0) {
            let diff = (u0 - g1).abs();
            if diff > VALUE_COMPAT_TOL || diff.is_nan() {
                out.push(Diagnostic {
                    kind: DiagnosticKind::ExactInitialMismatch,
                    x,
                    magnitude: diff,
                });
            }
        }
    }
    out
}
