//! Theta-weighted collocation time stepping.
//!
//! At each knot `x_i` the scheme solves
//!
//! ```text
//! (1 + 2ak) U^{j+1} - k^2 th (U_xx - b^2 U)^{j+1}
//!     = 2(1 + ak) U^j + k^2 (1 - th)(U_xx - b^2 U)^j - U^{j-1} + k^2 q
//! ```
//!
//! for the `N + 3` coefficients of level `j + 1`, with two boundary rows
//! closing the system. The first step replaces the ghost level via
//! `U^{-1} = U^1 - 2k g2`.

use std::fmt;

use thiserror::Error;

use crate::basis::{self, BasisError, BasisWeights, DerivativeOrder, UniformMesh};
use crate::linalg::{self, CornerTridiagonalSystem, LinalgError};
use crate::problem::{BoundaryKind, TelegraphProblem};

/// Output times must sit this close to a multiple of `dt`.
pub const TIME_ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid scheme parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("frame has {got} coefficients, mesh needs {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("output time {time} is not a multiple of dt = {dt} within [0, {t_final}]")]
    OutputTime { time: f64, dt: f64, t_final: f64 },
    #[error("problem mesh mismatch: problem domain [{pa}, {pb}], mesh [{ma}, {mb}]")]
    Domain { pa: f64, pb: f64, ma: f64, mb: f64 },
    #[error("non-finite {what} at x = {x}, t = {t}")]
    NonFinite { what: &'static str, x: f64, t: f64 },
}

/// Time level at which the forcing enters the recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForcingLevel {
    /// `q(x_i, t_j)`.
    #[default]
    Current,
    /// `th q(x_i, t_{j+1}) + (1 - th) q(x_i, t_j)`.
    Theta,
}

impl fmt::Display for ForcingLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcingLevel::Current => write!(f, "j"),
            ForcingLevel::Theta => write!(f, "theta"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    theta: f64,
    dt: f64,
    t_final: f64,
    forcing_level: ForcingLevel,
}

impl SchemeParams {
    pub fn new(theta: f64, dt: f64, t_final: f64) -> Result<Self, SolverError> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(SolverError::Params(format!("theta = {theta} must lie in [0, 1]")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SolverError::Params(format!("dt = {dt} must be positive")));
        }
        if !(t_final.is_finite() && t_final >= dt) {
            return Err(SolverError::Params(format!(
                "t_final = {t_final} must be at least dt = {dt}"
            )));
        }
        Ok(Self {
            theta,
            dt,
            t_final,
            forcing_level: ForcingLevel::Current,
        })
    }

    pub fn with_forcing_level(mut self, level: ForcingLevel) -> Self {
        self.forcing_level = level;
        self
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn forcing_level(&self) -> ForcingLevel {
        self.forcing_level
    }

    /// Unconditional stability is only established for `theta >= 1/2`.
    pub fn stability_warning(&self) -> bool {
        self.theta < 0.5
    }

    /// Step count `m` with `m * dt == t` to within [`TIME_ALIGN_TOL`].
    pub fn aligned_step(&self, t: f64) -> Option<usize> {
        if !(t >= -TIME_ALIGN_TOL && t <= self.t_final + TIME_ALIGN_TOL) {
            return None;
        }
        let m = (t / self.dt).round();
        ((t - m * self.dt).abs() <= TIME_ALIGN_TOL).then_some(m.max(0.0) as usize)
    }
}

/// Spline coefficients `C_{-3} ..= C_{N-1}` at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFrame {
    values: Vec<f64>,
    time: f64,
}

impl CoefficientFrame {
    pub fn new(values: Vec<f64>, time: f64) -> Self {
        Self { values, time }
    }

    pub fn zeros(mesh: &UniformMesh, time: f64) -> Self {
        Self::new(vec![0.0; mesh.n_coefficients()], time)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn evaluate(
        &self,
        x: f64,
        mesh: &UniformMesh,
        order: DerivativeOrder,
    ) -> Result<f64, BasisError> {
        basis::evaluate_solution(&self.values, x, mesh, order)
    }

    /// `outer * (C_{i-3} + C_{i-1}) + centre * C_{i-2}` at knot `i`.
    fn knot_combination(&self, i: usize, outer: f64, centre: f64) -> f64 {
        outer * self.values[i] + centre * self.values[i + 1] + outer * self.values[i + 2]
    }

    /// `U(x_i)` at knots `i = 0..=N`.
    pub fn knot_values(&self, weights: &BasisWeights) -> Vec<f64> {
        (0..self.values.len() - 2)
            .map(|i| self.knot_combination(i, weights.a1, weights.a2))
            .collect()
    }

    /// `U_x(x_i)` at knots `i = 0..=N`.
    pub fn knot_slopes(&self, weights: &BasisWeights) -> Vec<f64> {
        (0..self.values.len() - 2)
            .map(|i| weights.a3 * self.values[i] + weights.a4 * self.values[i + 2])
            .collect()
    }

    /// `U_xx(x_i)` at knots `i = 0..=N`.
    pub fn knot_curvatures(&self, weights: &BasisWeights) -> Vec<f64> {
        (0..self.values.len() - 2)
            .map(|i| self.knot_combination(i, weights.a5, weights.a6))
            .collect()
    }

    fn check_len(&self, mesh: &UniformMesh) -> Result<(), SolverError> {
        if self.values.len() == mesh.n_coefficients() {
            Ok(())
        } else {
            Err(SolverError::Dimension {
                expected: mesh.n_coefficients(),
                got: self.values.len(),
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolutionHistory {
    pub frames: Vec<CoefficientFrame>,
    pub mesh: UniformMesh,
    pub problem: TelegraphProblem,
}

fn check_domain(problem: &TelegraphProblem, mesh: &UniformMesh) -> Result<(), SolverError> {
    let (pa, pb) = problem.domain();
    let tol = 1e-12 * (pb - pa);
    if (pa - mesh.a()).abs() > tol || (pb - mesh.b()).abs() > tol {
        return Err(SolverError::Domain {
            pa,
            pb,
            ma: mesh.a(),
            mb: mesh.b(),
        });
    }
    Ok(())
}

fn finite(value: f64, what: &'static str, x: f64, t: f64) -> Result<f64, SolverError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(SolverError::NonFinite { what, x, t })
    }
}

/// Row 0 and row `N+2`: `(a1, a2, a1)` for values, `(a3, 0, a4)` for slopes.
fn boundary_row(kind: BoundaryKind, w: &BasisWeights) -> [f64; 3] {
    match kind {
        BoundaryKind::Dirichlet => [w.a1, w.a2, w.a1],
        BoundaryKind::Neumann => [w.a3, 0.0, w.a4],
    }
}

/// Coefficients `C^0` interpolating `g1` at the knots, closed by `g1'` at
/// both ends.
pub fn initial_coefficients(
    problem: &TelegraphProblem,
    mesh: &UniformMesh,
) -> Result<CoefficientFrame, SolverError> {
    check_domain(problem, mesh)?;
    let w = basis::basis_weights(mesh)?;
    let n = mesh.n_cells();
    let step = 1e-6 * mesh.h();
    let mut system = CornerTridiagonalSystem::zeros(n + 3);

    let slope_row = [w.a3, 0.0, w.a4];
    let (a, b) = (mesh.a(), mesh.b());
    system.set_row(0, slope_row, finite(problem.initial_slope(a, step), "g1'", a, 0.0)?);
    for (i, x) in mesh.knots().enumerate() {
        let g = finite(problem.initial_value(x), "g1", x, 0.0)?;
        system.set_row(i + 1, [w.a1, w.a2, w.a1], g);
    }
    system.set_row(n + 2, slope_row, finite(problem.initial_slope(b, step), "g1'", b, 0.0)?);

    Ok(CoefficientFrame::new(linalg::solve(&system)?, 0.0))
}

/// Linear system for `C^{j+1}`. `previous = None` marks the first step,
/// where the ghost level is eliminated with the initial velocity.
pub fn assemble_step(
    problem: &TelegraphProblem,
    mesh: &UniformMesh,
    params: &SchemeParams,
    current: &CoefficientFrame,
    previous: Option<&CoefficientFrame>,
    t_j: f64,
) -> Result<CornerTridiagonalSystem, SolverError> {
    current.check_len(mesh)?;
    if let Some(prev) = previous {
        prev.check_len(mesh)?;
    }
    let w = basis::basis_weights(mesh)?;
    let n = mesh.n_cells();
    let k = params.dt;
    let theta = params.theta;
    let (alpha, beta2) = (problem.alpha(), problem.beta().powi(2));
    let t_next = t_j + k;

    let first_step = previous.is_none();
    let mut lhs_scale = 1.0 + 2.0 * alpha * k + k * k * theta * beta2;
    if first_step {
        lhs_scale += 1.0;
    }
    let outer = lhs_scale * w.a1 - k * k * theta * w.a5;
    let centre = lhs_scale * w.a2 - k * k * theta * w.a6;

    let u_now = current.knot_values(&w);
    let uxx_now = current.knot_curvatures(&w);
    let u_prev = previous.map(|p| p.knot_values(&w));

    let mut system = CornerTridiagonalSystem::zeros(n + 3);
    let kind = problem.boundary().kind;
    let bc_row = boundary_row(kind, &w);
    let (a, b) = (mesh.a(), mesh.b());
    system.set_row(0, bc_row, finite(problem.boundary_left(t_next), "left boundary", a, t_next)?);

    for (i, x) in mesh.knots().enumerate() {
        let q = match params.forcing_level {
            ForcingLevel::Current => problem.forcing(x, t_j),
            ForcingLevel::Theta => {
                theta * problem.forcing(x, t_next) + (1.0 - theta) * problem.forcing(x, t_j)
            }
        };
        let q = finite(q, "forcing", x, t_j)?;
        let history = match &u_prev {
            Some(prev) => -prev[i],
            None => 2.0 * k * finite(problem.initial_velocity(x), "g2", x, 0.0)?,
        };
        let rhs = 2.0 * (1.0 + alpha * k) * u_now[i]
            + k * k * (1.0 - theta) * (uxx_now[i] - beta2 * u_now[i])
            + history
            + k * k * q;
        system.set_row(i + 1, [outer, centre, outer], rhs);
    }

    system.set_row(
        n + 2,
        bc_row,
        finite(problem.boundary_right(t_next), "right boundary", b, t_next)?,
    );
    Ok(system)
}

/// One time step: `C^{j+1}` from `C^j` (and `C^{j-1}` after the first step).
pub fn step(
    problem: &TelegraphProblem,
    mesh: &UniformMesh,
    params: &SchemeParams,
    current: &CoefficientFrame,
    previous: Option<&CoefficientFrame>,
) -> Result<CoefficientFrame, SolverError> {
    let t_j = current.time();
    let system = assemble_step(problem, mesh, params, current, previous, t_j)?;
    let values = linalg::solve(&system)?;
    Ok(CoefficientFrame::new(values, t_j + params.dt))
}

/// Sequential driver over the time levels `t_j = j dt`.
#[derive(Debug)]
pub struct Stepper<'a> {
    problem: &'a TelegraphProblem,
    mesh: UniformMesh,
    params: SchemeParams,
    current: CoefficientFrame,
    previous: Option<CoefficientFrame>,
    index: usize,
}

impl<'a> Stepper<'a> {
    pub fn new(
        problem: &'a TelegraphProblem,
        mesh: UniformMesh,
        params: SchemeParams,
    ) -> Result<Self, SolverError> {
        if let Some(limit) = problem.max_time() {
            if params.t_final > limit + TIME_ALIGN_TOL {
                return Err(SolverError::Params(format!(
                    "t_final = {} exceeds the horizon {limit} of {}",
                    params.t_final,
                    problem.name()
                )));
            }
        }
        let current = initial_coefficients(problem, &mesh)?;
        Ok(Self {
            problem,
            mesh,
            params,
            current,
            previous: None,
            index: 0,
        })
    }

    pub fn current(&self) -> &CoefficientFrame {
        &self.current
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn mesh(&self) -> &UniformMesh {
        &self.mesh
    }

    /// Advances one level and returns the new frame.
    pub fn advance(&mut self) -> Result<&CoefficientFrame, SolverError> {
        let t_j = self.index as f64 * self.params.dt;
        let system = assemble_step(
            self.problem,
            &self.mesh,
            &self.params,
            &self.current,
            self.previous.as_ref(),
            t_j,
        )?;
        let values = linalg::solve(&system)?;
        self.index += 1;
        let next = CoefficientFrame::new(values, self.index as f64 * self.params.dt);
        self.previous = Some(std::mem::replace(&mut self.current, next));
        Ok(&self.current)
    }
}

/// Runs from `t = 0` and keeps the frames at `output_times`.
pub fn run(
    problem: &TelegraphProblem,
    mesh: &UniformMesh,
    params: &SchemeParams,
    output_times: &[f64],
) -> Result<SolutionHistory, SolverError> {
    let mut targets = Vec::with_capacity(output_times.len());
    for &t in output_times {
        let m = params.aligned_step(t).ok_or(SolverError::OutputTime {
            time: t,
            dt: params.dt,
            t_final: params.t_final,
        })?;
        if targets.last().is_some_and(|&last| m <= last) {
            return Err(SolverError::Params(
                "output times must be strictly increasing".to_string(),
            ));
        }
        targets.push(m);
    }

    let mut stepper = Stepper::new(problem, *mesh, *params)?;
    let mut frames = Vec::with_capacity(targets.len());
    for m in targets {
        while stepper.index() < m {
            stepper.advance()?;
        }
        frames.push(stepper.current().clone());
    }
    Ok(SolutionHistory {
        frames,
        mesh: *mesh,
        problem: problem.clone(),
    })
}
