//! Knot-based error norms against an exact solution.

use thiserror::Error;

use crate::basis::{self, BasisError, UniformMesh};
use crate::problem::TelegraphProblem;
use crate::solver::CoefficientFrame;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("problem `{0}` has no exact solution")]
    MissingExact(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub l_inf: f64,
    pub l2: f64,
    pub rms: f64,
    pub time: f64,
    pub n_cells: usize,
}

/// L-infinity, `sqrt(h sum e^2)` and `sqrt(sum e^2 / (N+1))` over the
/// knot errors `e_j`, `j = 0..=N`.
pub fn norms_from_errors(errors: &[f64], h: f64, time: f64) -> ErrorReport {
    let l_inf = errors.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let sum_sq: f64 = errors.iter().map(|e| e * e).sum();
    ErrorReport {
        l_inf,
        l2: (h * sum_sq).sqrt(),
        rms: (sum_sq / errors.len() as f64).sqrt(),
        time,
        n_cells: errors.len().saturating_sub(1),
    }
}

/// Pointwise `u_exact(x_j, t) - U(x_j, t)` at every knot.
pub fn knot_errors(
    frame: &CoefficientFrame,
    problem: &TelegraphProblem,
    mesh: &UniformMesh,
) -> Result<Vec<f64>, MetricsError> {
    if !problem.has_exact() {
        return Err(MetricsError::MissingExact(problem.name().to_string()));
    }
    let weights = basis::basis_weights(mesh)?;
    let t = frame.time();
    Ok(mesh
        .knots()
        .zip(frame.knot_values(&weights))
        .map(|(x, u)| problem.exact(x, t).unwrap_or(f64::NAN) - u)
        .collect())
}

pub fn error_norms(
    frame: &CoefficientFrame,
    problem: &TelegraphProblem,
    mesh: &UniformMesh,
) -> Result<ErrorReport, MetricsError> {
    let errors = knot_errors(frame, problem, mesh)?;
    Ok(norms_from_errors(&errors, mesh.h(), frame.time()))
}
