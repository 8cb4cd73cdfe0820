//! Solver-agnostic MILP representation.
//!
//! A [`MilpProblem`] is built once and handed to any [`SolverBackend`]. Two
//! backends ship: HiGHS (feature `highs`, on by default) and an exhaustive
//! enumeration over binary assignments for instances with at most 20
//! binaries. [`solve`] wraps a backend call and re-checks the returned
//! primal against every row before handing it back.

pub mod backend;
mod evaluate;
mod lp_format;
mod problem;

use std::path::Path;

use thiserror::Error;

#[cfg(feature = "highs")]
pub use backend::HighsBackend;
pub use backend::{
    backend_by_name, backend_from_env, default_backend, EnumerationBackend, SolveOptions,
    SolveResult, SolveStatus, SolverBackend, SOLVER_ENV,
};
pub use evaluate::{evaluate, Evaluation};
pub use lp_format::{write_lp, write_lp_file};
pub use problem::{
    ConstraintSense, Integrality, LinearConstraint, MilpProblem, Objective, VarId, Variable,
};

/// Feasibility tolerance on scaled rows and integrality tolerance on binaries.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("variable `{name}` has invalid bounds [{lower}, {upper}]")]
    InvalidBounds {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("row `{row}` has a non-finite coefficient or right-hand side")]
    NonFinite { row: String },
    #[error("reference to undeclared variable #{0}")]
    UnknownVariable(usize),
    #[error("assignment covers {got} variables, problem has {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("invalid solve options: {0}")]
    InvalidOptions(String),
    #[error("solver backend `{0}` is not available")]
    BackendUnavailable(String),
    #[error("enumeration backend supports at most {limit} binaries, problem has {count}")]
    TooManyBinaries { count: usize, limit: usize },
    #[error("backend failure: {0}")]
    Backend(String),
    #[error(
        "backend returned a solution violating row `{row}` by {residual:e} (scaled); \
         integrality violation {integrality:e}"
    )]
    Verification {
        row: String,
        residual: f64,
        integrality: f64,
    },
    #[error("failed to write LP file")]
    Io(#[from] std::io::Error),
}

/// Solves `problem` with `backend` and verifies the answer.
///
/// When the status carries a solution, the primal is re-evaluated: every
/// row must hold within [`FEASIBILITY_TOL`] on its scaled form and every
/// binary must be within the same distance of 0 or 1. The returned
/// objective is the re-evaluated one, so accounting built on the primal
/// matches it exactly.
pub fn solve(
    problem: &MilpProblem,
    opts: &SolveOptions,
    backend: &dyn SolverBackend,
) -> Result<SolveResult, MilpError> {
    opts.validate()?;
    let mut result = backend.solve(problem, opts)?;
    if !result.status.has_solution() {
        return Ok(result);
    }

    let eval = evaluate(problem, &result.primal)?;
    let (worst_row, worst) =
        eval.scaled_residuals
            .iter()
            .enumerate()
            .fold(
                (None, 0.0_f64),
                |acc, (i, &r)| if r > acc.1 { (Some(i), r) } else { acc },
            );
    let integrality = problem
        .variables()
        .iter()
        .zip(&result.primal)
        .filter(|(v, _)| v.is_binary())
        .map(|(_, x)| (x - x.round()).abs())
        .fold(0.0, f64::max);
    let bound_slack = eval.bound_violation;
    if worst > FEASIBILITY_TOL || integrality > FEASIBILITY_TOL || bound_slack > FEASIBILITY_TOL {
        return Err(MilpError::Verification {
            row: worst_row
                .map(|i| problem.constraints()[i].name.clone())
                .unwrap_or_else(|| "<bounds>".into()),
            residual: worst.max(bound_slack),
            integrality,
        });
    }
    let reported = result.objective;
    if (reported - eval.objective).abs() > 1e-6 * reported.abs().max(1.0) {
        log::warn!(
            "{}: reported objective {reported} differs from re-evaluated {}",
            backend.name(),
            eval.objective
        );
    }
    result.objective = eval.objective;
    Ok(result)
}

/// Same as [`solve`], additionally writing the model to `lp_path` first.
pub fn solve_with_dump(
    problem: &MilpProblem,
    opts: &SolveOptions,
    backend: &dyn SolverBackend,
    lp_path: Option<&Path>,
) -> Result<SolveResult, MilpError> {
    if let Some(path) = lp_path {
        write_lp_file(problem, path)?;
    }
    solve(problem, opts, backend)
}
