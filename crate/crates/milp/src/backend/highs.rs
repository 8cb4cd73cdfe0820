//! HiGHS branch-and-cut backend.
//!
//! Once a MIP incumbent is found its binaries are rounded and fixed, and the
//! continuous part is re-solved as an LP. Without this step a binary sitting
//! at 1e-7 (inside the integrality tolerance) lets a big-M row pass a small
//! flow for free, and the reported optimum undercuts every truly integral
//! point.

use std::time::Instant;

use highs::{HighsModelStatus, RowProblem, Sense, SolvedModel};

use super::{SolveOptions, SolveResult, SolveStatus, SolverBackend};
use crate::{ConstraintSense, MilpError, MilpProblem};

#[derive(Debug, Clone, Copy, Default)]
pub struct HighsBackend;

/// Loads `problem` into HiGHS. With `fixed`, binaries are pinned to the
/// given values and the model is passed as a pure LP.
fn run(
    problem: &MilpProblem,
    opts: &SolveOptions,
    fixed: Option<&[f64]>,
) -> Result<SolvedModel, MilpError> {
    let mut rows = RowProblem::default();
    let objective = problem.objective();
    let cols: Vec<highs::Col> = problem
        .variables()
        .iter()
        .zip(&objective.coefficients)
        .enumerate()
        .map(|(i, (v, &c))| match fixed {
            Some(values) if v.is_binary() => rows.add_column(c, values[i]..=values[i]),
            _ => rows.add_column_with_integrality(c, v.lower..=v.upper, v.is_binary()),
        })
        .collect();
    for row in problem.constraints() {
        let factors = row.terms.iter().map(|&(v, c)| (cols[v.index()], c));
        match row.sense {
            ConstraintSense::Le => rows.add_row(..=row.rhs, factors),
            ConstraintSense::Ge => rows.add_row(row.rhs.., factors),
            ConstraintSense::Eq => rows.add_row(row.rhs..=row.rhs, factors),
        }
    }

    let mut model = rows
        .try_optimise(Sense::Minimise)
        .map_err(|s| MilpError::Backend(format!("HiGHS rejected the model: {s:?}")))?;
    model.make_quiet();
    model.set_option("mip_rel_gap", opts.mip_gap);
    model.set_option("time_limit", opts.time_limit.as_secs_f64());
    if let Some(threads) = opts.threads {
        model.set_option("threads", threads as i32);
    }
    model
        .try_solve()
        .map_err(|s| MilpError::Backend(format!("HiGHS run failed: {s:?}")))
}

impl SolverBackend for HighsBackend {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn solve(&self, problem: &MilpProblem, opts: &SolveOptions) -> Result<SolveResult, MilpError> {
        let start = Instant::now();
        let solved = run(problem, opts, None)?;

        let is_mip = problem.num_binaries() > 0;
        let status = match solved.status() {
            HighsModelStatus::Optimal | HighsModelStatus::ModelEmpty => SolveStatus::Optimal,
            HighsModelStatus::Infeasible => SolveStatus::Infeasible,
            HighsModelStatus::Unbounded => SolveStatus::Unbounded,
            HighsModelStatus::UnboundedOrInfeasible => {
                log::warn!("HiGHS could not distinguish infeasible from unbounded");
                SolveStatus::Infeasible
            }
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ObjectiveBound
            | HighsModelStatus::ObjectiveTarget => {
                if is_mip && solved.mip_gap().is_finite() {
                    SolveStatus::FeasibleGap
                } else {
                    SolveStatus::TimeLimit
                }
            }
            other => {
                return Err(MilpError::Backend(format!(
                    "HiGHS finished with status {other:?}"
                )))
            }
        };
        if !status.has_solution() {
            return Ok(SolveResult::without_solution(status, start.elapsed()));
        }

        let constant = problem.objective().constant;
        let mut primal = solved.get_solution().columns().to_vec();
        let mut objective = solved.objective_value() + constant;
        let achieved_gap = if is_mip { solved.mip_gap() } else { 0.0 };

        if is_mip {
            let rounded: Vec<f64> = primal
                .iter()
                .zip(problem.variables())
                .map(|(&x, v)| if v.is_binary() { x.round() } else { x })
                .collect();
            let polished = run(problem, opts, Some(&rounded))?;
            if polished.status() == HighsModelStatus::Optimal {
                primal = polished.get_solution().columns().to_vec();
                for (x, v) in primal.iter_mut().zip(problem.variables()) {
                    if v.is_binary() {
                        *x = x.round();
                    }
                }
                objective = polished.objective_value() + constant;
            } else {
                log::warn!(
                    "fixing rounded binaries left the LP {:?}; keeping the raw incumbent",
                    polished.status()
                );
            }
        }

        Ok(SolveResult {
            status,
            objective,
            primal,
            achieved_gap,
            runtime: start.elapsed(),
        })
    }
}
