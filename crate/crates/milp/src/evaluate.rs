use crate::{MilpError, MilpProblem};

/// Per-row residuals and objective value of a primal assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Raw violation magnitude per constraint, in row order.
    pub residuals: Vec<f64>,
    /// Residuals divided by each row's [`crate::LinearConstraint::scale`].
    pub scaled_residuals: Vec<f64>,
    /// Worst violation of a variable bound.
    pub bound_violation: f64,
    pub objective: f64,
}

impl Evaluation {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_scaled_residual(&self) -> f64 {
        self.scaled_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Re-evaluates every constraint and the objective at `primal`.
///
/// `primal` is indexed by [`crate::VarId::index`] and must cover every
/// declared variable.
pub fn evaluate(problem: &MilpProblem, primal: &[f64]) -> Result<Evaluation, MilpError> {
    if primal.len() != problem.num_variables() {
        return Err(MilpError::AssignmentLength {
            expected: problem.num_variables(),
            got: primal.len(),
        });
    }
    let mut residuals = Vec::with_capacity(problem.num_constraints());
    let mut scaled = Vec::with_capacity(problem.num_constraints());
    for row in problem.constraints() {
        let r = row.residual(primal);
        residuals.push(r);
        scaled.push(r / row.scale());
    }
    let bound_violation = problem
        .variables()
        .iter()
        .zip(primal)
        .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0))
        .fold(0.0, f64::max);
    Ok(Evaluation {
        residuals,
        scaled_residuals: scaled,
        bound_violation,
        objective: problem.objective().value(primal),
    })
}
