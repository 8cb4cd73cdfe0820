//! Abstract variables-constraints-objective representation.

use std::fmt;

use crate::MilpError;

/// Handle to a variable declared in a [`MilpProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrality {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integrality: Integrality,
}

impl Variable {
    pub fn is_binary(&self) -> bool {
        self.integrality == Integrality::Binary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for ConstraintSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintSense::Le => "<=",
            ConstraintSense::Eq => "=",
            ConstraintSense::Ge => ">=",
        })
    }
}

/// A single row `Σ coef·x (sense) rhs`. Terms are merged so that every
/// variable appears at most once, in first-occurrence order.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

impl LinearConstraint {
    /// Largest absolute coefficient, at least 1. Residuals are reported
    /// relative to this so that big-M rows are judged on their own scale.
    pub fn scale(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.abs()).fold(1.0, f64::max)
    }

    pub fn activity(&self, primal: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * primal[v.0]).sum()
    }

    /// Violation magnitude (0 when satisfied); `|lhs - rhs|` for equalities.
    pub fn residual(&self, primal: &[f64]) -> f64 {
        let lhs = self.activity(primal);
        match self.sense {
            ConstraintSense::Le => (lhs - self.rhs).max(0.0),
            ConstraintSense::Ge => (self.rhs - lhs).max(0.0),
            ConstraintSense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Minimisation objective: sparse coefficients plus a constant offset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Objective {
    pub coefficients: Vec<f64>,
    pub constant: f64,
}

impl Objective {
    pub fn value(&self, primal: &[f64]) -> f64 {
        self.constant
            + self
                .coefficients
                .iter()
                .zip(primal)
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }
}

/// A mixed-integer linear program in minimisation form.
///
/// Built incrementally with the `add_*` methods and treated as immutable
/// once handed to a backend. Every term is checked against the declared
/// variables on insertion, so a constructed problem always satisfies its
/// reference invariants.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpProblem {
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    objective: Objective,
}

impl MilpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        integrality: Integrality,
    ) -> Result<VarId, MilpError> {
        let name = name.into();
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(MilpError::InvalidBounds { name, lower, upper });
        }
        if integrality == Integrality::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(MilpError::InvalidBounds { name, lower, upper });
        }
        let id = VarId(self.variables.len());
        self.variables.push(Variable {
            name,
            lower,
            upper,
            integrality,
        });
        self.objective.coefficients.push(0.0);
        Ok(id)
    }

    /// Continuous variable with bounds `[lower, upper]`.
    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, MilpError> {
        self.add_variable(name, lower, upper, Integrality::Continuous)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, MilpError> {
        self.add_variable(name, 0.0, 1.0, Integrality::Binary)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: &[(VarId, f64)],
        sense: ConstraintSense,
        rhs: f64,
    ) -> Result<usize, MilpError> {
        let name = name.into();
        if !rhs.is_finite() {
            return Err(MilpError::NonFinite { row: name });
        }
        let mut merged: Vec<(VarId, f64)> = Vec::with_capacity(terms.len());
        for &(var, coef) in terms {
            self.check_var(var)?;
            if !coef.is_finite() {
                return Err(MilpError::NonFinite { row: name });
            }
            match merged.iter_mut().find(|(v, _)| *v == var) {
                Some(slot) => slot.1 += coef,
                None => merged.push((var, coef)),
            }
        }
        self.constraints.push(LinearConstraint {
            name,
            terms: merged,
            sense,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    /// Adds `coef` to the objective coefficient of `var`.
    pub fn add_objective_term(&mut self, var: VarId, coef: f64) -> Result<(), MilpError> {
        self.check_var(var)?;
        if !coef.is_finite() {
            return Err(MilpError::NonFinite {
                row: "objective".into(),
            });
        }
        self.objective.coefficients[var.0] += coef;
        Ok(())
    }

    pub fn add_objective_constant(&mut self, value: f64) {
        self.objective.constant += value;
    }

    fn check_var(&self, var: VarId) -> Result<(), MilpError> {
        if var.0 < self.variables.len() {
            Ok(())
        } else {
            Err(MilpError::UnknownVariable(var.0))
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.is_binary()).count()
    }
}
