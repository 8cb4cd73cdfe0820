//! Exhaustive enumeration over binary assignments.
//!
//! Every assignment of the binary variables that satisfies the rows made
//! only of binaries is fixed in turn, and the remaining continuous problem
//! is solved as a linear program with `microlp`. Rows left with a single
//! continuous variable become bounds before the LP is built. The best
//! objective wins; ties keep the first assignment in lexicographic order,
//! so results are deterministic.
//!
//! Meant for small instances and as a cross-check on other backends.

use std::time::Instant;

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use super::{SolveOptions, SolveResult, SolveStatus, SolverBackend};
use crate::{ConstraintSense, MilpError, MilpProblem};

const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct EnumerationBackend {
    pub max_binaries: usize,
}

impl Default for EnumerationBackend {
    fn default() -> Self {
        Self { max_binaries: 20 }
    }
}

/// Row split into binary and continuous parts.
struct SplitRow {
    binary: Vec<(usize, f64)>,
    continuous: Vec<(usize, f64)>,
    sense: ConstraintSense,
    rhs: f64,
}

fn satisfied(lhs: f64, sense: ConstraintSense, rhs: f64) -> bool {
    match sense {
        ConstraintSense::Le => lhs <= rhs + FEAS_TOL,
        ConstraintSense::Ge => lhs >= rhs - FEAS_TOL,
        ConstraintSense::Eq => (lhs - rhs).abs() <= FEAS_TOL,
    }
}

enum LpOutcome {
    Solved { objective: f64, values: Vec<f64> },
    Infeasible,
    Unbounded,
}

struct Enumerator<'a> {
    problem: &'a MilpProblem,
    /// Problem variable index of each binary, in declaration order.
    binaries: Vec<usize>,
    /// Position of each continuous variable in the LP, by problem index.
    lp_index: Vec<Option<usize>>,
    continuous: Vec<usize>,
    rows: Vec<SplitRow>,
    /// Pure-binary rows grouped by the depth at which they become decidable.
    checks_at_depth: Vec<Vec<usize>>,
}

impl<'a> Enumerator<'a> {
    fn new(problem: &'a MilpProblem) -> Self {
        let mut bin_pos = vec![None; problem.num_variables()];
        let mut lp_index = vec![None; problem.num_variables()];
        let mut binaries = Vec::new();
        let mut continuous = Vec::new();
        for (i, v) in problem.variables().iter().enumerate() {
            if v.is_binary() {
                bin_pos[i] = Some(binaries.len());
                binaries.push(i);
            } else {
                lp_index[i] = Some(continuous.len());
                continuous.push(i);
            }
        }

        let mut rows = Vec::with_capacity(problem.num_constraints());
        let mut checks_at_depth = vec![Vec::new(); binaries.len()];
        for row in problem.constraints() {
            let mut split = SplitRow {
                binary: Vec::new(),
                continuous: Vec::new(),
                sense: row.sense,
                rhs: row.rhs,
            };
            for &(var, coef) in &row.terms {
                if coef == 0.0 {
                    continue;
                }
                match bin_pos[var.index()] {
                    Some(pos) => split.binary.push((pos, coef)),
                    None => split
                        .continuous
                        .push((lp_index[var.index()].unwrap(), coef)),
                }
            }
            if split.continuous.is_empty() {
                if let Some(depth) = split.binary.iter().map(|(p, _)| *p).max() {
                    checks_at_depth[depth].push(rows.len());
                }
            }
            rows.push(split);
        }

        Self {
            problem,
            binaries,
            lp_index,
            continuous,
            rows,
            checks_at_depth,
        }
    }

    /// All binary assignments that respect bounds and pure-binary rows.
    fn assignments(&self) -> Vec<Vec<bool>> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(self.binaries.len());
        self.descend(&mut current, &mut out);
        out
    }

    fn descend(&self, current: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        let depth = current.len();
        if depth == self.binaries.len() {
            out.push(current.clone());
            return;
        }
        let var = &self.problem.variables()[self.binaries[depth]];
        for value in [false, true] {
            let x = if value { 1.0 } else { 0.0 };
            if x < var.lower - FEAS_TOL || x > var.upper + FEAS_TOL {
                continue;
            }
            current.push(value);
            let ok = self.checks_at_depth[depth].iter().all(|&r| {
                let row = &self.rows[r];
                let lhs: f64 = row
                    .binary
                    .iter()
                    .map(|&(p, c)| if current[p] { c } else { 0.0 })
                    .sum();
                satisfied(lhs, row.sense, row.rhs)
            });
            if ok {
                self.descend(current, out);
            }
            current.pop();
        }
    }

    fn solve_lp(&self, assignment: &[bool]) -> Result<LpOutcome, MilpError> {
        let vars = self.problem.variables();
        let mut lower: Vec<f64> = self.continuous.iter().map(|&i| vars[i].lower).collect();
        let mut upper: Vec<f64> = self.continuous.iter().map(|&i| vars[i].upper).collect();
        let mut general: Vec<(&[(usize, f64)], ConstraintSense, f64)> = Vec::new();

        for row in &self.rows {
            let fixed: f64 = row
                .binary
                .iter()
                .map(|&(p, c)| if assignment[p] { c } else { 0.0 })
                .sum();
            let rhs = row.rhs - fixed;
            match row.continuous.as_slice() {
                [] => {
                    if !satisfied(0.0, row.sense, rhs) {
                        return Ok(LpOutcome::Infeasible);
                    }
                }
                [(j, a)] => {
                    let bound = rhs / a;
                    let (tighten_upper, tighten_lower) = match (row.sense, *a > 0.0) {
                        (ConstraintSense::Eq, _) => (true, true),
                        (ConstraintSense::Le, true) | (ConstraintSense::Ge, false) => (true, false),
                        (ConstraintSense::Le, false) | (ConstraintSense::Ge, true) => (false, true),
                    };
                    if tighten_upper {
                        upper[*j] = upper[*j].min(bound);
                    }
                    if tighten_lower {
                        lower[*j] = lower[*j].max(bound);
                    }
                }
                terms => general.push((terms, row.sense, rhs)),
            }
        }

        for j in 0..lower.len() {
            if lower[j] > upper[j] {
                if lower[j] - upper[j] > FEAS_TOL * (1.0 + upper[j].abs()) {
                    return Ok(LpOutcome::Infeasible);
                }
                upper[j] = lower[j];
            }
        }

        let coefficients = &self.problem.objective().coefficients;
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let lp_vars: Vec<microlp::Variable> = self
            .continuous
            .iter()
            .enumerate()
            .map(|(j, &i)| lp.add_var(coefficients[i], (lower[j], upper[j])))
            .collect();
        for (terms, sense, rhs) in general {
            let op = match sense {
                ConstraintSense::Le => ComparisonOp::Le,
                ConstraintSense::Ge => ComparisonOp::Ge,
                ConstraintSense::Eq => ComparisonOp::Eq,
            };
            let expr: Vec<(microlp::Variable, f64)> =
                terms.iter().map(|&(j, c)| (lp_vars[j], c)).collect();
            lp.add_constraint(expr.as_slice(), op, rhs);
        }

        let solution = match lp.solve() {
            Ok(s) => s,
            Err(microlp::Error::Infeasible) => return Ok(LpOutcome::Infeasible),
            Err(microlp::Error::Unbounded) => return Ok(LpOutcome::Unbounded),
            Err(microlp::Error::InternalError(msg)) => {
                return Err(MilpError::Backend(format!("microlp: {msg}")))
            }
        };

        let mut values = vec![0.0; self.problem.num_variables()];
        for (pos, &i) in self.binaries.iter().enumerate() {
            values[i] = if assignment[pos] { 1.0 } else { 0.0 };
        }
        for (j, &i) in self.continuous.iter().enumerate() {
            debug_assert_eq!(self.lp_index[i], Some(j));
            values[i] = *solution.var_value(lp_vars[j]);
        }
        Ok(LpOutcome::Solved {
            objective: self.problem.objective().value(&values),
            values,
        })
    }
}

impl SolverBackend for EnumerationBackend {
    fn name(&self) -> &'static str {
        "enumeration"
    }

    fn solve(&self, problem: &MilpProblem, opts: &SolveOptions) -> Result<SolveResult, MilpError> {
        let start = Instant::now();
        let count = problem.num_binaries();
        if count > self.max_binaries {
            return Err(MilpError::TooManyBinaries {
                count,
                limit: self.max_binaries,
            });
        }

        let enumerator = Enumerator::new(problem);
        let assignments = enumerator.assignments();
        log::debug!(
            "enumerating {} of {} binary assignments",
            assignments.len(),
            1u64 << count
        );

        let mut best: Option<(f64, Vec<f64>)> = None;
        for assignment in &assignments {
            if start.elapsed() > opts.time_limit {
                let status = if best.is_some() {
                    SolveStatus::FeasibleGap
                } else {
                    SolveStatus::TimeLimit
                };
                return Ok(match best {
                    Some((objective, primal)) => SolveResult {
                        status,
                        objective,
                        primal,
                        achieved_gap: f64::INFINITY,
                        runtime: start.elapsed(),
                    },
                    None => SolveResult::without_solution(status, start.elapsed()),
                });
            }
            match enumerator.solve_lp(assignment)? {
                LpOutcome::Infeasible => {}
                LpOutcome::Unbounded => {
                    return Ok(SolveResult::without_solution(
                        SolveStatus::Unbounded,
                        start.elapsed(),
                    ))
                }
                LpOutcome::Solved { objective, values } => {
                    if best.as_ref().is_none_or(|(b, _)| objective < *b) {
                        best = Some((objective, values));
                    }
                }
            }
        }

        Ok(match best {
            Some((objective, primal)) => SolveResult {
                status: SolveStatus::Optimal,
                objective,
                primal,
                achieved_gap: 0.0,
                runtime: start.elapsed(),
            },
            None => SolveResult::without_solution(SolveStatus::Infeasible, start.elapsed()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_binary_rows_prune_assignments() {
        let mut p = MilpProblem::new();
        let a = p.add_binary("a").unwrap();
        let b = p.add_binary("b").unwrap();
        let c = p.add_binary("c").unwrap();
        p.add_constraint("ab", &[(a, 1.0), (b, 1.0)], ConstraintSense::Le, 1.0)
            .unwrap();
        p.add_constraint("bc", &[(b, 1.0), (c, 1.0)], ConstraintSense::Le, 1.0)
            .unwrap();
        let e = Enumerator::new(&p);
        // 8 assignments minus those with a=b=1 or b=c=1 -> 5
        assert_eq!(e.assignments().len(), 5);
    }

    #[test]
    fn fixed_binary_bounds_are_respected() {
        let mut p = MilpProblem::new();
        p.add_variable("u", 1.0, 1.0, crate::Integrality::Binary)
            .unwrap();
        p.add_binary("v").unwrap();
        let e = Enumerator::new(&p);
        let all = e.assignments();
        assert_eq!(all, vec![vec![true, false], vec![true, true]]);
    }

    #[test]
    fn too_many_binaries_is_a_configuration_error() {
        let mut p = MilpProblem::new();
        for i in 0..5 {
            p.add_binary(format!("u{i}")).unwrap();
        }
        let backend = EnumerationBackend { max_binaries: 4 };
        assert!(matches!(
            backend.solve(&p, &SolveOptions::default()),
            Err(MilpError::TooManyBinaries { count: 5, limit: 4 })
        ));
    }

    #[test]
    fn single_variable_rows_become_bounds() {
        let mut p = MilpProblem::new();
        let x = p.add_continuous("x", 0.0, f64::INFINITY).unwrap();
        let u = p.add_binary("u").unwrap();
        // x <= 5u, x >= 2, minimise x + 3u
        p.add_constraint("cap", &[(x, 1.0), (u, -5.0)], ConstraintSense::Le, 0.0)
            .unwrap();
        p.add_constraint("min", &[(x, 1.0)], ConstraintSense::Ge, 2.0)
            .unwrap();
        p.add_objective_term(x, 1.0).unwrap();
        p.add_objective_term(u, 3.0).unwrap();
        let r = EnumerationBackend::default()
            .solve(&p, &SolveOptions::default())
            .unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 5.0).abs() < 1e-9);
        assert_eq!(r.primal, vec![2.0, 1.0]);
    }
}
