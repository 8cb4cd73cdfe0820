//! Solver backend contract and the bundled implementations.

use std::time::Duration;

use crate::MilpError;
use crate::MilpProblem;

pub mod enumeration;
#[cfg(feature = "highs")]
pub mod highs;

#[cfg(feature = "highs")]
pub use self::highs::HighsBackend;
pub use enumeration::EnumerationBackend;

/// Environment variable naming the backend to use.
pub const SOLVER_ENV: &str = "DBIO_SOLVER";

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Relative MIP gap at which the search may stop.
    pub mip_gap: f64,
    pub time_limit: Duration,
    /// `None` lets the backend decide.
    pub threads: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mip_gap: 0.0,
            time_limit: Duration::from_secs(3600),
            threads: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<(), MilpError> {
        if !(self.mip_gap >= 0.0) {
            return Err(MilpError::InvalidOptions(format!(
                "mip_gap must be >= 0, got {}",
                self.mip_gap
            )));
        }
        if self.time_limit.is_zero() {
            return Err(MilpError::InvalidOptions("time_limit must be > 0".into()));
        }
        if self.threads == Some(0) {
            return Err(MilpError::InvalidOptions("threads must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// A feasible incumbent exists but the requested gap was not proven,
    /// usually because a limit was hit.
    FeasibleGap,
    Infeasible,
    Unbounded,
    /// A limit was reached before any incumbent was found.
    TimeLimit,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::FeasibleGap)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Objective including the constant offset. `NaN` without a solution.
    pub objective: f64,
    /// Values indexed by [`crate::VarId::index`]; empty without a solution.
    pub primal: Vec<f64>,
    pub achieved_gap: f64,
    pub runtime: Duration,
}

impl SolveResult {
    pub(crate) fn without_solution(status: SolveStatus, runtime: Duration) -> Self {
        Self {
            status,
            objective: f64::NAN,
            primal: Vec::new(),
            achieved_gap: f64::INFINITY,
            runtime,
        }
    }

    pub fn value(&self, var: crate::VarId) -> f64 {
        self.primal[var.index()]
    }
}

/// A blocking MILP solver.
pub trait SolverBackend: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve(&self, problem: &MilpProblem, opts: &SolveOptions) -> Result<SolveResult, MilpError>;
}

/// Looks a backend up by name: `highs` or `enumeration`.
pub fn backend_by_name(name: &str) -> Result<Box<dyn SolverBackend>, MilpError> {
    match name.trim().to_ascii_lowercase().as_str() {
        #[cfg(feature = "highs")]
        "highs" | "" => Ok(Box::new(HighsBackend)),
        "enumeration" | "enum" => Ok(Box::new(EnumerationBackend::default())),
        other => Err(MilpError::BackendUnavailable(other.to_string())),
    }
}

/// Backend selected by `DBIO_SOLVER`, defaulting to the bundled open
/// backend.
pub fn backend_from_env() -> Result<Box<dyn SolverBackend>, MilpError> {
    match std::env::var(SOLVER_ENV) {
        Ok(name) => backend_by_name(&name),
        Err(_) => default_backend(),
    }
}

pub fn default_backend() -> Result<Box<dyn SolverBackend>, MilpError> {
    #[cfg(feature = "highs")]
    {
        Ok(Box::new(HighsBackend))
    }
    #[cfg(not(feature = "highs"))]
    {
        Ok(Box::new(EnumerationBackend::default()))
    }
}
