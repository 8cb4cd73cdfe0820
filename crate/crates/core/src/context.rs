//! Shared solve plumbing for planning, validation and sizing.

use std::path::PathBuf;
use std::sync::Arc;

use dbio_milp::{solve_with_dump, SolveOptions, SolverBackend};

use crate::degradation::AgingModel;
use crate::model::{
    build_integrated, build_single_year, extract_solution, DispatchSolution, InvestmentDecision,
    SizePins, YearOverrides,
};
use crate::scenario::{MultiYearProfiles, Scenario};
use crate::Error;

/// Default EUE (MWh) below which a run counts as shed-free.
pub const DEFAULT_EUE_TOLERANCE: f64 = 1e-6;

/// A loaded scenario together with its horizon profiles, solver and
/// tolerances.
#[derive(Clone)]
pub struct PlanningContext {
    pub scenario: Scenario,
    pub profiles: MultiYearProfiles,
    pub aging: AgingModel,
    pub backend: Arc<dyn SolverBackend>,
    pub solve_options: SolveOptions,
    pub eue_tolerance: f64,
    /// When set, every model is written here as an LP file before solving.
    pub dump_lp_dir: Option<PathBuf>,
    solve_count: Arc<std::sync::atomic::AtomicUsize>,
}

impl std::fmt::Debug for PlanningContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PlanningContext")
            .field("backend", &self.backend.name())
            .field("solve_options", &self.solve_options)
            .field("eue_tolerance", &self.eue_tolerance)
            .finish_non_exhaustive()
    }
}

impl PlanningContext {
    /// Validates the scenario and prepares profiles, aging model and solver
    /// options from it.
    pub fn new(scenario: Scenario, backend: Arc<dyn SolverBackend>) -> Result<Self, Error> {
        scenario.validate()?;
        let profiles = scenario.profiles()?;
        let aging = scenario.aging_model()?;
        let solve_options = scenario.solver.to_options();
        Ok(Self {
            scenario,
            profiles,
            aging,
            backend,
            solve_options,
            eue_tolerance: DEFAULT_EUE_TOLERANCE,
            dump_lp_dir: None,
            solve_count: Arc::default(),
        })
    }

    /// Uses the backend named by `DBIO_SOLVER`, or the default one.
    pub fn with_env_backend(scenario: Scenario) -> Result<Self, Error> {
        let backend: Arc<dyn SolverBackend> = dbio_milp::backend_from_env()?.into();
        Self::new(scenario, backend)
    }

    /// Replaces the aging model by one with every degradation path switched off.
    pub fn without_degradation(mut self) -> Self {
        self.aging = self.aging.without_degradation();
        self
    }

    fn dump_path(&self, label: &str) -> Option<PathBuf> {
        self.dump_lp_dir.as_ref().map(|dir| {
            let n = self
                .solve_count
                .fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            dir.join(format!("{n:04}_{label}.lp"))
        })
    }

    /// Solves the multi-year model with capital costs; `pins` hold sizes fixed.
    pub fn solve_integrated(&self, pins: SizePins) -> Result<DispatchSolution, Error> {
        let (problem, index) = build_integrated(&self.scenario, &self.profiles, pins)?;
        log::info!(
            "integrated solve: {} variables ({} binary), {} rows{}",
            problem.num_variables(),
            problem.num_binaries(),
            problem.num_constraints(),
            pins.bess
                .map(|s| format!(", storage pinned at {s:.6} MWh"))
                .unwrap_or_default()
        );
        let lp = self.dump_path("integrated");
        let result = solve_with_dump(
            &problem,
            &self.solve_options,
            self.backend.as_ref(),
            lp.as_deref(),
        )?;
        log::info!(
            "integrated solve: {:?}, objective {:.2}, gap {:.2e}, {:.2?}",
            result.status,
            result.objective,
            result.achieved_gap,
            result.runtime
        );
        extract_solution(&result, &index).map_err(|e| Error::stage("integrated solve", None, e))
    }

    /// Solves one planning year (`year_idx` 0-based) at fixed sizes with the
    /// given degraded parameters.
    pub fn solve_year(
        &self,
        investment: InvestmentDecision,
        overrides: YearOverrides,
        year_idx: usize,
    ) -> Result<DispatchSolution, Error> {
        let profiles = self.profiles.year(year_idx);
        let (problem, index) = build_single_year(&self.scenario, &profiles, investment, overrides)?;
        let lp = self.dump_path(&format!("year{}", overrides.year));
        let result = solve_with_dump(
            &problem,
            &self.solve_options,
            self.backend.as_ref(),
            lp.as_deref(),
        )?;
        log::debug!(
            "year {} solve: {:?}, objective {:.2}, {:.2?}",
            overrides.year,
            result.status,
            result.objective,
            result.runtime
        );
        extract_solution(&result, &index)
            .map_err(|e| Error::stage("yearly validation", Some(overrides.year), e))
    }
}
