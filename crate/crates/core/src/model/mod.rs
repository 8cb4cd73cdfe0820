//! Multi-year planning model and its single-year validation variant.

mod build;
mod solution;

use dbio_milp::{MilpError, SolveStatus, VarId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{
    build, build_integrated, build_single_year, effective_big_m, InvestmentDecision,
    ModelBuildOptions, SizePins, YearOverrides,
};
pub use solution::{
    extract_solution, CostBreakdown, DispatchSolution, EnergySummary, HourlyDispatch,
};

use crate::scenario::Scenario;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid build options: {0}")]
    InvalidOptions(String),
    #[error("invalid investment: {0}")]
    InvalidInvestment(String),
    #[error("degraded capacity {capacity} MWh exceeds rated {rated} MWh")]
    OversizedOverride { capacity: f64, rated: f64 },
    #[error("solver returned {0:?} without a usable solution")]
    NoSolution(SolveStatus),
    #[error("cost breakdown {breakdown} does not add up to the objective {objective}")]
    Accounting { breakdown: f64, objective: f64 },
    #[error(transparent)]
    Milp(#[from] MilpError),
}

/// A size that is either a decision variable or a constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Size {
    Var(VarId),
    Fixed(f64),
}

impl Size {
    pub fn value(&self, primal: &[f64]) -> f64 {
        match *self {
            Size::Var(v) => primal[v.index()],
            Size::Fixed(x) => x,
        }
    }
}

/// Variables of one (year, day, hour) step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepVars {
    pub p_cder: VarId,
    pub p_chg: VarId,
    pub p_dchg: VarId,
    pub p_ls: VarId,
    pub p_imp: VarId,
    pub p_exp: VarId,
    pub p_curt: VarId,
    pub e_bess: VarId,
    pub u_cder: VarId,
    pub u_chg: VarId,
    pub u_dchg: VarId,
    pub u_imp: VarId,
    pub u_exp: VarId,
}

/// Inputs attached to one step, kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepData {
    /// 1-based year number.
    pub year: u32,
    pub day: u32,
    pub hour: u32,
    pub load: f64,
    pub pv_cf: f64,
    pub eta_pv: f64,
    pub price: f64,
}

/// Per-unit cost rates drawn from the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostCoefficients {
    pub cder_capital: f64,
    pub pv_capital: f64,
    pub bess_capital: f64,
    pub cder_op: f64,
    pub cder_no_load: f64,
    /// $ per MW of PV per year.
    pub pv_deg_per_mw_year: f64,
    /// $ per MWh discharged.
    pub bess_deg_per_mwh: f64,
    pub ls_penalty: f64,
    pub export_factor: f64,
}

impl CostCoefficients {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            cder_capital: s.cder.capital,
            pv_capital: s.pv.capital,
            bess_capital: s.bess.capital,
            cder_op: s.cder.op_cost,
            cder_no_load: s.cder.no_load,
            pv_deg_per_mw_year: s.pv.degradation_cost_per_mw(),
            bess_deg_per_mwh: s.bess.degradation_cost_per_mwh(),
            ls_penalty: s.config.ls_penalty,
            export_factor: s.tariff.export_factor,
        }
    }
}

/// Maps model variables back to their meaning.
#[derive(Debug, Clone)]
pub struct ModelIndex {
    pub steps: Vec<StepVars>,
    pub data: Vec<StepData>,
    pub s_pv: Size,
    pub s_bess: Size,
    pub p_cder_max: Size,
    pub e_init: VarId,
    pub alpha: f64,
    pub ms: bool,
    pub years: usize,
    pub days: usize,
    pub hours: usize,
    pub big_m: f64,
    /// Charging efficiency used in the energy rows.
    pub eta_bess: f64,
    /// Degraded storage capacity of a single-year build; NaN otherwise.
    pub capacity: f64,
    pub coeffs: CostCoefficients,
}
