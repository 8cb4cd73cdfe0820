//! Year-by-year re-dispatch of a fixed investment under degradation.

use serde::{Deserialize, Serialize};

use crate::context::PlanningContext;
use crate::degradation::{count_cycles, DegradationError, DegradationState, DodHistogram};
use crate::model::{DispatchSolution, InvestmentDecision, YearOverrides};
use crate::Error;

/// Outcome of one validated year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearlyResult {
    pub year: u32,
    pub dispatch: DispatchSolution,
    pub state_in: DegradationState,
    /// `None` when this year's cycling exhausted the battery.
    pub state_out: Option<DegradationState>,
    pub histogram: DodHistogram,
    /// Equivalent full cycles and capacity lost during the year.
    pub efc: f64,
    pub deg: f64,
    pub eue: f64,
    pub operating_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub investment: InvestmentDecision,
    pub per_year: Vec<YearlyResult>,
    pub total_eue: f64,
    /// Sum of yearly operating costs; capital is not included.
    pub total_cost: f64,
    pub eue_tolerance: f64,
    /// `total_eue <= eue_tolerance`.
    pub feasible: bool,
    /// Year in which the battery would have faded to nothing; later years
    /// were not run.
    pub exhausted_in_year: Option<u32>,
}

impl ValidationReport {
    /// Shed-free over the whole horizon, with the battery surviving it.
    pub fn shed_free(&self) -> bool {
        self.feasible && self.exhausted_in_year.is_none()
    }
}

/// `alpha · Σ P_LS` over a dispatch.
pub fn compute_eue(dispatch: &DispatchSolution, alpha: f64) -> f64 {
    alpha * dispatch.steps.iter().map(|s| s.p_ls).sum::<f64>()
}

/// Runs every planning year in order, threading the degradation state.
pub fn validate(
    ctx: &PlanningContext,
    investment: InvestmentDecision,
) -> Result<ValidationReport, Error> {
    investment.validate()?;
    let alpha = ctx.scenario.alpha();
    let rated = investment.s_bess;
    let aging = &ctx.aging;
    let years = ctx.scenario.config.planning_years;
    let mut state = aging.initial_state(rated);
    let mut per_year = Vec::with_capacity(years as usize);
    let mut exhausted_in_year = None;

    for y in 1..=years {
        let overrides = YearOverrides {
            year: y,
            eta_pv: state.eta_pv,
            eta_bess: state.eta_bess,
            soh: state.soh,
            capacity: state.capacity,
        };
        let dispatch = ctx.solve_year(investment, overrides, (y - 1) as usize)?;
        let histogram = if rated > 0.0 {
            count_cycles(&dispatch.soc_trace(y, rated), aging.bin_width)?
        } else {
            DodHistogram::new(aging.bin_width)
        };
        let (state_out, efc, deg) = match aging.advance(&state, &histogram, alpha, rated) {
            Ok(next) => (Some(next), next.efc, next.deg),
            Err(DegradationError::BatteryExhausted { deg, .. }) => {
                log::warn!("battery exhausted during year {y}");
                exhausted_in_year = Some(y);
                let efc = deg / aging.dpc(rated);
                (None, efc, deg)
            }
            Err(e) => return Err(e.into()),
        };
        let eue = compute_eue(&dispatch, alpha);
        log::info!(
            "year {y}: capacity {:.6} MWh, eta_bess {:.4}, EUE {:.6} MWh, cost {:.2}",
            state.capacity,
            state.eta_bess,
            eue,
            dispatch.objective
        );
        per_year.push(YearlyResult {
            year: y,
            operating_cost: dispatch.objective,
            dispatch,
            state_in: state,
            state_out,
            histogram,
            efc,
            deg,
            eue,
        });
        match state_out {
            Some(next) => state = next,
            None => break,
        }
    }

    let total_eue = per_year.iter().map(|r| r.eue).sum::<f64>();
    let total_cost = per_year.iter().map(|r| r.operating_cost).sum();
    let tol = ctx.eue_tolerance;
    Ok(ValidationReport {
        investment,
        per_year,
        total_eue,
        total_cost,
        eue_tolerance: tol,
        feasible: total_eue <= tol,
        exhausted_in_year,
    })
}
