use dbio_milp::{SolveResult, SolveStatus};
use serde::{Deserialize, Serialize};

use super::{InvestmentDecision, ModelError, ModelIndex};

/// Objective split by component, in $. Export revenue is stored as a
/// positive amount and subtracted in [`CostBreakdown::total`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub capital_cder: f64,
    pub capital_pv: f64,
    pub capital_bess: f64,
    pub cder_operation: f64,
    pub cder_no_load: f64,
    pub pv_degradation: f64,
    pub bess_degradation: f64,
    pub shed_penalty: f64,
    pub grid_import: f64,
    pub export_revenue: f64,
}

impl CostBreakdown {
    pub fn capital(&self) -> f64 {
        self.capital_cder + self.capital_pv + self.capital_bess
    }

    /// Everything except capital.
    pub fn operating(&self) -> f64 {
        self.cder_operation
            + self.cder_no_load
            + self.pv_degradation
            + self.bess_degradation
            + self.shed_penalty
            + self.grid_import
            - self.export_revenue
    }

    pub fn total(&self) -> f64 {
        self.capital() + self.operating()
    }

    /// `(label, signed amount)` rows that add up to [`CostBreakdown::total`].
    pub fn rows(&self) -> [(&'static str, f64); 10] {
        [
            ("capital_cder", self.capital_cder),
            ("capital_pv", self.capital_pv),
            ("capital_bess", self.capital_bess),
            ("cder_operation", self.cder_operation),
            ("cder_no_load", self.cder_no_load),
            ("pv_degradation", self.pv_degradation),
            ("bess_degradation", self.bess_degradation),
            ("shed_penalty", self.shed_penalty),
            ("grid_import", self.grid_import),
            ("export_revenue", -self.export_revenue),
        ]
    }

    pub fn add(&mut self, other: &CostBreakdown) {
        self.capital_cder += other.capital_cder;
        self.capital_pv += other.capital_pv;
        self.capital_bess += other.capital_bess;
        self.cder_operation += other.cder_operation;
        self.cder_no_load += other.cder_no_load;
        self.pv_degradation += other.pv_degradation;
        self.bess_degradation += other.bess_degradation;
        self.shed_penalty += other.shed_penalty;
        self.grid_import += other.grid_import;
        self.export_revenue += other.export_revenue;
    }
}

/// Decisions at one (year, day, hour) step. Powers in MW, energy in MWh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourlyDispatch {
    pub year: u32,
    pub day: u32,
    pub hour: u32,
    pub load: f64,
    /// PV output available before curtailment.
    pub pv_available: f64,
    pub price: f64,
    pub p_cder: f64,
    pub p_chg: f64,
    pub p_dchg: f64,
    pub p_ls: f64,
    pub p_imp: f64,
    pub p_exp: f64,
    pub p_curt: f64,
    pub e_bess: f64,
    pub u_cder: bool,
    pub u_chg: bool,
    pub u_dchg: bool,
    pub u_imp: bool,
    pub u_exp: bool,
}

impl HourlyDispatch {
    /// Supply minus demand; zero for a balanced step.
    pub fn balance_residual(&self) -> f64 {
        self.p_cder + self.p_dchg + self.pv_available + self.p_ls + self.p_imp
            - self.load
            - self.p_chg
            - self.p_curt
            - self.p_exp
    }
}

/// Yearly-scaled energy totals in MWh.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergySummary {
    pub load: f64,
    pub cder: f64,
    pub pv_used: f64,
    pub pv_curtailed: f64,
    pub bess_charge: f64,
    pub bess_discharge: f64,
    pub shed: f64,
    pub import: f64,
    pub export: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchSolution {
    pub status: SolveStatus,
    pub objective: f64,
    pub achieved_gap: f64,
    pub investment: InvestmentDecision,
    pub e_init: f64,
    pub alpha: f64,
    pub hours_per_day: usize,
    pub costs: CostBreakdown,
    pub steps: Vec<HourlyDispatch>,
}

impl DispatchSolution {
    pub fn years(&self) -> Vec<u32> {
        let mut ys: Vec<u32> = self.steps.iter().map(|s| s.year).collect();
        ys.dedup();
        ys
    }

    pub fn steps_of_year(&self, year: u32) -> impl Iterator<Item = &HourlyDispatch> {
        self.steps.iter().filter(move |s| s.year == year)
    }

    /// Stored energy over a year as a fraction of `rated`: each day
    /// contributes its starting level followed by its hourly levels.
    pub fn soc_trace(&self, year: u32, rated: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for s in self.steps_of_year(year) {
            if s.hour == 0 {
                out.push(self.e_init / rated);
            }
            out.push(s.e_bess / rated);
        }
        out
    }

    /// `alpha · Σ P_LS` over the whole solution.
    pub fn eue(&self) -> f64 {
        self.alpha * self.steps.iter().map(|s| s.p_ls).sum::<f64>()
    }

    pub fn energy_summary(&self) -> EnergySummary {
        let a = self.alpha;
        let mut e = EnergySummary::default();
        for s in &self.steps {
            e.load += a * s.load;
            e.cder += a * s.p_cder;
            e.pv_used += a * (s.pv_available - s.p_curt);
            e.pv_curtailed += a * s.p_curt;
            e.bess_charge += a * s.p_chg;
            e.bess_discharge += a * s.p_dchg;
            e.shed += a * s.p_ls;
            e.import += a * s.p_imp;
            e.export += a * s.p_exp;
        }
        e
    }
}

/// Reads a solved model back into series, sizes and a cost breakdown. The
/// breakdown must reproduce the objective to 1e-6 relative.
pub fn extract_solution(
    result: &SolveResult,
    index: &ModelIndex,
) -> Result<DispatchSolution, ModelError> {
    if !result.status.has_solution() {
        return Err(ModelError::NoSolution(result.status));
    }
    let x = &result.primal;
    let val = |v: dbio_milp::VarId| x[v.index()];
    let bit = |v: dbio_milp::VarId| x[v.index()] > 0.5;
    let investment = InvestmentDecision {
        s_pv: index.s_pv.value(x),
        s_bess: index.s_bess.value(x),
        p_cder_max: index.p_cder_max.value(x),
    };
    let c = &index.coeffs;
    let a = index.alpha;

    let mut costs = CostBreakdown::default();
    if index.ms {
        costs.capital_cder = c.cder_capital * investment.p_cder_max;
        costs.capital_pv = c.pv_capital * investment.s_pv;
        costs.capital_bess = c.bess_capital * investment.s_bess;
    }
    costs.pv_degradation = c.pv_deg_per_mw_year * investment.s_pv * index.years as f64;

    let mut steps = Vec::with_capacity(index.steps.len());
    for (v, d) in index.steps.iter().zip(&index.data) {
        let h = HourlyDispatch {
            year: d.year,
            day: d.day,
            hour: d.hour,
            load: d.load,
            pv_available: d.eta_pv * d.pv_cf * investment.s_pv,
            price: d.price,
            p_cder: val(v.p_cder),
            p_chg: val(v.p_chg),
            p_dchg: val(v.p_dchg),
            p_ls: val(v.p_ls),
            p_imp: val(v.p_imp),
            p_exp: val(v.p_exp),
            p_curt: val(v.p_curt),
            e_bess: val(v.e_bess),
            u_cder: bit(v.u_cder),
            u_chg: bit(v.u_chg),
            u_dchg: bit(v.u_dchg),
            u_imp: bit(v.u_imp),
            u_exp: bit(v.u_exp),
        };
        costs.cder_operation += a * c.cder_op * h.p_cder;
        costs.cder_no_load += a * c.cder_no_load * val(v.u_cder);
        costs.bess_degradation += a * c.bess_deg_per_mwh * h.p_dchg;
        costs.shed_penalty += a * c.ls_penalty * h.p_ls;
        costs.grid_import += a * d.price * h.p_imp;
        costs.export_revenue += a * c.export_factor * d.price * h.p_exp;
        steps.push(h);
    }

    let breakdown = costs.total();
    if (breakdown - result.objective).abs() > 1e-6 * result.objective.abs().max(1.0) {
        return Err(ModelError::Accounting {
            breakdown,
            objective: result.objective,
        });
    }
    Ok(DispatchSolution {
        status: result.status,
        objective: result.objective,
        achieved_gap: result.achieved_gap,
        investment,
        e_init: val(index.e_init),
        alpha: a,
        hours_per_day: index.hours,
        costs,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breakdown_rows_sum_to_total() {
        let c = CostBreakdown {
            capital_cder: 1.0,
            capital_pv: 2.0,
            capital_bess: 3.0,
            cder_operation: 4.0,
            cder_no_load: 5.0,
            pv_degradation: 6.0,
            bess_degradation: 7.0,
            shed_penalty: 8.0,
            grid_import: 9.0,
            export_revenue: 10.0,
        };
        let sum: f64 = c.rows().iter().map(|r| r.1).sum();
        assert_eq!(sum, c.total());
        assert_eq!(c.total(), 35.0);
        assert_eq!(c.operating(), 29.0);
    }
}
