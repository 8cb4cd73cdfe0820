//! CSV and JSON report files.
//!
//! Money is written with two decimals, powers, energies and fractions with
//! six significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::degradation::DegradationState;
use crate::model::{CostBreakdown, DispatchSolution, EnergySummary, InvestmentDecision};
use crate::sizing::SizingResult;
use crate::validation::ValidationReport;
use crate::Error;

/// `x` rounded to six significant digits, without exponent notation.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (5 - exp).max(0) as usize;
    let scale = 10f64.powi(exp - 5);
    let rounded = (x / scale).round() * scale;
    let s = format!("{rounded:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn usd(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// What a run produced; every part is optional.
#[derive(Debug, Default, Clone, Copy)]
pub struct ReportBundle<'a> {
    pub plan: Option<&'a DispatchSolution>,
    pub validation: Option<&'a ValidationReport>,
    pub sizing: Option<&'a SizingResult>,
}

impl ReportBundle<'_> {
    pub fn investment(&self) -> Option<InvestmentDecision> {
        self.plan
            .map(|p| p.investment)
            .or(self.validation.map(|v| v.investment))
    }

    /// Plan costs when a plan exists, else validation costs summed over years.
    pub fn costs(&self) -> Option<CostBreakdown> {
        if let Some(p) = self.plan {
            return Some(p.costs);
        }
        self.validation.map(|v| {
            let mut total = CostBreakdown::default();
            for y in &v.per_year {
                total.add(&y.dispatch.costs);
            }
            total
        })
    }
}

fn write(path: &Path, text: String) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn costs_csv(costs: &CostBreakdown) -> String {
    let mut s = String::from("component,usd\n");
    for (name, v) in costs.rows() {
        s.push_str(&format!("{name},{}\n", usd(v)));
    }
    s
}

pub fn sizing_csv(inv: &InvestmentDecision) -> String {
    format!(
        "technology,size,unit\npv,{},MW\nbess,{},MWh\ncder,{},MW\n",
        sig6(inv.s_pv),
        sig6(inv.s_bess),
        sig6(inv.p_cder_max)
    )
}

pub fn energy_csv(e: &EnergySummary) -> String {
    let rows = [
        ("load", e.load),
        ("cder_generation", e.cder),
        ("pv_used", e.pv_used),
        ("pv_curtailed", e.pv_curtailed),
        ("bess_charge", e.bess_charge),
        ("bess_discharge", e.bess_discharge),
        ("load_shed", e.shed),
        ("grid_import", e.import),
        ("grid_export", e.export),
    ];
    let mut s = String::from("metric,mwh\n");
    for (name, v) in rows {
        s.push_str(&format!("{name},{}\n", sig6(v)));
    }
    s
}

/// Hourly series of one year of `dispatch`.
pub fn dispatch_csv(dispatch: &DispatchSolution, year: u32) -> String {
    let mut s = String::from(
        "day,hour,load_mw,pv_available_mw,p_cder_mw,p_chg_mw,p_dchg_mw,p_ls_mw,p_imp_mw,\
         p_exp_mw,p_curt_mw,e_bess_mwh,u_cder,u_chg,u_dchg,u_imp,u_exp,price_usd_per_mwh\n",
    );
    let b = |x: bool| if x { "1" } else { "0" };
    for h in dispatch.steps_of_year(year) {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            h.day,
            h.hour,
            sig6(h.load),
            sig6(h.pv_available),
            sig6(h.p_cder),
            sig6(h.p_chg),
            sig6(h.p_dchg),
            sig6(h.p_ls),
            sig6(h.p_imp),
            sig6(h.p_exp),
            sig6(h.p_curt),
            sig6(h.e_bess),
            b(h.u_cder),
            b(h.u_chg),
            b(h.u_dchg),
            b(h.u_imp),
            b(h.u_exp),
            usd(h.price),
        ));
    }
    s
}

/// One row per validated year: the state entering it and the wear it caused.
pub fn degradation_csv(report: &ValidationReport) -> String {
    let mut s = String::from("year,capacity_mwh,soh,eta_bess,eta_pv,efc,deg_mwh\n");
    for y in &report.per_year {
        let st: &DegradationState = &y.state_in;
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            y.year,
            sig6(st.capacity),
            sig6(st.soh),
            sig6(st.eta_bess),
            sig6(st.eta_pv),
            sig6(y.efc),
            sig6(y.deg)
        ));
    }
    s
}

pub fn validation_csv(report: &ValidationReport) -> String {
    let mut s = String::from("year,eue_mwh,capacity_mwh,soh,eta_bess,op_cost_usd\n");
    for y in &report.per_year {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            y.year,
            sig6(y.eue),
            sig6(y.state_in.capacity),
            sig6(y.state_in.soh),
            sig6(y.state_in.eta_bess),
            usd(y.operating_cost)
        ));
    }
    s
}

pub fn iterations_csv(result: &SizingResult) -> String {
    let mut s = String::from("iter,phase,size_mwh,objective_usd,eue_mwh,shed,lb,ub\n");
    for r in &result.iterations {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.index,
            r.phase,
            sig6(r.candidate_size),
            usd(r.objective),
            sig6(r.total_eue),
            r.shed,
            sig6(r.lb),
            r.ub.map(sig6).unwrap_or_default()
        ));
    }
    s
}

#[derive(Serialize)]
struct PlanSummary<'a> {
    status: dbio_milp::SolveStatus,
    objective: f64,
    achieved_gap: f64,
    investment: InvestmentDecision,
    e_init: f64,
    costs: &'a CostBreakdown,
    energy: EnergySummary,
}

fn plan_json(p: &DispatchSolution) -> serde_json::Value {
    serde_json::to_value(PlanSummary {
        status: p.status,
        objective: p.objective,
        achieved_gap: p.achieved_gap,
        investment: p.investment,
        e_init: p.e_init,
        costs: &p.costs,
        energy: p.energy_summary(),
    })
    .expect("plan summary serializes")
}

fn validation_json(v: &ValidationReport) -> serde_json::Value {
    let years: Vec<_> = v
        .per_year
        .iter()
        .map(|y| {
            json!({
                "year": y.year,
                "eue_mwh": y.eue,
                "operating_cost": y.operating_cost,
                "efc": y.efc,
                "deg_mwh": y.deg,
                "state_in": y.state_in,
                "state_out": y.state_out,
                "dod_histogram": y.histogram.bins().collect::<Vec<_>>(),
                "e_init": y.dispatch.e_init,
                "costs": y.dispatch.costs,
                "energy": y.dispatch.energy_summary(),
            })
        })
        .collect();
    json!({
        "investment": v.investment,
        "total_eue_mwh": v.total_eue,
        "total_operating_cost": v.total_cost,
        "eue_tolerance": v.eue_tolerance,
        "feasible": v.feasible,
        "exhausted_in_year": v.exhausted_in_year,
        "years": years,
    })
}

/// Nested summary of everything in the bundle.
pub fn report_json(bundle: &ReportBundle) -> serde_json::Value {
    json!({
        "investment": bundle.investment(),
        "costs": bundle.costs().map(|c| json!({
            "components": c,
            "capital": c.capital(),
            "operating": c.operating(),
            "total": c.total(),
        })),
        "plan": bundle.plan.map(plan_json),
        "validation": bundle.validation.map(validation_json),
        "sizing": bundle.sizing,
    })
}

/// Writes every report the bundle supports into `out_dir` and returns the
/// paths in writing order.
pub fn emit_reports(bundle: &ReportBundle, out_dir: &Path) -> Result<Vec<PathBuf>, Error> {
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<(), Error> {
        let path = out_dir.join(name);
        write(&path, text)?;
        written.push(path);
        Ok(())
    };

    if let Some(c) = bundle.costs() {
        put("costs.csv".into(), costs_csv(&c))?;
    }
    if let Some(inv) = bundle.investment() {
        put("sizing.csv".into(), sizing_csv(&inv))?;
    }
    if let Some(v) = bundle.validation {
        for y in &v.per_year {
            put(
                format!("dispatch_y{}.csv", y.year),
                dispatch_csv(&y.dispatch, y.year),
            )?;
        }
        put("degradation.csv".into(), degradation_csv(v))?;
        put("validation.csv".into(), validation_csv(v))?;
    } else if let Some(p) = bundle.plan {
        for y in p.years() {
            put(format!("dispatch_y{y}.csv"), dispatch_csv(p, y))?;
        }
    }
    if let Some(p) = bundle.plan {
        put("energy.csv".into(), energy_csv(&p.energy_summary()))?;
    }
    if let Some(s) = bundle.sizing {
        put("iterations.csv".into(), iterations_csv(s))?;
    }
    let json = serde_json::to_string_pretty(&report_json(bundle)).expect("report serializes");
    put("report.json".into(), json + "\n")?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(3.8123456), "3.81235");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(1234567.0), "1234570");
        assert_eq!(sig6(-2.5), "-2.5");
        assert_eq!(sig6(-1e-20), "-0.00000000000000000001");
        assert_eq!(sig6(f64::NAN), "");
    }

    #[test]
    fn money_has_two_decimals() {
        assert_eq!(usd(1387238.456), "1387238.46");
        assert_eq!(usd(-0.001), "0.00");
        assert_eq!(usd(62.75), "62.75");
    }
}
