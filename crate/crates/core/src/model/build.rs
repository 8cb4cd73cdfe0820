use dbio_milp::{ConstraintSense, MilpError, MilpProblem, VarId};
use serde::{Deserialize, Serialize};

use crate::degradation::pv_efficiency;
use crate::scenario::{MultiYearProfiles, Scenario};

use super::{CostCoefficients, ModelError, ModelIndex, Size, StepData, StepVars};

use ConstraintSense::{Eq, Ge, Le};

/// Installed sizes: PV in MW, storage in MWh, generator in MW.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InvestmentDecision {
    pub s_pv: f64,
    pub s_bess: f64,
    pub p_cder_max: f64,
}

impl InvestmentDecision {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (v, name) in [
            (self.s_pv, "s_pv"),
            (self.s_bess, "s_bess"),
            (self.p_cder_max, "p_cder_max"),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ModelError::InvalidInvestment(format!(
                    "{name} = {v} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }
}

/// Sizes held at given values while the integrated model still charges
/// their capital cost.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SizePins {
    pub pv: Option<f64>,
    pub bess: Option<f64>,
    pub cder: Option<f64>,
}

/// Degraded parameters for one validation year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YearOverrides {
    /// 1-based year number, used for labelling.
    pub year: u32,
    pub eta_pv: f64,
    pub eta_bess: f64,
    pub soh: f64,
    /// Remaining storage capacity in MWh.
    pub capacity: f64,
}

/// Capital toggle and fixed-investment inputs of a build.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelBuildOptions {
    /// Include capital costs and size variables.
    pub ms: bool,
    pub fixed_investment: Option<InvestmentDecision>,
    pub year_overrides: Option<YearOverrides>,
    pub pins: SizePins,
}

impl ModelBuildOptions {
    pub fn integrated(pins: SizePins) -> Self {
        Self {
            ms: true,
            fixed_investment: None,
            year_overrides: None,
            pins,
        }
    }

    pub fn single_year(investment: InvestmentDecision, overrides: YearOverrides) -> Self {
        Self {
            ms: false,
            fixed_investment: Some(investment),
            year_overrides: Some(overrides),
            pins: SizePins::default(),
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        match (self.ms, &self.fixed_investment, &self.year_overrides) {
            (true, None, None) => Ok(()),
            (false, Some(inv), Some(_)) => inv.validate(),
            _ => Err(ModelError::InvalidOptions(
                "capital costs go with free sizes; a fixed investment needs year overrides and no capital".into(),
            )),
        }
    }
}

/// Linearization constant: configured value, or ten times the peak load,
/// raised to cover the tie line and every pinned or capped size.
pub fn effective_big_m(scenario: &Scenario, profiles: &MultiYearProfiles, pins: &SizePins) -> f64 {
    let bess = &scenario.bess;
    let per_hour = 1.0 / bess.t_chg.min(bess.t_dchg);
    let mut m = scenario
        .config
        .big_m
        .unwrap_or_else(|| (10.0 * profiles.peak_load()).max(1.0));
    m = m.max(scenario.config.tie_limit);
    if let Some(c) = pins.cder.or(scenario.cder.max_size) {
        m = m.max(c);
    }
    if let Some(s) = pins.bess.or(bess.max_size) {
        m = m.max(s * per_hour);
    }
    m
}

fn check_profiles(scenario: &Scenario, profiles: &MultiYearProfiles) -> Result<(), ModelError> {
    let cfg = &scenario.config;
    let steps = cfg.steps_per_year();
    if profiles.hours_per_day != cfg.hours_per_day as usize
        || profiles.years() == 0
        || profiles.pv_cf.len() != profiles.years()
        || profiles
            .load
            .iter()
            .chain(&profiles.pv_cf)
            .any(|s| s.len() != steps)
        || scenario.tariff.import_price.len() != steps
    {
        return Err(ModelError::Dimension(format!(
            "profiles must hold {} years x {} days x {} hours",
            profiles.years(),
            cfg.rep_days,
            cfg.hours_per_day
        )));
    }
    Ok(())
}

struct Builder {
    p: MilpProblem,
}

impl Builder {
    fn cont(&mut self, name: String, lo: f64, hi: f64) -> Result<VarId, MilpError> {
        self.p.add_continuous(name, lo, hi)
    }

    fn row(
        &mut self,
        name: String,
        terms: &[(VarId, f64)],
        sense: ConstraintSense,
        rhs: f64,
    ) -> Result<(), MilpError> {
        self.p.add_constraint(name, terms, sense, rhs).map(|_| ())
    }

    fn cost(&mut self, v: VarId, c: f64) -> Result<(), MilpError> {
        if c != 0.0 {
            self.p.add_objective_term(v, c)?;
        }
        Ok(())
    }
}

/// Builds the multi-year model with free (or pinned) sizes and capital cost.
pub fn build_integrated(
    scenario: &Scenario,
    profiles: &MultiYearProfiles,
    pins: SizePins,
) -> Result<(MilpProblem, ModelIndex), ModelError> {
    build(scenario, profiles, &ModelBuildOptions::integrated(pins))
}

/// Builds one validation year with constant sizes and degraded parameters.
/// `profiles` must hold exactly that year.
pub fn build_single_year(
    scenario: &Scenario,
    profiles: &MultiYearProfiles,
    investment: InvestmentDecision,
    overrides: YearOverrides,
) -> Result<(MilpProblem, ModelIndex), ModelError> {
    build(
        scenario,
        profiles,
        &ModelBuildOptions::single_year(investment, overrides),
    )
}

pub fn build(
    scenario: &Scenario,
    profiles: &MultiYearProfiles,
    opts: &ModelBuildOptions,
) -> Result<(MilpProblem, ModelIndex), ModelError> {
    opts.validate()?;
    check_profiles(scenario, profiles)?;
    let cfg = &scenario.config;
    let (cder, pv, bess) = (&scenario.cder, &scenario.pv, &scenario.bess);
    let alpha = cfg.alpha();
    let tie = cfg.tie_limit;
    let big_m = effective_big_m(scenario, profiles, &opts.pins);
    let coeffs = CostCoefficients::from_scenario(scenario);
    let years = profiles.years();
    let days = cfg.rep_days as usize;
    let hours = cfg.hours_per_day as usize;

    let mut b = Builder {
        p: MilpProblem::new(),
    };

    // Sizes and the per-year parameters that depend on the build mode.
    let (s_pv, s_bess, p_cder_max, first_year, eta_bess, soc_top, capacity, rated);
    let fixed = opts.fixed_investment.zip(opts.year_overrides);
    match fixed {
        None => {
            let size = |pin: Option<f64>, cap: Option<f64>| match pin {
                Some(v) => (v, v),
                None => (0.0, cap.unwrap_or(f64::INFINITY)),
            };
            let (lo, hi) = size(opts.pins.pv, pv.max_size);
            let v_pv = b.cont("s_pv".into(), lo, hi)?;
            let (lo, hi) = size(opts.pins.bess, bess.max_size);
            let v_bess = b.cont("s_bess".into(), lo, hi)?;
            let (lo, hi) = size(opts.pins.cder, cder.max_size);
            let v_cder = b.cont("p_cder_max".into(), lo, hi)?;
            s_pv = Size::Var(v_pv);
            s_bess = Size::Var(v_bess);
            p_cder_max = Size::Var(v_cder);
            first_year = 1;
            eta_bess = bess.eta_rt;
            soc_top = bess.soh_init * bess.soc_max;
            capacity = 0.0;
            rated = 0.0;
        }
        Some((inv, ov)) => {
            if ov.capacity > inv.s_bess * (1.0 + 1e-12) {
                return Err(ModelError::OversizedOverride {
                    capacity: ov.capacity,
                    rated: inv.s_bess,
                });
            }
            if !(ov.eta_bess > 0.0 && ov.eta_bess <= 1.0 && ov.eta_pv >= 0.0 && ov.soh >= 0.0) {
                return Err(ModelError::InvalidOptions(format!(
                    "year overrides out of range: {ov:?}"
                )));
            }
            s_pv = Size::Fixed(inv.s_pv);
            s_bess = Size::Fixed(inv.s_bess);
            p_cder_max = Size::Fixed(inv.p_cder_max);
            first_year = ov.year;
            eta_bess = ov.eta_bess;
            soc_top = ov.soh * bess.soc_max;
            capacity = ov.capacity.max(0.0);
            rated = inv.s_bess;
        }
    }
    let is_fixed = fixed.is_some();

    // Stored-energy window on e_init and every e_bess.
    let (e_lo, e_hi) = if is_fixed {
        let lo = bess.soc_min * capacity;
        (lo, (soc_top * rated).max(lo))
    } else {
        (0.0, f64::INFINITY)
    };
    let e_init = b.cont("e_init".into(), e_lo, e_hi)?;
    let soc_rows = |b: &mut Builder, name: &str, e: VarId| -> Result<(), MilpError> {
        if let Size::Var(sb) = s_bess {
            b.row(
                format!("soc_lo_{name}"),
                &[(e, 1.0), (sb, -bess.soc_min)],
                Ge,
                0.0,
            )?;
            b.row(
                format!("soc_hi_{name}"),
                &[(e, 1.0), (sb, -soc_top)],
                Le,
                0.0,
            )?;
        }
        Ok(())
    };
    soc_rows(&mut b, "init", e_init)?;

    let mut steps = Vec::with_capacity(years * days * hours);
    let mut data = Vec::with_capacity(steps.capacity());
    for y in 0..years {
        let year = first_year + y as u32;
        let eta_pv = match fixed {
            Some((_, ov)) => ov.eta_pv,
            None => pv_efficiency(year, pv.eta_init, pv.deg_rate),
        };
        for d in 0..days {
            let mut e_prev = e_init;
            for t in 0..hours {
                let i = d * hours + t;
                let tag = format!("{year}_{d}_{t}");
                let load = profiles.load[y][i];
                let cf = profiles.pv_cf[y][i];
                let price = scenario.tariff.import_price[i];
                let pv_per_mw = eta_pv * cf;

                let (cder_hi, chg_hi, dchg_hi, curt_hi) = match fixed {
                    Some((inv, _)) => (
                        inv.p_cder_max,
                        capacity / bess.t_chg,
                        capacity / bess.t_dchg,
                        pv_per_mw * inv.s_pv,
                    ),
                    None => (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY),
                };
                let v = StepVars {
                    p_cder: b.cont(format!("p_cder_{tag}"), 0.0, cder_hi)?,
                    p_chg: b.cont(format!("p_chg_{tag}"), 0.0, chg_hi)?,
                    p_dchg: b.cont(format!("p_dchg_{tag}"), 0.0, dchg_hi)?,
                    p_ls: b.cont(format!("p_ls_{tag}"), 0.0, load)?,
                    p_imp: b.cont(format!("p_imp_{tag}"), 0.0, tie)?,
                    p_exp: b.cont(format!("p_exp_{tag}"), 0.0, tie)?,
                    p_curt: b.cont(format!("p_curt_{tag}"), 0.0, curt_hi)?,
                    e_bess: b.cont(format!("e_bess_{tag}"), e_lo, e_hi)?,
                    u_cder: b.p.add_binary(format!("u_cder_{tag}"))?,
                    u_chg: b.p.add_binary(format!("u_chg_{tag}"))?,
                    u_dchg: b.p.add_binary(format!("u_dchg_{tag}"))?,
                    u_imp: b.p.add_binary(format!("u_imp_{tag}"))?,
                    u_exp: b.p.add_binary(format!("u_exp_{tag}"))?,
                };

                // Power balance.
                let mut terms = vec![
                    (v.p_cder, 1.0),
                    (v.p_dchg, 1.0),
                    (v.p_ls, 1.0),
                    (v.p_imp, 1.0),
                    (v.p_chg, -1.0),
                    (v.p_curt, -1.0),
                    (v.p_exp, -1.0),
                ];
                let mut rhs = load;
                match s_pv {
                    Size::Var(sp) => terms.push((sp, pv_per_mw)),
                    Size::Fixed(sp) => rhs -= pv_per_mw * sp,
                }
                b.row(format!("balance_{tag}"), &terms, Eq, rhs)?;

                // Generator commitment and limits.
                match p_cder_max {
                    Size::Var(pm) => {
                        b.row(
                            format!("cder_on_{tag}"),
                            &[(v.p_cder, 1.0), (v.u_cder, -big_m)],
                            Le,
                            0.0,
                        )?;
                        b.row(
                            format!("cder_cap_{tag}"),
                            &[(v.p_cder, 1.0), (pm, -1.0)],
                            Le,
                            0.0,
                        )?;
                        if cder.p_min > 0.0 {
                            b.row(
                                format!("cder_min_{tag}"),
                                &[(v.p_cder, 1.0), (v.u_cder, -big_m)],
                                Ge,
                                cder.p_min - big_m,
                            )?;
                        }
                    }
                    Size::Fixed(pm) => {
                        b.row(
                            format!("cder_on_{tag}"),
                            &[(v.p_cder, 1.0), (v.u_cder, -pm)],
                            Le,
                            0.0,
                        )?;
                        if cder.p_min > 0.0 {
                            b.row(
                                format!("cder_min_{tag}"),
                                &[(v.p_cder, 1.0), (v.u_cder, -cder.p_min)],
                                Ge,
                                0.0,
                            )?;
                        }
                    }
                }

                // Curtailment cannot exceed available PV output.
                if let Size::Var(sp) = s_pv {
                    b.row(
                        format!("curt_{tag}"),
                        &[(v.p_curt, 1.0), (sp, -pv_per_mw)],
                        Le,
                        0.0,
                    )?;
                }

                // Storage.
                soc_rows(&mut b, &tag, v.e_bess)?;
                b.row(
                    format!("chg_excl_{tag}"),
                    &[(v.u_chg, 1.0), (v.u_dchg, 1.0)],
                    Le,
                    1.0,
                )?;
                match s_bess {
                    Size::Var(sb) => {
                        b.row(
                            format!("chg_on_{tag}"),
                            &[(v.p_chg, 1.0), (v.u_chg, -big_m)],
                            Le,
                            0.0,
                        )?;
                        b.row(
                            format!("chg_cap_{tag}"),
                            &[(v.p_chg, 1.0), (sb, -1.0 / bess.t_chg)],
                            Le,
                            0.0,
                        )?;
                        b.row(
                            format!("dchg_on_{tag}"),
                            &[(v.p_dchg, 1.0), (v.u_dchg, -big_m)],
                            Le,
                            0.0,
                        )?;
                        b.row(
                            format!("dchg_cap_{tag}"),
                            &[(v.p_dchg, 1.0), (sb, -1.0 / bess.t_dchg)],
                            Le,
                            0.0,
                        )?;
                    }
                    Size::Fixed(_) => {
                        b.row(
                            format!("chg_on_{tag}"),
                            &[(v.p_chg, 1.0), (v.u_chg, -chg_hi)],
                            Le,
                            0.0,
                        )?;
                        b.row(
                            format!("dchg_on_{tag}"),
                            &[(v.p_dchg, 1.0), (v.u_dchg, -dchg_hi)],
                            Le,
                            0.0,
                        )?;
                    }
                }
                b.row(
                    format!("energy_{tag}"),
                    &[
                        (v.e_bess, 1.0),
                        (e_prev, -1.0),
                        (v.p_chg, -eta_bess),
                        (v.p_dchg, 1.0),
                    ],
                    Eq,
                    0.0,
                )?;
                e_prev = v.e_bess;
                if cfg.cyclic_soc && t + 1 == hours {
                    b.row(
                        format!("cyclic_{tag}"),
                        &[(v.e_bess, 1.0), (e_init, -1.0)],
                        Eq,
                        0.0,
                    )?;
                }

                // Grid.
                b.row(
                    format!("imp_on_{tag}"),
                    &[(v.p_imp, 1.0), (v.u_imp, -tie)],
                    Le,
                    0.0,
                )?;
                b.row(
                    format!("exp_on_{tag}"),
                    &[(v.p_exp, 1.0), (v.u_exp, -tie)],
                    Le,
                    0.0,
                )?;
                b.row(
                    format!("grid_excl_{tag}"),
                    &[(v.u_imp, 1.0), (v.u_exp, 1.0)],
                    Le,
                    1.0,
                )?;

                // Operating costs, scaled to the year.
                b.cost(v.p_cder, alpha * coeffs.cder_op)?;
                b.cost(v.u_cder, alpha * coeffs.cder_no_load)?;
                b.cost(v.p_dchg, alpha * coeffs.bess_deg_per_mwh)?;
                b.cost(v.p_ls, alpha * coeffs.ls_penalty)?;
                b.cost(v.p_imp, alpha * price)?;
                b.cost(v.p_exp, -alpha * coeffs.export_factor * price)?;

                steps.push(v);
                data.push(StepData {
                    year,
                    day: d as u32,
                    hour: t as u32,
                    load,
                    pv_cf: cf,
                    eta_pv,
                    price,
                });
            }
        }
    }

    // Capital and PV decline.
    match (s_pv, s_bess, p_cder_max) {
        (Size::Var(sp), Size::Var(sb), Size::Var(pm)) => {
            b.cost(pm, coeffs.cder_capital)?;
            b.cost(
                sp,
                coeffs.pv_capital + coeffs.pv_deg_per_mw_year * years as f64,
            )?;
            b.cost(sb, coeffs.bess_capital)?;
        }
        (Size::Fixed(sp), _, _) => {
            b.p.add_objective_constant(coeffs.pv_deg_per_mw_year * sp * years as f64);
        }
        _ => unreachable!("sizes are all variables or all fixed"),
    }

    let p = b.p;
    let index = ModelIndex {
        steps,
        data,
        s_pv,
        s_bess,
        p_cder_max,
        e_init,
        alpha,
        ms: opts.ms,
        years,
        days,
        hours,
        big_m,
        eta_bess,
        capacity: if is_fixed { capacity } else { f64::NAN },
        coeffs,
    };
    Ok((p, index))
}
