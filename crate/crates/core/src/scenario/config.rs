use serde::{Deserialize, Serialize};

use crate::degradation::{
    fit_efficiency_model, AgingModel, CycleLifeCurve, EfficiencyModel, DEFAULT_BIN_WIDTH,
};

use super::ScenarioError;

pub const DAYS_PER_YEAR: u32 = 365;

fn invalid(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

fn check(ok: bool, field: &str, message: &str) -> Result<(), ScenarioError> {
    if ok {
        Ok(())
    } else {
        Err(invalid(field, message))
    }
}

fn check_optional_cap(cap: Option<f64>, field: &str) -> Result<(), ScenarioError> {
    match cap {
        Some(c) => check(c.is_finite() && c >= 0.0, field, "must be finite and >= 0"),
        None => Ok(()),
    }
}

/// Horizon and system-wide settings (the `horizon` section).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "defaults::planning_years")]
    pub planning_years: u32,
    #[serde(default = "defaults::rep_days")]
    pub rep_days: u32,
    #[serde(default = "defaults::hours_per_day")]
    pub hours_per_day: u32,
    /// Must equal 365 / rep_days when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "defaults::load_growth")]
    pub load_growth: f64,
    /// Load-shedding penalty, $/MWh.
    #[serde(default = "defaults::ls_penalty")]
    pub ls_penalty: f64,
    /// Grid tie-line limit in MW; 0 means islanded.
    #[serde(default)]
    pub tie_limit: f64,
    /// Linearization constant in MW; derived from the data when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    #[serde(default = "defaults::yes")]
    pub cyclic_soc: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            planning_years: defaults::planning_years(),
            rep_days: defaults::rep_days(),
            hours_per_day: defaults::hours_per_day(),
            alpha: None,
            load_growth: defaults::load_growth(),
            ls_penalty: defaults::ls_penalty(),
            tie_limit: 0.0,
            big_m: None,
            cyclic_soc: true,
        }
    }
}

impl ScenarioConfig {
    /// Times each representative day repeats per year.
    pub fn alpha(&self) -> f64 {
        DAYS_PER_YEAR as f64 / self.rep_days as f64
    }

    pub fn steps_per_year(&self) -> usize {
        (self.rep_days * self.hours_per_day) as usize
    }

    pub fn is_islanded(&self) -> bool {
        self.tie_limit == 0.0
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        check(
            self.planning_years >= 1,
            "horizon.planning_years",
            "must be >= 1",
        )?;
        check(
            (1..=DAYS_PER_YEAR).contains(&self.rep_days),
            "horizon.rep_days",
            "must be in 1..=365",
        )?;
        check(
            (1..=24).contains(&self.hours_per_day),
            "horizon.hours_per_day",
            "must be in 1..=24",
        )?;
        if let Some(a) = self.alpha {
            let expected = self.alpha();
            if (a - expected).abs() > 1e-9 * expected {
                return Err(invalid(
                    "horizon.alpha",
                    format!("must equal 365 / rep_days = {expected}"),
                ));
            }
        }
        check(
            self.load_growth.is_finite() && self.load_growth > -1.0,
            "horizon.load_growth",
            "must be > -1",
        )?;
        check(
            self.ls_penalty.is_finite() && self.ls_penalty >= 0.0,
            "horizon.ls_penalty",
            "must be >= 0",
        )?;
        check(
            self.tie_limit.is_finite() && self.tie_limit >= 0.0,
            "horizon.tie_limit",
            "must be >= 0",
        )?;
        if let Some(m) = self.big_m {
            check(m.is_finite() && m > 0.0, "horizon.big_m", "must be > 0")?;
        }
        Ok(())
    }
}

/// Controllable generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CderParams {
    /// $/MW
    #[serde(default = "defaults::cder_capital")]
    pub capital: f64,
    /// $/MWh
    #[serde(default = "defaults::cder_op_cost")]
    pub op_cost: f64,
    /// $/h while committed
    #[serde(default)]
    pub no_load: f64,
    /// MW
    #[serde(default)]
    pub p_min: f64,
    /// Site limit on installed MW.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_size: Option<f64>,
}

impl Default for CderParams {
    fn default() -> Self {
        Self {
            capital: defaults::cder_capital(),
            op_cost: defaults::cder_op_cost(),
            no_load: 0.0,
            p_min: 0.0,
            max_size: None,
        }
    }
}

impl CderParams {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        for (v, f) in [
            (self.capital, "cder.capital"),
            (self.op_cost, "cder.op_cost"),
            (self.no_load, "cder.no_load"),
            (self.p_min, "cder.p_min"),
        ] {
            check(v.is_finite() && v >= 0.0, f, "must be finite and >= 0")?;
        }
        check_optional_cap(self.max_size, "cder.max_size")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvParams {
    /// $/MW
    #[serde(default = "defaults::pv_capital")]
    pub capital: f64,
    /// Replacement cost as a fraction of capital.
    #[serde(default = "defaults::pv_rep_frac")]
    pub rep_frac: f64,
    /// Annual efficiency loss.
    #[serde(default = "defaults::pv_deg_rate")]
    pub deg_rate: f64,
    #[serde(default = "defaults::one")]
    pub eta_init: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_size: Option<f64>,
}

impl Default for PvParams {
    fn default() -> Self {
        Self {
            capital: defaults::pv_capital(),
            rep_frac: defaults::pv_rep_frac(),
            deg_rate: defaults::pv_deg_rate(),
            eta_init: 1.0,
            max_size: None,
        }
    }
}

impl PvParams {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        check(
            self.capital.is_finite() && self.capital >= 0.0,
            "pv.capital",
            "must be finite and >= 0",
        )?;
        check(
            (0.0..=1.0).contains(&self.rep_frac),
            "pv.rep_frac",
            "must be in [0, 1]",
        )?;
        check(
            (0.0..1.0).contains(&self.deg_rate),
            "pv.deg_rate",
            "must be in [0, 1)",
        )?;
        check(
            self.eta_init > 0.0 && self.eta_init <= 1.0,
            "pv.eta_init",
            "must be in (0, 1]",
        )?;
        check_optional_cap(self.max_size, "pv.max_size")
    }

    /// Yearly cost of efficiency decline per MW installed.
    pub fn degradation_cost_per_mw(&self) -> f64 {
        crate::degradation::pv_degradation_cost(1.0, self.capital, self.rep_frac, self.deg_rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BessParams {
    /// $/MWh
    #[serde(default = "defaults::bess_capital")]
    pub capital: f64,
    #[serde(default = "defaults::bess_rep_frac")]
    pub rep_frac: f64,
    /// Round-trip efficiency at the initial SOH.
    #[serde(default = "defaults::bess_eta_rt")]
    pub eta_rt: f64,
    /// Hours to charge fully.
    #[serde(default = "defaults::one")]
    pub t_chg: f64,
    /// Hours to discharge fully.
    #[serde(default = "defaults::one")]
    pub t_dchg: f64,
    #[serde(default = "defaults::soc_min")]
    pub soc_min: f64,
    #[serde(default = "defaults::soc_max")]
    pub soc_max: f64,
    #[serde(default = "defaults::one")]
    pub soh_init: f64,
    /// Capacity fraction at end of life.
    #[serde(default = "defaults::eol_frac")]
    pub eol_frac: f64,
    #[serde(default = "CycleLifeCurve::lfp_default")]
    pub cycle_life_curve: CycleLifeCurve,
    /// `(soh, round-trip efficiency)` samples for the efficiency regression.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eff_model_points: Option<Vec<(f64, f64)>>,
    /// Reference cycle life used to price discharge throughput.
    #[serde(default = "defaults::deg_cost_cycle_life")]
    pub deg_cost_cycle_life: f64,
    /// DOD bin width for cycle counting.
    #[serde(default = "defaults::bin_width")]
    pub bin_width: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_size: Option<f64>,
}

impl Default for BessParams {
    fn default() -> Self {
        Self {
            capital: defaults::bess_capital(),
            rep_frac: defaults::bess_rep_frac(),
            eta_rt: defaults::bess_eta_rt(),
            t_chg: 1.0,
            t_dchg: 1.0,
            soc_min: defaults::soc_min(),
            soc_max: defaults::soc_max(),
            soh_init: 1.0,
            eol_frac: defaults::eol_frac(),
            cycle_life_curve: CycleLifeCurve::lfp_default(),
            eff_model_points: None,
            deg_cost_cycle_life: defaults::deg_cost_cycle_life(),
            bin_width: defaults::bin_width(),
            max_size: None,
        }
    }
}

impl BessParams {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        check(
            self.capital.is_finite() && self.capital >= 0.0,
            "bess.capital",
            "must be finite and >= 0",
        )?;
        check(
            (0.0..=1.0).contains(&self.rep_frac),
            "bess.rep_frac",
            "must be in [0, 1]",
        )?;
        check(
            self.eta_rt > 0.0 && self.eta_rt <= 1.0,
            "bess.eta_rt",
            "must be in (0, 1]",
        )?;
        check(
            self.t_chg > 0.0 && self.t_chg.is_finite(),
            "bess.t_chg",
            "must be > 0",
        )?;
        check(
            self.t_dchg > 0.0 && self.t_dchg.is_finite(),
            "bess.t_dchg",
            "must be > 0",
        )?;
        check(
            (0.0..=1.0).contains(&self.soc_min),
            "bess.soc_min",
            "must be in [0, 1]",
        )?;
        check(
            self.soc_max > self.soc_min && self.soc_max <= 1.0,
            "bess.soc_max",
            "must exceed soc_min and be <= 1",
        )?;
        check(
            self.eol_frac > 0.0 && self.eol_frac < 1.0,
            "bess.eol_frac",
            "must be in (0, 1)",
        )?;
        check(
            self.soh_init > self.eol_frac && self.soh_init <= 1.0,
            "bess.soh_init",
            "must be in (eol_frac, 1]",
        )?;
        check(
            self.soc_min < self.soh_init * self.soc_max,
            "bess.soc_min",
            "must lie below soh_init * soc_max",
        )?;
        check(
            self.deg_cost_cycle_life > 0.0 && self.deg_cost_cycle_life.is_finite(),
            "bess.deg_cost_cycle_life",
            "must be > 0",
        )?;
        check(
            self.bin_width > 0.0 && self.bin_width <= 1.0,
            "bess.bin_width",
            "must be in (0, 1]",
        )?;
        check_optional_cap(self.max_size, "bess.max_size")?;
        self.efficiency_model().map(|_| ())
    }

    /// Discharge-throughput cost, $/MWh.
    pub fn degradation_cost_per_mwh(&self) -> f64 {
        self.capital * self.rep_frac / self.deg_cost_cycle_life
    }

    /// Points fed to the efficiency regression: the configured ones, or
    /// `(soh_init, eta_rt)` and a point 0.04 lower at SOH 0.8.
    pub fn efficiency_points(&self) -> Vec<(f64, f64)> {
        match &self.eff_model_points {
            Some(p) => p.clone(),
            None => {
                let low = if self.soh_init > 0.8 {
                    0.8
                } else {
                    self.soh_init - 0.2
                };
                vec![(self.soh_init, self.eta_rt), (low, self.eta_rt - 0.04)]
            }
        }
    }

    pub fn efficiency_model(&self) -> Result<EfficiencyModel, ScenarioError> {
        fit_efficiency_model(&self.efficiency_points())
            .map_err(|e| invalid("bess.eff_model_points", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TariffMode {
    Fixed,
    Tou,
    Wholesale,
}

/// The `tariff` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TariffConfig {
    #[serde(default = "defaults::tariff_mode")]
    pub mode: TariffMode,
    /// $/MWh, used in fixed mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_price: Option<f64>,
    /// CSV `hour,price_usd_per_mwh`, used in tou and wholesale modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub price_file: Option<String>,
    #[serde(default = "defaults::export_factor")]
    pub export_factor: f64,
}

/// The `profiles` section: CSV paths relative to the scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFiles {
    pub load: String,
    pub pv_cf: String,
}

/// The `solver` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub mip_gap: f64,
    #[serde(default = "defaults::time_limit_s")]
    pub time_limit_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mip_gap: 0.0,
            time_limit_s: defaults::time_limit_s(),
            threads: None,
        }
    }
}

impl SolverConfig {
    pub fn to_options(&self) -> dbio_milp::SolveOptions {
        dbio_milp::SolveOptions {
            mip_gap: self.mip_gap,
            time_limit: std::time::Duration::from_secs_f64(self.time_limit_s),
            threads: self.threads,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        check(
            self.mip_gap.is_finite() && self.mip_gap >= 0.0,
            "solver.mip_gap",
            "must be >= 0",
        )?;
        check(
            self.time_limit_s.is_finite() && self.time_limit_s > 0.0,
            "solver.time_limit_s",
            "must be > 0",
        )
    }
}

/// On-disk scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub horizon: ScenarioConfig,
    #[serde(default)]
    pub cder: CderParams,
    #[serde(default)]
    pub pv: PvParams,
    #[serde(default)]
    pub bess: BessParams,
    #[serde(default = "defaults::tariff")]
    pub tariff: TariffConfig,
    pub profiles: ProfileFiles,
    #[serde(default)]
    pub solver: SolverConfig,
}

/// Builds the aging model implied by the BESS and PV parameters.
pub fn aging_model(bess: &BessParams, pv: &PvParams) -> Result<AgingModel, ScenarioError> {
    Ok(AgingModel {
        curve: bess.cycle_life_curve.clone(),
        bin_width: bess.bin_width,
        eol_frac: bess.eol_frac,
        soh_init: bess.soh_init,
        efficiency: bess.efficiency_model()?,
        eta_pv_init: pv.eta_init,
        pv_annual_deg: pv.deg_rate,
    })
}

pub(crate) mod defaults {
    use super::{TariffConfig, TariffMode};

    pub fn planning_years() -> u32 {
        25
    }
    pub fn rep_days() -> u32 {
        365
    }
    pub fn hours_per_day() -> u32 {
        24
    }
    pub fn load_growth() -> f64 {
        0.005
    }
    pub fn ls_penalty() -> f64 {
        1e6
    }
    pub fn yes() -> bool {
        true
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn cder_capital() -> f64 {
        1_150_000.0
    }
    pub fn cder_op_cost() -> f64 {
        44.75
    }
    pub fn pv_capital() -> f64 {
        1_450_000.0
    }
    pub fn pv_rep_frac() -> f64 {
        0.41
    }
    pub fn pv_deg_rate() -> f64 {
        0.005
    }
    pub fn bess_capital() -> f64 {
        469_000.0
    }
    pub fn bess_rep_frac() -> f64 {
        0.79
    }
    pub fn bess_eta_rt() -> f64 {
        0.90
    }
    pub fn soc_min() -> f64 {
        0.1
    }
    pub fn soc_max() -> f64 {
        0.9
    }
    pub fn eol_frac() -> f64 {
        0.8
    }
    pub fn deg_cost_cycle_life() -> f64 {
        3600.0
    }
    pub fn bin_width() -> f64 {
        super::DEFAULT_BIN_WIDTH
    }
    pub fn export_factor() -> f64 {
        0.8
    }
    pub fn time_limit_s() -> f64 {
        3600.0
    }
    pub fn tariff_mode() -> TariffMode {
        TariffMode::Fixed
    }
    pub fn tariff() -> TariffConfig {
        TariffConfig {
            mode: TariffMode::Fixed,
            fixed_price: None,
            price_file: None,
            export_factor: export_factor(),
        }
    }
}
