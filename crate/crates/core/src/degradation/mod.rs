//! Post-dispatch aging: cycle counting on the SOC trace, cycle-life
//! weighting, capacity fade, and the PV efficiency trajectory.

mod curve;
mod rainflow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use curve::{
    degradation_factor, degradation_per_cycle, equivalent_full_cycles, CycleLifeCurve,
    DodHistogram, DEFAULT_BIN_WIDTH,
};
pub use rainflow::{rainflow, reversals, Cycle};

/// Ranges below this are solver noise, not cycling.
pub const MIN_CYCLE_RANGE: f64 = 1e-6;

/// Lower clamp for predicted round-trip efficiency.
pub const MIN_EFFICIENCY: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegradationError {
    #[error("invalid cycle-life curve: {0}")]
    InvalidCurve(String),
    #[error("cycle counting needs a non-empty SOC series")]
    EmptySeries,
    #[error("efficiency fit needs at least two distinct SOH values")]
    DegenerateFit,
    #[error("invalid aging parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "battery exhausted in year {year}: capacity would fall to {capacity:.6} MWh \
         after losing {deg:.6} MWh"
    )]
    BatteryExhausted { year: u32, capacity: f64, deg: f64 },
}

/// PV conversion efficiency in year `y` (1-based).
pub fn pv_efficiency(y: u32, eta_init: f64, annual_deg: f64) -> f64 {
    assert!(y >= 1, "years are 1-based");
    eta_init * (1.0 - annual_deg).powi(y as i32 - 1)
}

/// Yearly cost charged for PV output decline, in $.
pub fn pv_degradation_cost(s_pv: f64, capital: f64, replacement_frac: f64, annual_deg: f64) -> f64 {
    replacement_frac * capital * s_pv * annual_deg
}

/// Rainflow-counts a SOC trace (fractions of rated capacity) into a DOD
/// histogram. Cycles narrower than [`MIN_CYCLE_RANGE`] are dropped.
pub fn count_cycles(soc: &[f64], bin_width: f64) -> Result<DodHistogram, DegradationError> {
    if soc.is_empty() {
        return Err(DegradationError::EmptySeries);
    }
    let mut hist = DodHistogram::new(bin_width);
    for c in rainflow(soc) {
        if c.range >= MIN_CYCLE_RANGE {
            hist.add(c.range, c.count);
        }
    }
    Ok(hist)
}

/// Linear round-trip efficiency as a function of SOH.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyModel {
    pub w: f64,
    pub b: f64,
}

impl EfficiencyModel {
    pub fn constant(eta: f64) -> Self {
        Self { w: 0.0, b: eta }
    }

    pub fn predict(&self, soh: f64) -> f64 {
        (self.w * soh + self.b).clamp(MIN_EFFICIENCY, 1.0)
    }
}

/// Ordinary least squares through `(soh, efficiency)` points.
pub fn fit_efficiency_model(points: &[(f64, f64)]) -> Result<EfficiencyModel, DegradationError> {
    if points.len() < 2 {
        return Err(DegradationError::DegenerateFit);
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 1e-12 * n.max(1.0) * mx.abs().max(1.0).powi(2) {
        return Err(DegradationError::DegenerateFit);
    }
    let w = sxy / sxx;
    Ok(EfficiencyModel { w, b: my - w * mx })
}

/// Battery and PV condition entering a planning year.
///
/// `efc` and `deg` describe the usage of the year that led into this state
/// (zero for year 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradationState {
    pub year: u32,
    pub capacity: f64,
    pub soh: f64,
    pub eta_bess: f64,
    pub eta_pv: f64,
    pub efc: f64,
    pub deg: f64,
}

/// Everything needed to turn a year's cycling into next year's state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgingModel {
    pub curve: CycleLifeCurve,
    pub bin_width: f64,
    pub eol_frac: f64,
    pub soh_init: f64,
    pub efficiency: EfficiencyModel,
    pub eta_pv_init: f64,
    pub pv_annual_deg: f64,
}

impl AgingModel {
    /// Same efficiencies and curve, but no capacity fade, a flat
    /// efficiency and no PV decline.
    pub fn without_degradation(&self) -> Self {
        Self {
            eol_frac: 1.0,
            efficiency: EfficiencyModel::constant(self.efficiency.predict(self.soh_init)),
            pv_annual_deg: 0.0,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), DegradationError> {
        let bad = |msg: String| Err(DegradationError::InvalidParameter(msg));
        if !(self.bin_width > 0.0 && self.bin_width <= 1.0) {
            return bad(format!("bin width {} outside (0, 1]", self.bin_width));
        }
        if !(self.eol_frac > 0.0 && self.eol_frac <= 1.0) {
            return bad(format!(
                "end-of-life fraction {} outside (0, 1]",
                self.eol_frac
            ));
        }
        if !(self.soh_init > 0.0 && self.soh_init <= 1.0) {
            return bad(format!("initial SOH {} outside (0, 1]", self.soh_init));
        }
        if !(self.eta_pv_init > 0.0 && self.eta_pv_init <= 1.0) {
            return bad(format!(
                "initial PV efficiency {} outside (0, 1]",
                self.eta_pv_init
            ));
        }
        if !(0.0..1.0).contains(&self.pv_annual_deg) {
            return bad(format!(
                "PV degradation rate {} outside [0, 1)",
                self.pv_annual_deg
            ));
        }
        Ok(())
    }

    pub fn initial_state(&self, rated: f64) -> DegradationState {
        DegradationState {
            year: 1,
            capacity: rated,
            soh: self.soh_init,
            eta_bess: self.efficiency.predict(self.soh_init),
            eta_pv: self.eta_pv_init,
            efc: 0.0,
            deg: 0.0,
        }
    }

    pub fn dpc(&self, rated: f64) -> f64 {
        degradation_per_cycle(rated, self.eol_frac, self.curve.cl_at_max())
    }

    pub fn advance(
        &self,
        prev: &DegradationState,
        hist: &DodHistogram,
        alpha: f64,
        rated: f64,
    ) -> Result<DegradationState, DegradationError> {
        advance_state(prev, hist, alpha, rated, self)
    }
}

/// Applies one year of cycling to `prev`.
///
/// Capacity falls by `EFC · DPC`; SOH is capacity over rated scaled by the
/// initial SOH; efficiency follows the SOH regression; PV efficiency decays
/// by one year.
pub fn advance_state(
    prev: &DegradationState,
    hist: &DodHistogram,
    alpha: f64,
    rated: f64,
    model: &AgingModel,
) -> Result<DegradationState, DegradationError> {
    let efc = equivalent_full_cycles(hist, &model.curve, alpha);
    let deg = efc * model.dpc(rated);
    let capacity = prev.capacity - deg;
    if deg > 0.0 && capacity <= 0.0 {
        return Err(DegradationError::BatteryExhausted {
            year: prev.year,
            capacity,
            deg,
        });
    }
    let soh = if rated > 0.0 {
        capacity / rated * model.soh_init
    } else {
        prev.soh
    };
    let eta_bess = if deg > 0.0 {
        model.efficiency.predict(soh)
    } else {
        prev.eta_bess
    };
    Ok(DegradationState {
        year: prev.year + 1,
        capacity,
        soh,
        eta_bess,
        eta_pv: prev.eta_pv * (1.0 - model.pv_annual_deg),
        efc,
        deg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model() -> AgingModel {
        AgingModel {
            curve: CycleLifeCurve::lfp_default(),
            bin_width: DEFAULT_BIN_WIDTH,
            eol_frac: 0.8,
            soh_init: 1.0,
            efficiency: fit_efficiency_model(&[(1.0, 0.9), (0.8, 0.86)]).unwrap(),
            eta_pv_init: 1.0,
            pv_annual_deg: 0.005,
        }
    }

    #[test]
    fn pv_trajectory() {
        assert_eq!(pv_efficiency(1, 0.97, 0.01), 0.97);
        assert_relative_eq!(pv_efficiency(3, 1.0, 0.01), 0.9801);
        assert_eq!(pv_efficiency(10, 0.9, 0.0), 0.9);
    }

    #[test]
    fn pv_cost() {
        assert_eq!(pv_degradation_cost(0.0, 1_450_000.0, 0.41, 0.005), 0.0);
        let one = pv_degradation_cost(0.153, 1_450_000.0, 0.41, 0.005);
        assert_relative_eq!(one, 454.7925, max_relative = 1e-12);
        assert!((one * 25.0 - 11_383.0).abs() / 11_383.0 < 0.002);
        assert_relative_eq!(
            pv_degradation_cost(0.306, 1_450_000.0, 0.41, 0.005),
            2.0 * one,
            max_relative = 1e-12
        );
    }

    #[test]
    fn count_constant_and_alternating() {
        assert!(count_cycles(&[0.4; 10], 0.05).unwrap().is_empty());
        let h = count_cycles(&[1.0, 0.5, 1.0, 0.5, 1.0], 0.05).unwrap();
        assert_eq!(h.count_at(0.5), 2.0);
        assert_eq!(h.total(), 2.0);
        assert_eq!(count_cycles(&[], 0.05), Err(DegradationError::EmptySeries));
    }

    #[test]
    fn fit_two_points_exactly() {
        let m = fit_efficiency_model(&[(1.0, 0.90), (0.8, 0.86)]).unwrap();
        assert_relative_eq!(m.w, 0.2, max_relative = 1e-12);
        assert_relative_eq!(m.b, 0.7, max_relative = 1e-12);
        let dup =
            fit_efficiency_model(&[(1.0, 0.90), (0.8, 0.86), (1.0, 0.90), (0.8, 0.86)]).unwrap();
        assert_relative_eq!(dup.w, m.w, max_relative = 1e-12);
        assert_relative_eq!(dup.b, m.b, max_relative = 1e-12);
    }

    #[test]
    fn fit_recovers_a_known_line() {
        let pts: Vec<_> = (0..20)
            .map(|i| {
                let soh = 0.6 + 0.02 * i as f64;
                (soh, 0.35 * soh + 0.55)
            })
            .collect();
        let m = fit_efficiency_model(&pts).unwrap();
        assert!((m.w - 0.35).abs() < 1e-9);
        assert!((m.b - 0.55).abs() < 1e-9);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        assert_eq!(
            fit_efficiency_model(&[(0.9, 0.9), (0.9, 0.8)]),
            Err(DegradationError::DegenerateFit)
        );
        assert_eq!(
            fit_efficiency_model(&[(0.9, 0.9)]),
            Err(DegradationError::DegenerateFit)
        );
    }

    #[test]
    fn prediction_is_clamped() {
        let m = EfficiencyModel { w: 2.0, b: 0.5 };
        assert_eq!(m.predict(1.0), 1.0);
        assert_eq!(m.predict(-1.0), MIN_EFFICIENCY);
    }

    #[test]
    fn empty_year_only_ages_pv() {
        let m = model();
        let s0 = m.initial_state(1.0);
        let s1 = m.advance(&s0, &DodHistogram::new(0.05), 52.0, 1.0).unwrap();
        assert_eq!(s1.capacity, s0.capacity);
        assert_eq!(s1.soh, s0.soh);
        assert_eq!(s1.eta_bess, s0.eta_bess);
        assert_relative_eq!(s1.eta_pv, 0.995);
        assert_eq!(s1.year, 2);
    }

    #[test]
    fn one_full_cycle() {
        let m = model();
        let mut h = DodHistogram::new(0.05);
        h.add(1.0, 1.0);
        let s1 = m.advance(&m.initial_state(1.0), &h, 1.0, 1.0).unwrap();
        assert_relative_eq!(s1.deg, 1e-4, max_relative = 1e-12);
        assert_relative_eq!(s1.capacity, 1.0 - 1e-4, max_relative = 1e-12);
    }

    #[test]
    fn rated_cycle_life_reaches_end_of_life() {
        let m = model();
        let mut h = DodHistogram::new(0.05);
        h.add(1.0, 2000.0);
        let s1 = m.advance(&m.initial_state(1.0), &h, 1.0, 1.0).unwrap();
        assert_relative_eq!(s1.capacity, 0.8, max_relative = 1e-12);
        assert_relative_eq!(s1.soh, 0.8, max_relative = 1e-12);
        assert_relative_eq!(s1.eta_bess, 0.86, max_relative = 1e-12);
    }

    #[test]
    fn exhaustion_is_an_error() {
        let m = model();
        let mut h = DodHistogram::new(0.05);
        h.add(1.0, 20_000.0);
        let err = m.advance(&m.initial_state(1.0), &h, 1.0, 1.0).unwrap_err();
        assert!(matches!(
            err,
            DegradationError::BatteryExhausted { year: 1, .. }
        ));
    }

    #[test]
    fn disabled_model_is_identity() {
        let m = model().without_degradation();
        let mut h = DodHistogram::new(0.05);
        h.add(0.8, 300.0);
        let s0 = m.initial_state(2.0);
        let s1 = m.advance(&s0, &h, 52.0, 2.0).unwrap();
        assert_eq!(s1.capacity, s0.capacity);
        assert_eq!(s1.eta_bess, s0.eta_bess);
        assert_eq!(s1.eta_pv, s0.eta_pv);
        assert_relative_eq!(s0.eta_bess, 0.9, max_relative = 1e-12);
    }
}
