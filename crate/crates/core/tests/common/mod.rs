#![allow(dead_code)]

use std::sync::Arc;

use dbio_core::model::DispatchSolution;
use dbio_core::scenario::{
    BessParams, CderParams, PvParams, Scenario, ScenarioConfig, SolverConfig, TariffSchedule,
};
use dbio_core::PlanningContext;
use dbio_milp::HighsBackend;

/// Islanded scenario over `days × hours` steps with default technology data.
pub fn scenario(years: u32, days: u32, hours: u32, load: Vec<f64>, cf: Vec<f64>) -> Scenario {
    let steps = (days * hours) as usize;
    assert_eq!(load.len(), steps);
    assert_eq!(cf.len(), steps);
    Scenario {
        config: ScenarioConfig {
            planning_years: years,
            rep_days: days,
            hours_per_day: hours,
            load_growth: 0.0,
            ..ScenarioConfig::default()
        },
        cder: CderParams::default(),
        pv: PvParams::default(),
        bess: BessParams::default(),
        tariff: TariffSchedule::fixed(0.0, steps, 0.8),
        base_load: load,
        base_pv_cf: cf,
        solver: SolverConfig::default(),
    }
}

pub const PEAK_EXCESS: f64 = 0.4;

/// Islanded, no PV resource, a free generator capped at 1 MW and a flat
/// 0.5 MW load except a first-hour peak of 1.4 MW: only storage can serve
/// the excess.
pub fn peak_fixture(years: u32) -> Scenario {
    let mut load = vec![0.5; 24];
    load[0] = 1.0 + PEAK_EXCESS;
    let mut s = scenario(years, 1, 24, load, vec![0.0; 24]);
    s.cder.capital = 0.0;
    s.cder.max_size = Some(1.0);
    s
}

pub fn ctx(s: Scenario) -> PlanningContext {
    PlanningContext::new(s, Arc::new(HighsBackend)).expect("valid scenario")
}

/// Bell-shaped daylight capacity factor over `hours` steps per day.
pub fn daylight(days: u32, hours: u32, peak: f64) -> Vec<f64> {
    (0..days * hours)
        .map(|i| {
            let h = (i % hours) as f64 + 0.5;
            let x = (h / hours as f64 - 0.25) * 2.0;
            if (0.0..=1.0).contains(&x) {
                peak * (std::f64::consts::PI * x).sin()
            } else {
                0.0
            }
        })
        .collect()
}

/// Checks the feasibility invariants every solved dispatch must satisfy and
/// returns the worst balance residual.
pub fn check_dispatch(
    d: &DispatchSolution,
    soc_min: f64,
    soc_top: f64,
    capacity: f64,
    tie_limit: f64,
) -> f64 {
    let peak = d.steps.iter().map(|s| s.load).fold(0.0, f64::max);
    let tol = 1e-6 * peak.max(1.0);
    let mut worst: f64 = 0.0;
    for s in &d.steps {
        let r = s.balance_residual().abs();
        worst = worst.max(r);
        assert!(r <= tol, "balance residual {r} at {s:?}");
        assert!(
            !(s.u_chg && s.u_dchg),
            "charge and discharge together at {s:?}"
        );
        assert!(!(s.u_imp && s.u_exp), "import and export together at {s:?}");
        assert!(
            s.p_chg <= 1e-6 || s.p_dchg <= 1e-6,
            "simultaneous flows at {s:?}"
        );
        assert!(
            s.p_imp <= 1e-6 || s.p_exp <= 1e-6,
            "simultaneous grid flows at {s:?}"
        );
        assert!(
            s.e_bess >= soc_min * capacity - 1e-6,
            "SOC below window at {s:?}"
        );
        assert!(
            s.e_bess <= soc_top * capacity + 1e-6,
            "SOC above window at {s:?}"
        );
        assert!(s.p_imp <= tie_limit + 1e-6 && s.p_exp <= tie_limit + 1e-6);
        for v in [
            s.p_cder, s.p_chg, s.p_dchg, s.p_ls, s.p_imp, s.p_exp, s.p_curt,
        ] {
            assert!(v >= -1e-9, "negative power at {s:?}");
        }
    }
    worst
}
