mod common;

use common::{ctx, peak_fixture};
use dbio_core::degradation::CycleLifeCurve;
use dbio_core::model::InvestmentDecision;
use dbio_core::sizing::{size_storage, SearchConfig, SearchMethod};
use dbio_core::validation::validate;

fn with_storage(s_bess: f64) -> InvestmentDecision {
    InvestmentDecision {
        s_pv: 0.0,
        s_bess,
        p_cder_max: 1.0,
    }
}

fn cfg(method: SearchMethod, step_frac: f64) -> SearchConfig {
    SearchConfig {
        method,
        tolerance: 0.005,
        step_frac,
        ..SearchConfig::default()
    }
}

#[test]
fn without_degradation_every_year_repeats() {
    let c = ctx(peak_fixture(3)).without_degradation();
    let r = validate(&c, with_storage(1.0)).unwrap();
    assert_eq!(r.per_year.len(), 3);
    assert_eq!(r.total_eue, 0.0);
    let first = r.per_year[0].operating_cost;
    for y in &r.per_year {
        let out = y.state_out.unwrap();
        assert_eq!(out.capacity, 1.0);
        assert_eq!(out.eta_bess, y.state_in.eta_bess);
        assert!((y.operating_cost - first).abs() <= 1e-6 * first.abs().max(1.0));
    }
}

#[test]
fn more_storage_never_sheds_more() {
    let c = ctx(peak_fixture(3));
    let mut last = f64::INFINITY;
    for s in [0.0, 0.2, 0.4, 0.6, 0.8] {
        let eue = validate(&c, with_storage(s)).unwrap().total_eue;
        assert!(eue <= last + 1e-6, "{s}: {eue} after {last}");
        last = eue;
    }
}

#[test]
fn oversized_storage_is_shed_free() {
    let r = validate(&ctx(peak_fixture(3)), with_storage(3.0)).unwrap();
    assert!(r.shed_free());
    assert!(r.total_eue <= r.eue_tolerance);
}

#[test]
fn a_short_lived_battery_stops_the_run() {
    let mut s = peak_fixture(3);
    s.bess.cycle_life_curve = CycleLifeCurve::new(vec![(0.5, 3.0), (1.0, 2.0)]).unwrap();
    let r = validate(&ctx(s), with_storage(1.0)).unwrap();
    assert_eq!(r.exhausted_in_year, Some(1));
    assert_eq!(r.per_year.len(), 1);
    assert!(r.per_year[0].state_out.is_none());
    assert!(!r.shed_free());
}

#[test]
fn soc_trace_has_a_start_level_per_day() {
    let r = validate(&ctx(peak_fixture(2)), with_storage(1.0)).unwrap();
    for y in &r.per_year {
        let trace = y.dispatch.soc_trace(y.year, 1.0);
        assert_eq!(trace.len(), 25);
        assert!(trace.iter().all(|x| (-1e-9..=1.0 + 1e-9).contains(x)));
    }
}

#[test]
fn sizing_is_deterministic() {
    let c = ctx(peak_fixture(3));
    let a = size_storage(&c, 0.3, &cfg(SearchMethod::Binary, 0.01), &mut |_| {}).unwrap();
    let b = size_storage(&c, 0.3, &cfg(SearchMethod::Binary, 0.01), &mut |_| {}).unwrap();
    assert_eq!(a.result, b.result);
    assert!(a.result.converged);
    assert!(a.validation.unwrap().shed_free());
}

#[test]
fn fixed_step_overshoots_by_at_most_one_step() {
    let c = ctx(peak_fixture(3));
    let bin = size_storage(&c, 0.3, &cfg(SearchMethod::Binary, 0.1), &mut |_| {}).unwrap();
    let step = size_storage(&c, 0.3, &cfg(SearchMethod::FixedStep, 0.1), &mut |_| {}).unwrap();
    assert!(bin.result.converged && step.result.converged);
    // The bisection answer sits within its tolerance above the threshold.
    let threshold_lo = bin.result.final_size - 0.005;
    assert!(step.result.final_size >= threshold_lo);
    assert!(step.result.final_size <= 1.1 * bin.result.final_size + 1e-9);
}

#[test]
fn a_shed_free_start_is_kept() {
    let c = ctx(peak_fixture(3));
    let mut seen = 0;
    let out = size_storage(&c, 2.0, &cfg(SearchMethod::FixedStep, 0.01), &mut |_| {
        seen += 1
    })
    .unwrap();
    assert_eq!(seen, 1);
    assert_eq!(out.result.iterations.len(), 1);
    assert_eq!(out.result.final_size, 2.0);
    assert!(out.result.converged);
}
