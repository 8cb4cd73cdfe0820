mod common;

use dbio_core::model::{
    build_integrated, build_single_year, InvestmentDecision, SizePins, YearOverrides,
};
use dbio_core::scenario::{TariffMode, TariffSchedule};

fn evening_load(hours: u32) -> Vec<f64> {
    (0..hours)
        .map(|h| if (17..21).contains(&h) { 0.8 } else { 0.3 })
        .collect()
}

#[test]
fn variable_count_matches_catalog() {
    let s = common::scenario(1, 1, 24, evening_load(24), common::daylight(1, 24, 0.8));
    let profiles = s.profiles().unwrap();
    let (p, _) = build_integrated(&s, &profiles, SizePins::default()).unwrap();
    assert_eq!(p.num_variables(), 24 * (8 + 5) + 4);
    assert_eq!(p.num_binaries(), 24 * 5);
}

#[test]
fn empty_system_is_free() {
    let ctx = common::ctx(common::scenario(1, 1, 24, vec![0.0; 24], vec![0.0; 24]));
    let plan = ctx.solve_integrated(SizePins::default()).unwrap();
    assert!(plan.objective.abs() < 1e-9);
    assert!(plan.investment.s_pv.abs() < 1e-9);
    assert!(plan.investment.s_bess.abs() < 1e-9);
    assert!(plan.investment.p_cder_max.abs() < 1e-9);
}

#[test]
fn islanded_plan_is_consistent() {
    let s = common::scenario(2, 1, 24, evening_load(24), common::daylight(1, 24, 0.8));
    let (soc_min, soc_top) = (s.bess.soc_min, s.bess.soh_init * s.bess.soc_max);
    let ctx = common::ctx(s);
    let plan = ctx.solve_integrated(SizePins::default()).unwrap();
    common::check_dispatch(&plan, soc_min, soc_top, plan.investment.s_bess, 0.0);
    assert!(plan.steps.iter().all(|h| h.p_imp == 0.0 && h.p_exp == 0.0));
    let rows: f64 = plan.costs.rows().iter().map(|r| r.1).sum();
    assert!((rows - plan.objective).abs() <= 1e-6 * plan.objective.abs());
    // The generator must cover the evening peak on its own or with storage.
    assert!(plan.investment.p_cder_max + plan.investment.s_bess > 0.5);
    assert!(plan.eue() < 1e-6);
}

#[test]
fn single_year_reproduces_integrated_operating_cost() {
    let mut s = common::scenario(1, 1, 24, evening_load(24), common::daylight(1, 24, 0.8));
    s.pv.capital = 150_000.0;
    s.bess.capital = 60_000.0;
    let ctx = common::ctx(s.clone());
    let plan = ctx.solve_integrated(SizePins::default()).unwrap();
    let overrides = YearOverrides {
        year: 1,
        eta_pv: s.pv.eta_init,
        eta_bess: s.bess.eta_rt,
        soh: s.bess.soh_init,
        capacity: plan.investment.s_bess,
    };
    let year = ctx.solve_year(plan.investment, overrides, 0).unwrap();
    let operating = plan.objective - plan.costs.capital();
    assert!(
        (year.objective - operating).abs() <= 1e-6 * operating.abs().max(1.0),
        "single-year {} vs integrated operating {operating}",
        year.objective
    );
}

#[test]
fn charging_efficiency_scales_stored_energy() {
    let s = common::scenario(1, 1, 4, vec![0.5; 4], vec![0.0; 4]);
    let profiles = s.profiles().unwrap();
    let inv = InvestmentDecision {
        s_pv: 0.0,
        s_bess: 1.0,
        p_cder_max: 1.0,
    };
    let coef = |eta: f64| {
        let ov = YearOverrides {
            year: 1,
            eta_pv: 1.0,
            eta_bess: eta,
            soh: 1.0,
            capacity: 1.0,
        };
        let (p, idx) = build_single_year(&s, &profiles, inv, ov).unwrap();
        let row = p
            .constraints()
            .iter()
            .find(|r| r.name == "energy_1_0_0")
            .unwrap();
        row.terms
            .iter()
            .find(|t| t.0 == idx.steps[0].p_chg)
            .unwrap()
            .1
    };
    assert_eq!(coef(1.0), -1.0);
    assert_eq!(coef(0.5), -0.5);
}

#[test]
fn faded_storage_sheds_the_uncovered_deficit() {
    // Generator limited to 1 MW; the last hour needs 1.3 MW. Storage of
    // 0.2 MWh holds 0.16 MWh in its window, so 0.14 MW must be shed.
    let s = common::scenario(1, 1, 4, vec![0.5, 0.5, 0.5, 1.3], vec![0.0; 4]);
    let ctx = common::ctx(s);
    let inv = InvestmentDecision {
        s_pv: 0.0,
        s_bess: 0.2,
        p_cder_max: 1.0,
    };
    let ov = YearOverrides {
        year: 1,
        eta_pv: 1.0,
        eta_bess: 0.9,
        soh: 1.0,
        capacity: 0.2,
    };
    let d = ctx.solve_year(inv, ov, 0).unwrap();
    let shed: f64 = d.steps.iter().map(|h| h.p_ls).sum();
    assert!((shed - 0.14).abs() < 1e-6, "shed {shed}");
    common::check_dispatch(&d, 0.1, 0.9, 0.2, 0.0);

    // Doubling the storage gives 0.32 MWh usable: nothing sheds.
    let inv = InvestmentDecision { s_bess: 0.4, ..inv };
    let d = ctx
        .solve_year(
            inv,
            YearOverrides {
                capacity: 0.4,
                ..ov
            },
            0,
        )
        .unwrap();
    assert!(d.eue() < 1e-9);
}

#[test]
fn oversized_override_is_rejected() {
    let s = common::scenario(1, 1, 4, vec![0.5; 4], vec![0.0; 4]);
    let profiles = s.profiles().unwrap();
    let inv = InvestmentDecision {
        s_pv: 0.0,
        s_bess: 1.0,
        p_cder_max: 1.0,
    };
    let ov = YearOverrides {
        year: 1,
        eta_pv: 1.0,
        eta_bess: 0.9,
        soh: 1.0,
        capacity: 1.5,
    };
    assert!(build_single_year(&s, &profiles, inv, ov).is_err());
}

#[test]
fn exports_only_at_positive_prices() {
    let hours = 24;
    let mut s = common::scenario(
        1,
        1,
        hours,
        evening_load(hours),
        common::daylight(1, hours, 0.9),
    );
    s.config.tie_limit = 2.0;
    s.pv.capital = 20_000.0;
    s.pv.max_size = Some(3.0);
    let prices: Vec<f64> = (0..hours)
        .map(|h| {
            if h % 3 == 0 {
                0.0
            } else {
                30.0 + 5.0 * h as f64
            }
        })
        .collect();
    s.tariff = TariffSchedule {
        mode: TariffMode::Wholesale,
        import_price: prices,
        export_factor: 0.8,
    };
    let ctx = common::ctx(s);
    let plan = ctx.solve_integrated(SizePins::default()).unwrap();
    common::check_dispatch(&plan, 0.1, 0.9, plan.investment.s_bess, 2.0);
    assert!(
        plan.steps.iter().any(|h| h.p_exp > 1e-6),
        "fixture should export"
    );
    for h in &plan.steps {
        if h.p_exp > 1e-9 {
            assert!(h.price > 0.0, "export at zero price: {h:?}");
        }
    }
}

#[test]
fn doubling_big_m_leaves_the_optimum() {
    let mut s = common::scenario(1, 1, 24, evening_load(24), common::daylight(1, 24, 0.8));
    s.cder.p_min = 0.1;
    s.cder.no_load = 5.0;
    let profiles = s.profiles().unwrap();
    let m = dbio_core::model::effective_big_m(&s, &profiles, &SizePins::default());
    let a = common::ctx(s.clone())
        .solve_integrated(SizePins::default())
        .unwrap();
    s.config.big_m = Some(2.0 * m);
    let b = common::ctx(s)
        .solve_integrated(SizePins::default())
        .unwrap();
    assert!((a.objective - b.objective).abs() <= 1e-6 * a.objective.abs());
}
