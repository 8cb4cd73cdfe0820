//! Writes the desk-scale scenario fixtures under `fixtures/`.
//!
//! `cargo run -p dbio-core --example gen_fixtures [out_dir]`

use std::path::PathBuf;

use dbio_core::scenario::{
    reduce_to_representative_days, save_scenario, synthetic, BessParams, CderParams, PvParams,
    Scenario, ScenarioConfig, SolverConfig, TariffSchedule,
};

const DAYS: u32 = 4;

fn base(tie_limit: f64, price: f64) -> Scenario {
    let load = reduce_to_representative_days(&synthetic::residential_load(7), DAYS).unwrap();
    let cf = reduce_to_representative_days(&synthetic::pv_capacity_factor(8), DAYS).unwrap();
    let steps = load.len();
    Scenario {
        config: ScenarioConfig {
            planning_years: 3,
            rep_days: DAYS,
            hours_per_day: 24,
            tie_limit,
            ..ScenarioConfig::default()
        },
        cder: CderParams::default(),
        pv: PvParams {
            capital: 200_000.0,
            ..PvParams::default()
        },
        bess: BessParams::default(),
        tariff: TariffSchedule::fixed(price, steps, 0.8),
        base_load: load,
        base_pv_cf: cf,
        solver: SolverConfig {
            mip_gap: 1e-4,
            ..SolverConfig::default()
        },
    }
}

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));

    // An existing 0.5 MW turbine: storage has to carry the evening peak.
    let mut islanded = base(0.0, 0.0);
    islanded.pv.deg_rate = 0.0;
    islanded.cder.capital = 0.0;
    islanded.cder.max_size = Some(0.5);
    let mut grid = base(0.4, 50.0);
    grid.bess.capital = 200_000.0;
    let mut slb = grid.clone();
    slb.bess.capital *= 0.3;

    for (name, s) in [("islanded", islanded), ("grid", grid), ("grid_slb", slb)] {
        let path = save_scenario(&s, &out.join(name)).expect("fixture written");
        println!("{}", path.display());
    }
}
