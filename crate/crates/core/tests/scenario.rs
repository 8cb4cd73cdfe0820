use std::path::PathBuf;

use proptest::prelude::*;

use dbio_core::scenario::{generate_multi_year, load_scenario, save_scenario, ScenarioConfig};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .join("scenario.json")
}

#[test]
fn shipped_fixtures_load() {
    for name in ["islanded", "grid", "grid_slb"] {
        let s = load_scenario(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        s.validate().unwrap();
        assert_eq!(s.base_load.len(), s.config.steps_per_year());
        assert_eq!(s.config.is_islanded(), name == "islanded");
    }
}

#[test]
fn saved_scenario_reads_back_unchanged() {
    let s = load_scenario(&fixture("grid")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = save_scenario(&s, dir.path()).unwrap();
    assert_eq!(load_scenario(&path).unwrap(), s);
}

#[test]
fn missing_profile_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let s = load_scenario(&fixture("grid")).unwrap();
    let path = save_scenario(&s, dir.path()).unwrap();
    std::fs::remove_file(dir.path().join("load.csv")).unwrap();
    let err = load_scenario(&path).unwrap_err().to_string();
    assert!(err.contains("load.csv"), "{err}");
}

proptest! {
    #[test]
    fn load_grows_year_over_year(
        base in prop::collection::vec(0.0..5.0f64, 24),
        growth in 0.0..0.1f64,
        years in 1u32..8,
    ) {
        let cfg = ScenarioConfig {
            planning_years: years,
            rep_days: 1,
            hours_per_day: 24,
            load_growth: growth,
            ..ScenarioConfig::default()
        };
        let p = generate_multi_year(&base, &[0.5; 24], &cfg).unwrap();
        prop_assert_eq!(p.years(), years as usize);
        for y in 1..p.years() {
            for t in 0..24 {
                prop_assert!(p.load_at(y, 0, t) >= p.load_at(y - 1, 0, t));
                prop_assert_eq!(p.pv_cf_at(y, 0, t), 0.5);
            }
        }
    }
}
