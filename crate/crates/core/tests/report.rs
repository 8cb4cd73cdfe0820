mod common;

use common::{ctx, peak_fixture};
use dbio_core::model::SizePins;
use dbio_core::report::{emit_reports, ReportBundle};
use dbio_core::validation::validate;

#[test]
fn cost_rows_add_up_to_the_objective() {
    let plan = ctx(peak_fixture(2))
        .solve_integrated(SizePins::default())
        .unwrap();
    let sum: f64 = plan.costs.rows().iter().map(|(_, v)| v).sum();
    assert!((sum - plan.objective).abs() <= 1e-6 * plan.objective.abs().max(1.0));
    assert!((plan.costs.total() - sum).abs() <= 1e-9 * sum.abs().max(1.0));
}

#[test]
fn validation_writes_one_row_per_year() {
    let c = ctx(peak_fixture(3));
    let plan = c.solve_integrated(SizePins::default()).unwrap();
    let v = validate(&c, plan.investment).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bundle = ReportBundle {
        plan: Some(&plan),
        validation: Some(&v),
        sizing: None,
    };
    let files = emit_reports(&bundle, dir.path()).unwrap();
    assert!(files.iter().all(|f| f.exists()));
    for name in ["degradation.csv", "validation.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().count(), 1 + 3, "{name}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(
        json["investment"]["s_bess"].as_f64().unwrap(),
        plan.investment.s_bess
    );
}

#[test]
fn unwritable_destination_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let plan = ctx(peak_fixture(1))
        .solve_integrated(SizePins::default())
        .unwrap();
    let bundle = ReportBundle {
        plan: Some(&plan),
        validation: None,
        sizing: None,
    };
    assert!(emit_reports(&bundle, &blocker.join("out")).is_err());
}
