//! Config loading, seeding and report output of the experiment harness.

use graphonlab::experiments::{
    catalog, find, run_experiment, run_experiment_in, to_csv, write_report, ExperimentConfig,
    ExperimentReport,
};
use graphonlab::{Error, GraphonSpec};

fn small(name: &str) -> ExperimentConfig {
    let mut c = find(name).unwrap().default_config();
    c.replicas = c.replicas.min(4);
    c
}

#[test]
fn reports_are_reproducible() {
    let c = small("edge_growth");
    let a = run_experiment(&c).unwrap();
    let b = run_experiment(&c).unwrap();
    assert_eq!(a, b);
    let mut d = c.clone();
    d.seed += 1;
    assert_ne!(run_experiment(&d).unwrap().records, a.records);
}

#[test]
fn graphon_files_resolve_next_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let spec = GraphonSpec::Step {
        masses: vec![2.0],
        values: vec![vec![0.5]],
        ambient_infinite: false,
    };
    std::fs::write(dir.path().join("w.json"), spec.to_json()).unwrap();
    let text = r#"{"experiment":"edge_growth","graphon":"w.json","horizons":[20],"replicas":8,"seed":5}"#;
    std::fs::write(dir.path().join("run.json"), text).unwrap();
    let c = ExperimentConfig::load(dir.path().join("run.json")).unwrap();
    let r = run_experiment_in(&c, Some(dir.path())).unwrap();
    assert_eq!(r.aggregate_for("target", 0.0).unwrap().mean, 2.0);
}

#[test]
fn unknown_fields_and_experiments_are_rejected() {
    assert!(ExperimentConfig::from_json(r#"{"experiment":"edge_growth","replicas":1,"seed":0,"oops":1}"#).is_err());
    let c = ExperimentConfig::from_json(r#"{"experiment":"nope","replicas":1,"seed":0}"#).unwrap();
    assert!(matches!(run_experiment(&c), Err(Error::UnknownExperiment(_))));
}

#[test]
fn every_entry_runs_at_small_scale() {
    for e in catalog() {
        if matches!(e.name, "perturbation_bound" | "tail_dichotomy" | "bounded_degree_null") {
            continue;
        }
        let r = run_experiment(&small(e.name)).unwrap();
        assert!(!r.records.is_empty(), "{}", e.name);
        assert!(!r.checks.is_empty(), "{}", e.name);
    }
}

#[test]
fn written_reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&small("cut_norm_oracle")).unwrap();
    let paths = write_report(&report, dir.path()).unwrap();
    let csv = std::fs::read_to_string(&paths[0]).unwrap();
    assert_eq!(csv, to_csv(&report));
    let json = std::fs::read_to_string(&paths[1]).unwrap();
    assert_eq!(ExperimentReport::from_json(&json).unwrap(), report);
}
