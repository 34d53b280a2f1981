mod common;

use pubsolid::pipeline::{emit_plot_data, run_pipeline, run_stages, RunConfig, Stage, StageStatus};
use pubsolid::Error;

#[test]
fn full_run_writes_every_module_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::write_fixture(dir.path(), 1, "");
    let config = RunConfig::load(&cfg).unwrap();
    let report = run_pipeline(&config).unwrap();
    assert!(!report.partial, "{:#?}", report.stages);
    let out = dir.path().join("out");
    for name in [
        "impact.csv",
        "normalization.csv",
        "market_share.csv",
        "matches.csv",
        "solidarity.csv",
        "centrality_summary.csv",
        "centrality_pr_2015_2citation.csv",
        "comparison_2015_5reference.csv",
        "network_2015_2citation.csv",
        "novelty.csv",
        "disruption.csv",
        "clusters.csv",
        "author_stats.csv",
        "manifest.json",
    ] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"], report.config_hash);
    assert_eq!(manifest["partial"], false);
    assert_eq!(manifest["stages"].as_array().unwrap().len(), Stage::ORDER.len());

    for figure in ["2E", "2F", "3", "4B", "4C", "4D", "S19"] {
        let p = emit_plot_data(&config, figure).unwrap();
        assert!(std::fs::read_to_string(p).unwrap().lines().count() > 1, "figure {figure} empty");
    }
    let f2 = std::fs::read_to_string(emit_plot_data(&config, "2f").unwrap()).unwrap();
    assert_eq!(f2.lines().next().unwrap(), "qj_id,psi_ratio,relative_publisher_size,qj_impact");
    assert!(matches!(emit_plot_data(&config, "9Z"), Err(Error::UnknownFigure(_))));
    match emit_plot_data(&config, "S18") {
        Err(Error::MissingStageOutput { stage, .. }) => assert_eq!(stage, "synth"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn impact_only_run() {
    let dir = tempfile::tempdir().unwrap();
    let toggles = "\n[stages]\nmarket = false\nmatching = false\nselfcite = false\njnet = false\nnovelty = false\ndisruption = false\nauthors = false\n";
    let cfg = common::write_fixture(dir.path(), 2, toggles);
    let mut config = RunConfig::load(&cfg).unwrap();
    config.impact.reference_year = 1990;
    let report = run_pipeline(&config).unwrap();
    assert!(!report.partial);
    let out = dir.path().join("out");
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["impact.csv", "manifest.json"]);
}

#[test]
fn failed_stage_skips_dependents_and_marks_partial() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::write_fixture(dir.path(), 3, "");
    let mut config = RunConfig::load(&cfg).unwrap();
    // no citations in this year, so no normalization table for matching
    config.impact.reference_year = 1990;
    let report = run_stages(&config, &[Stage::Impact, Stage::Matching, Stage::Jnet, Stage::Disruption]).unwrap();
    assert!(report.partial);
    assert!(matches!(report.record(Stage::Matching).unwrap().status, StageStatus::Failed(_)));
    assert!(matches!(report.record(Stage::Jnet).unwrap().status, StageStatus::Skipped(_)));
    assert_eq!(report.record(Stage::Disruption).unwrap().status, StageStatus::Completed);
    assert_eq!(report.record(Stage::Novelty).unwrap().status, StageStatus::Disabled);
    let out = dir.path().join("out");
    assert!(out.join("impact.csv").exists());
    assert!(out.join("disruption.csv").exists());
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"partial\": true"));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::write_fixture(dir.path(), 4, "");
    let mut config = RunConfig::load(&cfg).unwrap();
    config.stages.authors = false;
    run_pipeline(&config).unwrap();
    let first = common::csv_outputs(&config.out_dir);
    run_pipeline(&config).unwrap();
    assert_eq!(first, common::csv_outputs(&config.out_dir));
}
