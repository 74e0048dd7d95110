use std::fs;

use csod::harness::{parse_raw_csv, run_experiment, summarize, Algorithm, ExperimentConfig, RAW_HEADER, SUMMARY_HEADER};
use csod::metrics::median;

fn tiny(out: Option<std::path::PathBuf>) -> ExperimentConfig {
    let mut config = ExperimentConfig {
        problems: vec![3],
        objectives: vec![3],
        dims: Some(12),
        algorithms: vec![Algorithm::Nsga2],
        generations: 4,
        runs: 3,
        seed: 100,
        pf_points: 300,
        out,
        ..ExperimentConfig::default()
    };
    config.dan.steps_per_generation = 2;
    config
}

#[test]
fn writes_one_row_per_run_and_one_summary_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&tiny(Some(dir.path().to_path_buf()))).unwrap();
    let raw = fs::read_to_string(dir.path().join("raw.csv")).unwrap();
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let raw_lines: Vec<&str> = raw.lines().collect();
    let summary_lines: Vec<&str> = summary.lines().collect();
    assert_eq!(raw_lines[0], RAW_HEADER);
    assert_eq!(raw_lines.len(), 4);
    assert_eq!(summary_lines[0], SUMMARY_HEADER);
    assert_eq!(summary_lines.len(), 2);
    assert!(!dir.path().join("errors.txt").exists());
    let seeds: Vec<&str> = raw_lines[1..].iter().map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(seeds, ["100", "101", "102"]);
    assert!(raw_lines[1].starts_with("lsmop3,3,12,105,nsga2,"));

    // the summary median is recomputable from the raw file alone
    let cells = parse_raw_csv(&raw).unwrap();
    assert_eq!(cells, out.cells);
    let igds: Vec<f64> = cells.iter().map(|c| c.igd.clone().unwrap()).collect();
    let want = median(&igds).unwrap();
    let written: f64 = summary_lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(written, want);
    assert_eq!(summarize(&cells, 0.05), out.summary);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = tiny(None);
    config.algorithms = Algorithm::ALL.to_vec();
    config.runs = 2;
    let mut raws = Vec::new();
    for (name, workers) in [("a", 1), ("b", 2)] {
        config.out = Some(dir.path().join(name));
        config.workers = workers;
        run_experiment(&config).unwrap();
        raws.push(fs::read(dir.path().join(name).join("raw.csv")).unwrap());
    }
    assert_eq!(raws[0], raws[1]);
}

#[test]
fn summary_marks_compare_against_moea_csod() {
    let mut config = tiny(None);
    config.algorithms = vec![Algorithm::MoeaCsod, Algorithm::Random];
    let out = run_experiment(&config).unwrap();
    assert_eq!(out.summary.len(), 2);
    assert_eq!(out.summary[0].algorithm, "moea-csod");
    assert!(out.summary[0].mark.is_none());
    assert!(out.summary[1].mark.is_some());
}

#[test]
fn imported_results_join_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("external.csv");
    let external = format!("{RAW_HEADER}\nlsmop3,3,12,105,rm-meda,0,4,9.5\nlsmop3,3,12,105,rm-meda,1,4,9.0\nlsmop3,3,12,105,rm-meda,2,4,NaN\n");
    fs::write(&path, external).unwrap();
    let mut config = tiny(None);
    config.import = vec![path];
    let out = run_experiment(&config).unwrap();
    let row = out.summary.iter().find(|r| r.algorithm == "rm-meda").unwrap();
    assert_eq!(row.median_igd, Some(9.25));
    assert_eq!(out.cells.len(), 6);
}

#[test]
fn config_file_and_overrides() {
    let mut config = ExperimentConfig::default();
    config
        .apply_file_text("# sweep\nproblem = lsmop1, 5\nobjectives = 3\nruns = 4\n\nalgorithm = nsga2\n")
        .unwrap();
    assert_eq!(config.problems, [1, 5]);
    assert_eq!(config.objectives, [3]);
    assert_eq!(config.runs, 4);
    assert_eq!(config.algorithms, [Algorithm::Nsga2]);
    config.apply("runs", "7").unwrap();
    assert_eq!(config.runs, 7);
    assert!(config.apply("problem", "lsmop12").is_err());
    assert!(config.apply("nonsense", "1").is_err());
    assert!(config.apply_file_text("runs 3").is_err());
}
