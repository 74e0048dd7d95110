use std::fs;
use std::process::Command;

fn csod() -> Command {
    Command::new(env!("CARGO_BIN_EXE_csod"))
}

#[test]
fn runs_a_config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.conf");
    fs::write(
        &config,
        "# tiny sweep\nproblem = lsmop1\nobjectives = 3\nalgorithm = nsga2, random\ndims = 10\ngenerations = 3\nruns = 5\npf-points = 200\n",
    )
    .unwrap();
    let out = dir.path().join("results");
    let output = csod()
        .arg("--config")
        .arg(&config)
        .args(["--runs", "3", "--seed", "7", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));

    let raw = fs::read_to_string(out.join("raw.csv")).unwrap();
    assert_eq!(raw.lines().count(), 1 + 2 * 3);
    assert!(raw.lines().skip(1).all(|l| l.starts_with("lsmop1,3,10,105,")));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(String::from_utf8(output.stdout).unwrap(), summary);
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn rejects_unknown_problem() {
    let output = csod().args(["--problem", "lsmop10"]).output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("lsmop10"));
}
