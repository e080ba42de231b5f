use std::path::Path;
use std::process::{Command, Output};

fn scl_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scl-lab"))
        .args(args)
        .env_remove("SCL_LAB_OUT")
        .output()
        .expect("spawn scl-lab")
}

fn run_into(dir: &Path, args: &[&str]) -> Output {
    let mut all = vec!["run"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", dir.to_str().unwrap()]);
    scl_lab(&all)
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn last_row(dir: &Path) -> Vec<f64> {
    let mut r = csv::Reader::from_path(dir.join("trace.csv")).unwrap();
    let rec = r.records().last().unwrap().unwrap();
    rec.iter().map(|v| v.parse().unwrap()).collect()
}

#[test]
fn bilinear_run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), &["--example", "ex1", "--method", "sclc"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["trace.csv", "report.json", "plot.svg"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let mut r = csv::Reader::from_path(dir.path().join("trace.csv")).unwrap();
    // (n, m, p) = (1, 1, 1)
    assert_eq!(r.headers().unwrap().len(), 1 + 3 + 4 + 2);
    assert_eq!(r.records().count(), 10_001);
    let rep = report(dir.path());
    assert_eq!(rep["stable"], true);
    assert!(rep["observer_gap"].as_f64().unwrap() < 1e-9);
    let svg = std::fs::read_to_string(dir.path().join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline") && svg.contains("t [s]"));
}

#[test]
fn identical_configs_give_identical_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = run_into(d.path(), &["--example", "ex3", "--method", "sclc", "--scenario", "iii"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("trace.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn unstable_jacobian_design_exits_3_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), &["--example", "ex3", "--method", "jlc", "--scenario", "ii"]);
    assert_eq!(out.status.code(), Some(3));
    let rep = report(dir.path());
    assert_eq!(rep["stable"], false);
    assert!(rep["iae"].is_null());
}

#[test]
fn irreversible_saturation_is_a_config_error() {
    let out = scl_lab(&["run", "--example", "ex2", "--method", "flc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("the saturation function is irreversible"));
    let out = scl_lab(&["run", "--example", "ex1", "--method", "jlc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("equilibrium points"));
}

#[test]
fn invalid_configs_exit_2() {
    for args in [
        vec!["run", "--example", "ex9", "--method", "sclc"],
        vec!["run", "--example", "ex1"],
        vec!["run", "--example", "ex1", "--method", "sclc", "--dt", "-1"],
        vec!["run", "--example", "ex1", "--method", "sclc", "--scenario", "ii"],
        vec!["run", "--example", "ex3", "--method", "sclc", "--x0", "1,2,3"],
        vec!["run", "--config", "/nonexistent/cfg.json"],
    ] {
        assert_eq!(scl_lab(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out_dir = dir.path().join("from-config");
    std::fs::write(
        &cfg,
        serde_json::json!({"example": "ex3", "method": "jlc", "scenario": "ii", "t_end": 2.0,
                           "output_dir": out_dir}).to_string(),
    )
    .unwrap();
    let out = scl_lab(&["run", "--config", cfg.to_str().unwrap(), "--method", "sclc"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&out_dir);
    assert_eq!(rep["method"], "sclc");
    assert_eq!(rep["t_end"], 2.0);
    assert!((last_row(&out_dir)[0] - 2.0).abs() < 1e-12);
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_scl-lab"))
        .args(["run", "--example", "ex2", "--method", "jlc", "--t-end", "1"])
        .env("SCL_LAB_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("trace.csv").exists());
}

#[test]
fn singular_initial_state_emits_no_nan() {
    let dir = tempfile::tempdir().unwrap();
    let x0 = format!("0,{}", -std::f64::consts::PI);
    for method in ["flc", "rflc"] {
        let out = run_into(dir.path(), &["--example", "ex3", "--method", method, "--x0", &x0]);
        assert_eq!(out.status.code(), Some(3));
        let rep = report(dir.path());
        assert_eq!(rep["singular"], true);
        assert_eq!(rep["outcome"], "singular");
        for f in ["trace.csv", "report.json", "plot.svg"] {
            let text = std::fs::read_to_string(dir.path().join(f)).unwrap().to_lowercase();
            assert!(!text.contains("nan") && !text.contains("inf"), "{method} {f}");
        }
    }
}

#[test]
fn decomposition_check_exit_codes() {
    let out = scl_lab(&["lemma1-check", "--cases", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.ends_with(" ok")).count(), 9);
    assert_eq!(scl_lab(&["lemma1-check", "--cases", "3", "--dt", "1e-2"]).status.code(), Some(0));
    assert_eq!(scl_lab(&["lemma1-check", "--cases", "3", "--inject-fault"]).status.code(), Some(1));
}

#[test]
fn observer_check_passes() {
    let out = scl_lab(&["observer-check"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).matches(" ok").count(), 6);
}

#[test]
fn table_has_the_published_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = scl_lab(&["table1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut r = csv::Reader::from_path(dir.path().join("table1.csv")).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["scenario", "index", "SCLC", "JLC", "FLC", "RFLC", "ADRC"]
    );
    let rows: Vec<csv::StringRecord> = r.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(&rows[2][3], "-");
    assert_eq!(&rows[6][5], "-");
    assert!(rows.iter().all(|r| r[2].parse::<f64>().is_ok()));
    assert!(dir.path().join("table1.txt").exists() && dir.path().join("table1.json").exists());
}
