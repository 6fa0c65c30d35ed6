use std::fs;
use std::path::Path;
use std::process::Command;

use torus_lab::emit::read_report;
use torus_lab::{standard_registry, ExperimentConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torus-lab"))
}

fn run_in(dir: &Path, args: &[&str]) -> std::process::Output {
    bin().args(args).arg("--out").arg(dir).output().expect("binary runs")
}

#[test]
fn registry_lists_every_experiment() {
    let names: Vec<_> = standard_registry().names().collect();
    let expected = [
        "conjecture-probe",
        "counting",
        "duality-check",
        "highdim-necessity",
        "illposed-nlss",
        "illposed-rnlss",
        "l2-check",
        "l2-sharpness",
        "l3-necessity",
        "l3-sufficiency",
        "l4-scaling",
        "nlss",
        "propagator-check",
        "rnlss",
        "support-set",
    ];
    assert_eq!(names, expected);
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for n in expected {
        assert!(text.contains(n));
    }
}

#[test]
fn sharpness_csv_schema_and_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "l2-sharpness", "--format", "csv,json,svg"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("l2-sharpness_sharpness.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,l2_norm,schatten2,ratio,tolerance"));
    for line in lines {
        let ratio: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((ratio - 0.5f64.sqrt()).abs() < 1e-9);
    }
    let svg = fs::read_to_string(dir.path().join("l2-sharpness_ratio_alpha_3.svg")).unwrap();
    assert!(svg.contains("slope = 0.1667"));
}

#[test]
fn counting_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "n_list = 2,3,4\n").unwrap();
    let out = run_in(dir.path(), &["run", "counting", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(1));
    let csv = fs::read_to_string(dir.path().join("counting_rows.csv")).unwrap();
    assert!(csv.starts_with("N,alpha,beta,r,bound,ratio,tolerance\n"));
}

#[test]
fn json_config_echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "illposed-rnlss", "--seed", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_report(&dir.path().join("illposed-rnlss.json")).unwrap();
    let cfg = ExperimentConfig::from_pairs(report.config.iter().map(|(k, v)| (k.as_str(), v.as_str()))).unwrap();
    assert_eq!(cfg.seed, Some(3));
    assert_eq!(cfg.to_pairs(), report.config);
    let again = standard_registry().run("illposed-rnlss", &cfg).unwrap();
    assert_eq!(again.tables, report.tables);
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = a.path().join("x.cfg");
    fs::write(&cfg, "experiment = l2-check\nsamples = 5\ncutoff = 6\nout = shared\n").unwrap();
    for d in [&a, &b] {
        let out = bin()
            .current_dir(d.path())
            .args(["run", "l2-check", "--config", cfg.to_str().unwrap(), "--seed", "9"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    for f in ["l2-check.json", "l2-check_samples.csv"] {
        let x = fs::read(a.path().join("shared").join(f)).unwrap();
        let y = fs::read(b.path().join("shared").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "colour = red\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["run", "no-such-experiment"],
        vec!["run", "l2-check", "--config", bad.to_str().unwrap()],
        vec!["run", "l2-check", "--format", "pdf"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = run_in(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failing_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "counting", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL r_max_exponent"));
}

#[test]
fn budget_overrun_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("slow.cfg");
    fs::write(&cfg, "budget_seconds = 0\n").unwrap();
    let out = run_in(dir.path(), &["run", "l4-scaling", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn mismatched_config_experiment_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("m.cfg");
    fs::write(&cfg, "experiment = nlss\n").unwrap();
    let out = run_in(dir.path(), &["run", "rnlss", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
