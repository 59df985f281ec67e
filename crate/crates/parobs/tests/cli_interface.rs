//! External surface: CLI commands, artifact layout, config validation, and
//! report determinism.

use std::path::Path;

use parobs::cli::{run, GridParams, RunConfig};
use parobs::error::Error;

fn config(command: &str, test: &str, out: &Path) -> RunConfig {
    RunConfig {
        command: command.into(),
        test: Some(test.into()),
        problem_file: None,
        grid: Some(GridParams {
            n_space: 33,
            n_time: 9,
        }),
        eps: Some(vec![1e-2]),
        out: out.display().to_string(),
        seed: 0,
        jobs: 1,
        radii: None,
    }
}

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("parobs_cli_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_writes_field_artifacts() {
    let dir = temp_dir("solve");
    let code = run(&config("solve", "unconstrained-heat", &dir)).unwrap();
    assert_eq!(code, 0);
    for name in ["u.field", "v.field", "grid.json", "steps.csv", "u.csv", "metadata.json"] {
        assert!(dir.join(name).exists(), "missing artifact {name}");
    }
    // the binary container round-trips
    let u = parobs::io::read_field(&dir.join("u.field")).unwrap();
    assert_eq!(u.grid.n_space, 33);
    assert_eq!(u.grid.n_time, 9);
}

#[test]
fn unknown_test_name_is_config_error_naming_the_field() {
    let dir = temp_dir("badname");
    let err = run(&config("solve", "no-such-test", &dir)).unwrap_err();
    match err {
        Error::ConfigInvalid { path, reason } => {
            assert_eq!(path, "test");
            assert!(reason.contains("no-such-test"));
        }
        other => panic!("expected ConfigInvalid, got {other}"),
    }
}

#[test]
fn unknown_command_is_rejected() {
    let dir = temp_dir("badcmd");
    let mut c = config("explode", "unconstrained-heat", &dir);
    c.command = "explode".into();
    assert!(matches!(c.validate(), Err(Error::ConfigInvalid { .. })));
}

#[test]
fn diagnose_writes_report_with_mandatory_keys() {
    let dir = temp_dir("diag");
    let mut c = config("diagnose", "thick-active", &dir);
    c.grid = Some(GridParams {
        n_space: 65,
        n_time: 33,
    });
    let code = run(&c).unwrap();
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap();
    for key in [
        "utt_min",
        "utt_bound",
        "pass_margin",
        "modulus_table",
        "holder_fit",
        "phi_series",
        "lambda_hat",
        "density_series",
        "l_hat",
        "omega_hat",
        "blowup_error",
    ] {
        assert!(report.get(key).is_some(), "report lacks key {key}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir_a = temp_dir("det_a");
    let dir_b = temp_dir("det_b");
    let mut ca = config("diagnose", "thick-active", &dir_a);
    let mut cb = config("diagnose", "thick-active", &dir_b);
    ca.grid = Some(GridParams {
        n_space: 65,
        n_time: 33,
    });
    cb.grid = ca.grid;
    run(&ca).unwrap();
    run(&cb).unwrap();
    let a = std::fs::read(dir_a.join("report.json")).unwrap();
    let b = std::fs::read(dir_b.join("report.json")).unwrap();
    assert_eq!(a, b, "reports differ between identical runs");
}

#[test]
fn sweep_writes_table_and_respects_jobs() {
    let dir1 = temp_dir("sweep1");
    let mut c = config("sweep", "thick-active", &dir1);
    c.grid = Some(GridParams {
        n_space: 65,
        n_time: 33,
    });
    c.eps = Some(vec![1e-1, 1e-2, 1e-3]);
    run(&c).unwrap();
    let dir2 = temp_dir("sweep2");
    let mut c2 = c.clone();
    c2.out = dir2.display().to_string();
    c2.jobs = 3;
    run(&c2).unwrap();
    let a = std::fs::read(dir1.join("sweep.json")).unwrap();
    let b = std::fs::read(dir2.join("sweep.json")).unwrap();
    assert_eq!(a, b, "parallel sweep changed the table");
}

#[test]
fn problem_file_round_trip() {
    // write a problem document, load it through the config path, march it
    let p = parobs::builtin::builtin("unconstrained-heat", 33, 9, 1e-2).unwrap();
    let dir = temp_dir("doc");
    let doc = serde_json::json!({ "grid": p.grid, "spec": p.spec });
    let path = dir.join("problem.json");
    std::fs::write(&path, serde_json::to_vec(&doc).unwrap()).unwrap();
    let mut c = config("solve", "ignored", &dir);
    c.test = None;
    c.problem_file = Some(path.display().to_string());
    assert_eq!(run(&c).unwrap(), 0);
    assert!(dir.join("u.field").exists());
}
