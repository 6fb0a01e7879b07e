use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn supnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supnorm")).args(args).env_remove("SUPNORM_THREADS").output().unwrap()
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("supnorm-cli-{}-{name}", std::process::id()))
}

#[test]
fn curve_scan_lists_squarefree_levels() {
    let out = supnorm(&["curve-scan", "--set", "max_surfaces=2"]);
    assert!(out.status.success());
    let rows = lines(&out);
    assert_eq!(rows.len(), 6);
    let degrees: Vec<i64> = rows.iter().map(|r| r["deg_N"].as_i64().unwrap()).collect();
    assert_eq!(degrees, [4, 4, 5, 5, 6, 6]);
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["--set", "q=9", "curve-scan"][..],
        &["--set", "colour=blue", "curve-scan"],
        &["--set", "n_max", "curve-scan"],
        &["--set", "two_torsion_p=1", "--set", "two_torsion_q=2", "curve-scan"],
    ] {
        assert_eq!(supnorm(args).status.code(), Some(2), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_supnorm"))
        .args(["curve-scan"])
        .env("SUPNORM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_read() {
    let path = scratch("run.cfg");
    std::fs::write(&path, "# small run\nq = 5\ntwo_torsion_p = [1]\ntwo_torsion_q = 0, 0, 1\n").unwrap();
    let out = supnorm(&["--config", path.to_str().unwrap(), "curve-scan"]);
    std::fs::remove_file(&path).ok();
    assert!(out.status.success());
    let rows = lines(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["label"], "P=1, Q=T^2");
}

#[test]
fn degree_zero_values_follow_the_pattern() {
    for z in ["0", "T:1/T", "T+2:3/(T+2)^2"] {
        let out = supnorm(&["eval-form", "--n", "0", "--z", z]);
        assert!(out.status.success());
        let m = lines(&out)[0]["magnitude"].as_f64().unwrap();
        assert!([0.0, 1.0, 4.0].iter().any(|k| (m - k).abs() < 1e-9), "z = {z}: {m}");
    }
}

#[test]
fn single_point_bound_passes() {
    let out = supnorm(&["bound", "--n", "2", "--z", "T+1:1/(T+1)^2"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = &lines(&out)[0];
    assert_eq!(rep["complete"], true);
    assert!(rep["bounds"].as_array().unwrap().iter().all(|b| b["holds"] == true));
}

#[test]
fn heights_suite_reports_checks() {
    let out = supnorm(&["heights", "--n", "1", "--z", "T:2/T", "--suite"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = &lines(&out)[0];
    assert!(rep["suite"]["checks"].as_u64().unwrap() > 0);
    assert!(rep["suite"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let args = ["--set", "max_surfaces=1", "--set", "n_max=3", "supnorm"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_supnorm")).args(args).env("SUPNORM_THREADS", threads).output().unwrap()
    };
    let (one, many) = (run("1"), run("6"));
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(lines(&one).len(), 3);
}

#[test]
fn stored_table_matches_live_scan() {
    let path = scratch("table.json");
    let out = supnorm(&["make-table", "--depth", "4", "--set", &format!("output={}", path.display())]);
    assert!(out.status.success());
    let eval = ["eval-form", "--n", "3", "--z", "T^2+2:T/(T^2+2)"];
    let live = lines(&supnorm(&eval));
    let mut stored_args = vec!["--table", path.to_str().unwrap()];
    stored_args.extend(eval);
    let stored = lines(&supnorm(&stored_args));
    std::fs::remove_file(&path).ok();
    assert_eq!(live[0]["S"], stored[0]["S"]);
    assert_eq!(live[0]["alpha"], stored[0]["alpha"]);
}

#[test]
fn table_shallower_than_request_is_a_limit() {
    let path = scratch("shallow.json");
    supnorm(&["make-table", "--depth", "2", "--set", &format!("output={}", path.display())]);
    let out = supnorm(&["--table", path.to_str().unwrap(), "eval-form", "--n", "4"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn small_identity_grid_passes() {
    let out = supnorm(&["verify-identities", "--grid", "small", "--set", "random_points=4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rows = lines(&out);
    assert_eq!(rows.len(), 13);
    assert_eq!(rows.last().unwrap()["passed"], true);
}
