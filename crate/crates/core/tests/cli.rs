use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use plate_cdg::sparse::matrix_market::{read_array, read_coordinate};

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_plate-cdg"))
        .arg("--config")
        .arg(&cfg)
        .args(args)
        .output()
        .unwrap()
}

fn read_solution(path: &Path) -> Vec<[f64; 3]> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,u"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

#[test]
fn mesh_info_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), r#"{"n": 2}"#, &["mesh-info"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["vertices"], 9);
    assert_eq!(v["triangles"], 8);
    assert_eq!(v["edges"], 16);
    assert_eq!(v["h"], 1.0);

    let bad = run(dir.path(), r#"{"n": 0}"#, &["mesh-info"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("resolution"));
}

#[test]
fn export_writes_reduced_system() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let n = 4;
    let out = run(
        dir.path(),
        &format!(r#"{{"n": {n}, "method": 2, "run_eta": 10}}"#),
        &["export", "--out", out_dir.to_str().unwrap()],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let a = read_coordinate(out_dir.join("A.mtx")).unwrap();
    let b = read_coordinate(out_dir.join("B.mtx")).unwrap();
    let f = read_array(out_dir.join("f.mtx")).unwrap();
    let free = (2 * n + 1) * (2 * n + 1) - (2 * n + 1);
    assert_eq!(a.shape(), (free, free));
    assert_eq!(b.shape(), (2 * n + 1, free));
    assert_eq!(f.len(), free);
    // NIPG is not symmetric
    assert!(a.asymmetry() > 0.0);

    let again = dir.path().join("again");
    run(
        dir.path(),
        &format!(r#"{{"n": {n}, "method": 2, "run_eta": 10}}"#),
        &["export", "--out", again.to_str().unwrap()],
    );
    for name in ["A.mtx", "B.mtx", "f.mtx"] {
        assert_eq!(
            fs::read(out_dir.join(name)).unwrap(),
            fs::read(again.join(name)).unwrap()
        );
    }
}

#[test]
fn solve_default_setup_and_zero_load() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("default");
    let out = run(
        dir.path(),
        "{}",
        &["solve", "--out", out_dir.to_str().unwrap()],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let sol = read_solution(&out_dir.join("solution.csv"));
    assert_eq!(sol.len(), 81);
    assert!(sol.iter().any(|r| r[2].abs() > 1.0));
    assert!(sol.iter().filter(|r| r[1] == 1.0).all(|r| r[2] == 0.0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["converged"], true);
    assert!(report["report"]["kkt_residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(report["load"], "paper-example");

    let zero_dir = dir.path().join("zero");
    let out = run(
        dir.path(),
        r#"{"load": "constant:0", "method": 4}"#,
        &["solve", "--out", zero_dir.to_str().unwrap()],
    );
    assert!(out.status.success());
    assert!(read_solution(&zero_dir.join("solution.csv"))
        .iter()
        .all(|r| r[2] == 0.0));
}

#[test]
fn solver_failure_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = r#"{"solver": {"max_iter": 5, "polish": false}}"#;
    let out = run(
        dir.path(),
        cfg,
        &["solve", "--out", out_dir.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["converged"], false);
    assert_eq!(report["report"]["iterations"], 5);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"methods": [1, 5], "eta": [10, 100], "levels": [2, 4], "reference": 8, "n": 4, "method": 5}"#;
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out_dir = dir.path().join(format!("t{threads}"));
        for cmd in ["study", "solve"] {
            let o = run(
                dir.path(),
                cfg,
                &[
                    cmd,
                    "--threads",
                    threads,
                    "--out",
                    out_dir.to_str().unwrap(),
                ],
            );
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        }
        outputs.push(out_dir);
    }
    for name in [
        "study.csv",
        "study.md",
        "study.json",
        "solution.csv",
        "report.json",
    ] {
        assert_eq!(
            fs::read(outputs[0].join(name)).unwrap(),
            fs::read(outputs[1].join(name)).unwrap(),
            "{name}"
        );
    }
    let csv = fs::read_to_string(outputs[0].join("study.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "j,eta,h,energy_error,h1_error,order_energy,order_h1,solver_iters"
    );
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn verify_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let o = run(
        dir.path(),
        r#"{"verify_levels": [2]}"#,
        &["verify", "--out", out_dir.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("0 failed"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("verify.json")).unwrap()).unwrap();
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}
