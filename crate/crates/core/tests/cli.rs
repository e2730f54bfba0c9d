use std::path::Path;
use std::process::{Command, Output};

fn locstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locstat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_rejects_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k3.txt");
    std::fs::write(&graph, "0 1\n1 2\n2 0\n").unwrap();
    let out = locstat(&["validate", "--graph", path_str(&graph)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangle found"));
}

#[test]
fn validate_accepts_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("c5.txt");
    std::fs::write(&graph, "# five-cycle\n0 1\n1 2\n2 3\n3 4\n4 0\n").unwrap();
    let out = locstat(&["validate", "--graph", path_str(&graph)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok: n = 5"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(locstat(&["sbm", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(locstat(&["indepset", "--n", "11", "--d", "3"]).status.code(), Some(2));
    assert_eq!(locstat(&["spiked", "--kappa", "0.7"]).status.code(), Some(2));
    assert_eq!(locstat(&["--help"]).status.code(), Some(0));
}

#[test]
fn indepset_on_triangle_graph_fails() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k3.txt");
    std::fs::write(&graph, "0 1\n1 2\n0 2\n").unwrap();
    let out = locstat(&["indepset", "--graph", path_str(&graph), "--steps", "100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sbm_run_writes_report_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = locstat(&[
        "sbm",
        "--n",
        "200",
        "--d",
        "10",
        "--lambda",
        "2",
        "--beta",
        "0.3,0.6",
        "--steps",
        "100000",
        "--replicas",
        "2",
        "--seed",
        "3",
        "--out",
        path_str(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["scenario"], "sbm");
    assert_eq!(report["config"]["seed"], 3);
    let groups = report["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 4);
    for g in groups {
        assert_eq!(g["runs"].as_array().unwrap().len(), 2);
        let file = g["runs"][0]["trajectory_file"].as_str().unwrap();
        let csv = std::fs::read_to_string(out_dir.join(file)).unwrap();
        assert!(csv.lines().next().unwrap().contains("overlap"));
    }
    assert!(report["instance"]["best_overlap"].as_f64().is_some());
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "best_overlap_minus_control"));
}

#[test]
fn config_file_round_trips_through_report() {
    let dir = tempfile::tempdir().unwrap();
    let first = locstat(&["spiked", "--n", "60", "--steps", "20000", "--seed", "9"]);
    assert_eq!(first.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, serde_json::to_string(&report["config"]).unwrap()).unwrap();
    let second = locstat(&["spiked", "--config", path_str(&cfg)]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(locstat(&["sbm", "--config", path_str(&cfg)]).status.code(), Some(2));
}

#[test]
fn seeded_oracle_output_is_identical() {
    let args = ["oracle", "--n", "5", "--instances", "4", "--seed", "7"];
    let a = locstat(&args);
    let b = locstat(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = locstat(&["oracle", "--n", "5", "--instances", "4", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_writes_loadable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let out = locstat(&[
        "gen",
        "indepset",
        "--n",
        "40",
        "--d",
        "3",
        "--seed",
        "2",
        "--out",
        path_str(&graph),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = locstat(&["validate", "--graph", path_str(&graph)]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&v.stdout).contains("edges = 60"));
}
