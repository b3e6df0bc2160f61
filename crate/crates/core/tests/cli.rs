use std::path::Path;
use std::process::{Command, Output};

fn crossroads(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossroads"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_scenario(dir: &Path, vehicles: usize) -> String {
    let path = dir.join("small.toml");
    let mut s = crossroads::sim::Scenario::default();
    s.traffic.vehicles = vehicles;
    std::fs::write(&path, s.to_toml().unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn plan_writes_schedule_and_tunnels() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), 8);
    let out = dir.path().join("plan");
    let o = crossroads(&[
        "plan",
        "--scenario",
        &scenario,
        "--strategy",
        "proposed",
        "--seed",
        "3",
        "--threads",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("pairwise disjoint: true"));
    let schedule = std::fs::read_to_string(out.join("schedule.csv")).unwrap();
    assert_eq!(schedule.lines().count(), 9);
    assert!(out.join("tunnel_001.csv").exists());
}

#[test]
fn plan_with_cs_and_fixed_seed_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), 6);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = crossroads(&[
            "plan", "--scenario", &scenario, "--strategy", "cs", "--seed", "11", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read(out.join("schedule.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn refine_reports_collision_free_corridor() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("refine");
    let o = crossroads(&["refine", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("CollisionFree"));
    for f in ["refined.csv", "iterations.csv", "obstacles.csv", "tunnel.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn simulate_exports_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), 6);
    let out = dir.path().join("sim");
    let o = crossroads(&[
        "simulate", "--scenario", &scenario, "--seed", "5", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    for f in ["schedule.csv", "occupancy.csv", "metrics.toml", "acceptance.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(out.join("trajectories").is_dir());
}

#[test]
fn bench_and_compare_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let o = crossroads(&["bench", "--vehicles", "10", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let bench = std::fs::read_to_string(out.join("bench.csv")).unwrap();
    assert_eq!(bench.lines().count(), 3);

    let o = crossroads(&["compare", "--runs", "2", "--threads", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("never worse than collision-set: true"));
    let compare = std::fs::read_to_string(out.join("compare.csv")).unwrap();
    assert_eq!(compare.lines().count(), 5);
}

#[test]
fn bad_input_fails_with_nonzero_exit() {
    let o = crossroads(&["plan", "--scenario", "/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!crossroads(&["plan", "--strategy", "fifo"]).status.success());
    assert!(!crossroads(&["launch"]).status.success());
}
