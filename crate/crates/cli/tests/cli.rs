//! End-to-end tests of the `opdyn` binary: exit codes, reproducibility, and
//! file outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn opdyn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opdyn"))
}

fn run(args: &[&str]) -> Output {
    opdyn().args(args).output().expect("binary runs")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("opdyn-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_exits_zero_everywhere() {
    let commands: &[&[&str]] = &[
        &["--help"],
        &["two-agent", "--help"],
        &["two-agent", "classify", "--help"],
        &["two-agent", "simulate", "--help"],
        &["two-agent", "region", "--help"],
        &["two-agent", "band", "--help"],
        &["sbm", "--help"],
        &["sbm", "generate", "--help"],
        &["sbm", "check", "--help"],
        &["sbm", "simulate", "--help"],
        &["experiment", "--help"],
        &["graph", "--help"],
        &["graph", "simulate", "--help"],
    ];
    for args in commands {
        let out = run(args);
        assert!(out.status.success(), "{args:?} exited {:?}", out.status.code());
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["two-agent", "classify", "--a", "1"]); // missing args
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["experiment", "polarization", "--config", "/nonexistent.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["two-agent", "classify", "--a", "1", "--b", "1", "--x1", "0", "--x2", "1"]);
    assert_eq!(out.status.code(), Some(2), "axis start is invalid-argument");
}

#[test]
fn classify_prints_expected_kind() {
    let out = run(&["two-agent", "classify", "--a", "1", "--b", "1", "--x1", "-0.1", "--x2", "0.2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "PD_C1");
}

#[test]
fn region_grid_has_resolution_squared_rows() {
    let dir = tmpdir("region");
    let csv = dir.join("region.csv");
    let out = run(&[
        "two-agent", "region", "--ratio", "0.5", "--min", "-3", "--max", "3", "--res", "101",
        "--out", path_str(&csv),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 101 * 101);
    assert!(text.starts_with("x1_0,x2_0,kind"));
}

#[test]
fn simulate_reaches_the_pd_equilibrium() {
    let dir = tmpdir("simulate");
    let csv = dir.join("traj.csv");
    let out = run(&[
        "two-agent", "simulate", "--a", "1", "--b", "1", "--x1", "-0.4", "--x2", "0.4",
        "--horizon", "20", "--out", path_str(&csv),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let last = text.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').map(|v| v.parse().unwrap()).collect();
    assert!((cols[1] + 1.0 / 3.0).abs() < 1e-4, "final x1 = {}", cols[1]);
    assert!((cols[2] - 1.0 / 3.0).abs() < 1e-4);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["kind"], "PersistentDisagreement");
}

#[test]
fn seeded_generation_is_byte_identical() {
    let dir = tmpdir("gen");
    let (e1, l1) = (dir.join("e1.txt"), dir.join("l1.txt"));
    let (e2, l2) = (dir.join("e2.txt"), dir.join("l2.txt"));
    for (e, l) in [(&e1, &l1), (&e2, &l2)] {
        let out = run(&[
            "sbm", "generate", "--n", "32", "--p", "0.25", "--q", "0.125", "--seed", "7",
            "--out-edges", path_str(e), "--out-labels", path_str(l),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&e1).unwrap(), fs::read(&e2).unwrap());
    assert_eq!(fs::read(&l1).unwrap(), fs::read(&l2).unwrap());
}

#[test]
fn generated_graph_passes_its_own_check() {
    let dir = tmpdir("check");
    let (e, l) = (dir.join("e.txt"), dir.join("l.txt"));
    let out = run(&[
        "sbm", "generate", "--n", "64", "--p", "0.5", "--q", "0.25", "--seed", "3",
        "--out-edges", path_str(&e), "--out-labels", path_str(&l),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "sbm", "check", "--edges", path_str(&e), "--labels", path_str(&l), "--n", "64",
        "--p", "0.5", "--q", "0.25", "--delta", "0.9",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["delta"], 0.9);
    assert!(v["worst_same_deviation"].as_f64().unwrap() >= 0.0);
}

#[test]
fn sbm_simulate_writes_metrics_series() {
    let dir = tmpdir("sbmsim");
    let csv = dir.join("metrics.csv");
    let out = run(&[
        "sbm", "simulate", "--n", "32", "--p", "0.25", "--q", "0.125", "--seed", "11",
        "--b", "2", "--horizon", "15", "--out", path_str(&csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,polarization,extremism"));
    let last = text.lines().last().unwrap();
    let pol: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    // b=2, beta=1/3: equilibrium polarization 1.5
    assert!((pol - 1.5).abs() < 0.15, "terminal polarization {pol}");
}

#[test]
fn experiment_outputs_csv_and_manifest_reproducibly() {
    let dir = tmpdir("exp");
    let cfg = dir.join("cfg.toml");
    fs::write(
        &cfg,
        r#"
            seed = 5
            trials = 20
            b = [0.5, 1.0]
            [network]
            kind = "sbm"
            n = 8
            p = 0.3
            q = 0.15
            [integrator]
            horizon = 100.0
        "#,
    )
    .unwrap();
    for stamp in ["one", "two"] {
        let out = run(&[
            "experiment", "polarization", "--config", path_str(&cfg), "--out-dir",
            path_str(&dir), "--stamp", stamp,
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let csv1 = fs::read(dir.join("polarization_one.csv")).unwrap();
    let csv2 = fs::read(dir.join("polarization_two.csv")).unwrap();
    assert_eq!(csv1, csv2, "identical (config, seed) must give identical CSV bytes");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("polarization_one.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["failed_trials"], 0);
    assert!(manifest["config_digest"].as_str().unwrap().len() == 64);
    let outputs = manifest["outputs"].as_array().unwrap();
    for o in outputs {
        assert!(Path::new(o.as_str().unwrap()).exists(), "listed output missing: {o}");
    }
}

#[test]
fn config_digest_is_stable_under_key_reordering() {
    let dir = tmpdir("digest");
    let cfg_a = dir.join("a.toml");
    let cfg_b = dir.join("b.toml");
    fs::write(
        &cfg_a,
        "seed = 5\ntrials = 5\nb = [0.5]\n[network]\nkind = \"sbm\"\nn = 4\np = 0.5\nq = 0.25\n",
    )
    .unwrap();
    fs::write(
        &cfg_b,
        "trials = 5\nseed = 5\nb = [0.5]\n[network]\np = 0.5\nq = 0.25\nkind = \"sbm\"\nn = 4\n",
    )
    .unwrap();
    for (cfg, stamp) in [(&cfg_a, "a"), (&cfg_b, "b")] {
        let out = run(&[
            "experiment", "polarization", "--config", path_str(cfg), "--out-dir",
            path_str(&dir), "--stamp", stamp,
        ]);
        assert!(out.status.success());
    }
    let digest = |stamp: &str| -> String {
        let m: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(dir.join(format!("polarization_{stamp}.json"))).unwrap(),
        )
        .unwrap();
        m["config_digest"].as_str().unwrap().to_string()
    };
    assert_eq!(digest("a"), digest("b"));
}

#[test]
fn cycle_demo_notes_nonconvergence() {
    let dir = tmpdir("cycle");
    let out = run(&["experiment", "cycle-demo", "--out-dir", path_str(&dir), "--stamp", "t"]);
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("cycle-demo_t.json")).unwrap()).unwrap();
    assert_eq!(manifest["summary"]["kind"], "NonConvergent");
    assert!(manifest["summary"]["tail_residual_min"].as_f64().unwrap() > 1e-3);
    assert!(dir.join("cycle-demo_t.csv").exists());
}

#[test]
fn graph_simulate_runs_on_a_toy_network() {
    let dir = tmpdir("graph");
    let edges = dir.join("edges.txt");
    let labels = dir.join("labels.txt");
    fs::write(&edges, "0 1\n1 2\n2 3\n").unwrap();
    fs::write(&labels, "0 L\n1 L\n2 R\n3 R\n").unwrap();
    let out = run(&[
        "graph", "simulate", "--edges", path_str(&edges), "--labels", path_str(&labels),
        "--b", "0.5,2", "--trials", "10", "--seed", "4", "--out-dir", path_str(&dir),
        "--stamp", "t", "--horizon", "100",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("graph-simulate_t.csv").exists());
    assert!(dir.join("graph-simulate_t_trials.csv").exists());
    let trials = fs::read_to_string(dir.join("graph-simulate_t_trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 20); // header + 10 trials x 2 b values
}

#[test]
fn missing_label_exits_two() {
    let dir = tmpdir("badlabel");
    let edges = dir.join("edges.txt");
    let labels = dir.join("labels.txt");
    fs::write(&edges, "0 1\n1 2\n").unwrap();
    fs::write(&labels, "0 L\n1 R\n").unwrap(); // node 2 unlabeled
    let out = run(&[
        "graph", "simulate", "--edges", path_str(&edges), "--labels", path_str(&labels),
        "--b", "1", "--trials", "2", "--seed", "1", "--out-dir", path_str(&dir),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line"), "parse errors carry line numbers: {stderr}");
}

#[test]
fn numerical_blowup_exits_three() {
    let dir = tmpdir("blowup");
    let csv = dir.join("t.csv");
    // finite but astronomically large start: the first RK4 stage overflows
    let out = run(&[
        "two-agent", "simulate", "--a", "1", "--b", "1", "--x1", "-1e308", "--x2", "1e308",
        "--horizon", "1", "--out", path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn failing_trials_exit_four() {
    let dir = tmpdir("fail4");
    let edges = dir.join("edges.txt");
    let labels = dir.join("labels.txt");
    fs::write(&edges, "0 1\n").unwrap();
    fs::write(&labels, "0 L\n1 R\n").unwrap();
    let out = run(&[
        "graph", "simulate", "--edges", path_str(&edges), "--labels", path_str(&labels),
        "--b", "1", "--h", "1.7e308", "--trials", "4", "--seed", "1", "--out-dir",
        path_str(&dir), "--stamp", "t",
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn out_dir_env_var_is_honored() {
    let dir = tmpdir("envdir");
    let cfg = dir.join("cfg.toml");
    fs::write(
        &cfg,
        "seed = 1\ntrials = 4\nb = [1.0]\n[network]\nkind = \"sbm\"\nn = 4\np = 0.5\nq = 0.5\n[integrator]\nhorizon = 50.0\n",
    )
    .unwrap();
    let out = opdyn()
        .args(["experiment", "polarization", "--config", path_str(&cfg), "--stamp", "env"])
        .env("OPDYN_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("polarization_env.csv").exists());
}
