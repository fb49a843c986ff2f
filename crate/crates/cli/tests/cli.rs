use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn laxforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laxforge")).args(args).output().expect("run laxforge")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_conserves_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = laxforge(&[
        "simulate",
        "--kappa",
        "2",
        "--q0",
        "1,-1",
        "--t0",
        "0",
        "--t1",
        "2",
        "--tol",
        "1e-10",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary: Value = serde_json::from_slice(&fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["max_first_integral_drift"].as_f64().unwrap() <= 1e-8);
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,Re(Q_1),Im(Q_1),Re(Q_2),Im(Q_2),Re(P_1)"));
    assert!(dir.path().join("final_state.json").exists());
}

#[test]
fn equal_times_give_a_single_state() {
    let o = laxforge(&["simulate", "--kappa", "2", "--q0", "1,-1", "--t0", "0.5", "--t1", "0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 2);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["simulate", "--kappa", "0"][..],
        &["simulate", "--kappa", "2", "--q0", "1"],
        &["simulate", "--tol", "-1"],
        &["verify", "--grid", "0,1,2"],
        &["verify", "--anchor", "Q:1"],
        &["bogus"],
        &["verify", "--format", "xml"],
        &["simulate", "--config", "/nonexistent/config.json"],
    ] {
        assert_eq!(code(&laxforge(args)), 2, "{args:?}");
    }
}

#[test]
fn collisions_exit_three() {
    let o = laxforge(&["simulate", "--kappa", "2", "--q0", "0.5,0.5"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |cmd: &'static str| vec![cmd, "--kappa", "3", "--seed", "11", "--out", path(dir.path())];
    for (cmd, files) in
        [("simulate", &["trajectory.csv", "summary.json", "run.json"][..]), ("verify", &["verify.json", "run.json"])]
    {
        let first = laxforge(&args(cmd));
        let snapshot: Vec<Vec<u8>> = files.iter().map(|f| fs::read(dir.path().join(f)).unwrap()).collect();
        let second = laxforge(&args(cmd));
        assert_eq!(first.stdout, second.stdout, "{cmd}");
        for (f, bytes) in files.iter().zip(&snapshot) {
            assert_eq!(&fs::read(dir.path().join(f)).unwrap(), bytes, "{cmd}: {f}");
        }
    }
}

#[test]
fn seed_moves_the_default_initial_data() {
    let first_row = |seed: &str| {
        let o = laxforge(&["simulate", "--kappa", "2", "--t1", "0", "--seed", seed]);
        String::from_utf8(o.stdout).unwrap().lines().nth(1).unwrap().to_string()
    };
    assert_eq!(first_row("1"), first_row("1"));
    assert_ne!(first_row("1"), first_row("2"));
}

#[test]
fn verify_report_follows_the_schema() {
    let o = laxforge(&["verify", "--kappa", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let obj = v.as_object().unwrap();
    let keys: Vec<&String> = obj.keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for name in [
        "conservation_law",
        "second_governing",
        "compatibility",
        "degree_audit",
        "zero_curvature_fd",
        "constraint_diagonal",
    ] {
        assert!(obj.contains_key(name), "{name}");
    }
    for (name, e) in obj {
        let e = e.as_object().unwrap();
        assert_eq!(e.len(), 3, "{name}");
        assert!(e["max_abs"].is_number() && e["rms"].is_number(), "{name}");
        assert_eq!(e["pass"], true, "{name}");
    }
}

#[test]
fn verify_csv_form() {
    let o = laxforge(&["verify", "--kappa", "1", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("identity,max_abs,rms,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn broken_potential_fails_the_governing_identity() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let o = laxforge(&["simulate", "--kappa", "2", "--q0", "1,-1", "--t1", "1", "--out", path(&sim)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(sim.join("trajectory.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let col = header.split(',').position(|h| h == "Re(U)").unwrap();
    let mut broken = format!("{header}\n");
    for line in lines {
        let mut cells: Vec<String> = line.split(',').map(String::from).collect();
        cells[col] = (cells[col].parse::<f64>().unwrap() + 0.5).to_string();
        broken.push_str(&cells.join(","));
        broken.push('\n');
    }
    let file = dir.path().join("broken.csv");
    fs::write(&file, broken).unwrap();

    let o = laxforge(&["verify", "--trajectory", path(&file)]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["second_governing"]["pass"], false);
    assert_eq!(v["first_integrals_initial"]["pass"], false);
    assert!(stderr(&o).contains("second_governing"));

    // the untouched file verifies
    let o = laxforge(&["verify", "--trajectory", path(&sim.join("trajectory.csv"))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn state_snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&laxforge(&["simulate", "--kappa", "2", "--t1", "0.5", "--out", path(dir.path())])), 0);
    let state = dir.path().join("final_state.json");
    let o = laxforge(&["build-lax", "--state", path(&state)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["t"], 0.5);
}

#[test]
fn build_lax_at_the_symmetric_state() {
    let dir = tempfile::tempdir().unwrap();
    let o = laxforge(&["build-lax", "--kappa", "2", "--q0", "1,-1", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    // L₊ = x² − 1 as [re, im] coefficient pairs in ascending order
    let lplus: Vec<f64> = v["entries"]["Lplus"].as_array().unwrap().iter().map(|c| c[0].as_f64().unwrap()).collect();
    assert_eq!(lplus, [-1.0, 0.0, 1.0]);
    let cert: Value = serde_json::from_slice(&fs::read(dir.path().join("lax_certificates.json")).unwrap()).unwrap();
    assert!(cert["remainders"]["l_minus"].as_f64().unwrap() < 1e-10);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"kappa": 2, "q0": "1,-1", "t1": 0.25, "tol": 1e-9}"#).unwrap();
    let out = dir.path().join("out");
    let o = laxforge(&["simulate", "--config", path(&cfg), "--t1", "0.5", "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let run: Value = serde_json::from_slice(&fs::read(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["kappa"], 2);
    assert_eq!(run["t1"], 0.5);
    assert_eq!(run["tol"], 1e-9);

    fs::write(&cfg, r#"{"kapa": 2}"#).unwrap();
    assert_eq!(code(&laxforge(&["simulate", "--config", path(&cfg)])), 2);
}

#[test]
fn crosscheck_passes_on_the_default_window() {
    let dir = tempfile::tempdir().unwrap();
    let o = laxforge(&["crosscheck-hm", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for name in [
        "hm_ode_residual",
        "kappa1_fields_b_plus",
        "kappa2_fields_b_one",
        "baik_rains_zero_curvature",
        "baik_rains_zero_curvature_fd",
    ] {
        assert_eq!(v[name]["pass"], true, "{name}");
    }
    assert!(fs::read_to_string(dir.path().join("hm.csv")).unwrap().starts_with("t,q,qprime,u\n"));
}

#[test]
fn flipped_table_fails_the_ode_invariant_first() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&laxforge(&["crosscheck-hm", "--out", path(dir.path())])), 0);
    let text = fs::read_to_string(dir.path().join("hm.csv")).unwrap();
    let mut lines = text.lines();
    let mut flipped = format!("{}\n", lines.next().unwrap());
    for line in lines {
        let mut cells: Vec<String> = line.split(',').map(String::from).collect();
        cells[1] = (-cells[1].parse::<f64>().unwrap()).to_string();
        flipped.push_str(&cells.join(","));
        flipped.push('\n');
    }
    let table = dir.path().join("flipped.csv");
    fs::write(&table, flipped).unwrap();
    let o = laxforge(&["crosscheck-hm", "--hm-table", path(&table)]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("hm_ode_residual") && !err.contains("hm_positivity"), "{err}");
}

#[test]
fn double_pole_times_are_skipped_with_a_warning() {
    // w = t + 2q' + 2q² vanishes near t ≈ 0.36, where the two κ=2 poles merge
    let o = laxforge(&["crosscheck-hm", "--grid", "0.3,0.42,-3,3,13,10"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("kappa=2: near-double pole"), "{err}");
    assert!(!err.contains("kappa=1"));
}

#[test]
fn report_includes_the_eigenvector_chain() {
    let dir = tempfile::tempdir().unwrap();
    let o = laxforge(&["report", "--kappa", "3", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for name in
        ["eigenflow_path_independence", "eigenflow_fokker_planck", "eigenflow_first_order_pde", "eigenflow_ode_in_x"]
    {
        assert_eq!(v[name]["pass"], true, "{name}");
    }
    let field = fs::read_to_string(dir.path().join("eigenflow.csv")).unwrap();
    assert!(field.starts_with("t,x,Re(F),Im(F),Re(G),Im(G)\n"));
}

#[test]
fn thread_count_must_be_positive() {
    let o = Command::new(env!("CARGO_BIN_EXE_laxforge"))
        .args(["simulate", "--kappa", "1", "--t1", "0"])
        .env("LAXFORGE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_laxforge"))
        .args(["verify", "--kappa", "1"])
        .env("LAXFORGE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}
