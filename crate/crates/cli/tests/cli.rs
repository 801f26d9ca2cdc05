use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const GRID: [&str; 4] = ["--n", "64", "--L", "8"];
const PROFILE: [&str; 4] = ["--profile-n", "64", "--profile-L", "8"];

fn gpvortex(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpvortex"))
        .current_dir(dir)
        .env_remove("GPVORTEX_FIXTURES")
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

/// Critical mass on the small test grid.
fn small_a_star(dir: &Path) -> f64 {
    let o = gpvortex(dir, &["kwong", "--n", "64", "--L", "8", "--report", "k.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    json(&dir.join("k.json"))["result"]["a_star_2d"].as_f64().unwrap()
}

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn with_profile(base: &[&str]) -> Vec<String> {
    base.iter().chain(&GRID).chain(&PROFILE).map(|s| s.to_string()).collect()
}

fn run(dir: &Path, args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    gpvortex(dir, &refs)
}

#[test]
fn kwong_writes_profile_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gpvortex"))
        .current_dir(dir.path())
        .env("GPVORTEX_FIXTURES", fixtures())
        .args(["kwong", "--n", "128", "--L", "12", "--tol", "1e-12", "--out", "w.gpf", "--report", "kwong.json"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&dir.path().join("kwong.json"));
    assert_eq!(r["format_version"], 1);
    assert_eq!(r["command"], "kwong");
    assert_eq!(r["config"]["n"], 128);
    assert_eq!(r["config"]["L"], 12.0);
    assert!(r["result"]["max_relative_defect"].as_f64().unwrap() < 1e-7);
    assert!(r["result"]["oracle"]["a_star_rel_deviation"].as_f64().unwrap() < 1e-6);
    let w = gpvortex::fieldio::read_real(dir.path().join("w.gpf")).unwrap();
    assert_eq!(w.grid.nx, 128);
}

#[test]
fn supercritical_mass_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = gpvortex(dir.path(), &["minimize", "--a", "12.0", "--lambda", "0.8", "--omega", "0.5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("nonexistence regime"), "{}", stderr(&o));
}

#[test]
fn invalid_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 6] = [
        (&["minimize", "--a", "5", "--n", "63"], "even"),
        (&["minimize", "--a", "5", "--omega", "1.6"], "Omega*"),
        (&["minimize", "--a", "5", "--tol", "-1"], "positive"),
        (&["minimize", "--a", "5", "--frame", "lab"], "frame"),
        (&["minimize"], "--a"),
        (&["psi", "--which", "7"], "--which"),
    ];
    for (args, needle) in cases {
        let o = gpvortex(dir.path(), args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn stalled_flow_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let args = with_profile(&[
        "minimize",
        "--a",
        "3",
        "--frame",
        "physical",
        "--init",
        "gaussian",
        "--newton-switch",
        "0",
        "--max-steps",
        "5",
    ]);
    let o = run(dir.path(), &args);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("did not converge"));
}

#[test]
fn reports_are_byte_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = with_profile(&[
        "minimize", "--a", "4", "--lambda", "0.7", "--omega", "0.9", "--frame", "physical", "--init", "gaussian",
        "--out", "u.gpf", "--report", "min.json",
    ]);
    for d in [&a, &b] {
        let o = run(d.path(), &args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for f in ["min.json", "u.gpf"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let r = json(&a.path().join("min.json"));
    assert_eq!(r["config"]["L"], 8.0);
    assert_eq!(r["result"]["field_file"], "u.gpf");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"n": 64, "L": 9.0, "tol": 1e-11}"#).unwrap();
    let o = gpvortex(dir.path(), &["kwong", "--config", "cfg.json", "--L", "8"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["config"]["n"], 64);
    assert_eq!(r["config"]["L"], 8.0);
    assert_eq!(r["config"]["tol"], 1e-11);
    std::fs::write(dir.path().join("bad.json"), r#"{"nn": 64}"#).unwrap();
    let o = gpvortex(dir.path(), &["kwong", "--config", "bad.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("nn"), "{}", stderr(&o));
}

#[test]
fn stored_correctors_and_field_reproduce_direct_verification() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = format!("{}", small_a_star(d) - 5e-2);
    let o = run(d, &with(&["psi", "--lambda", "0.8", "--out-dir", "psi"], &GRID));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let min = with_profile(&[
        "minimize", "--a", &a, "--lambda", "0.8", "--omega", "0.8", "--out", "v.gpf", "--report", "min.json",
    ]);
    let o = run(d, &min);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stored = with(
        &[
            "verify",
            "--a",
            &a,
            "--lambda",
            "0.8",
            "--omega",
            "0.8",
            "--field",
            "v.gpf",
            "--min-report",
            "min.json",
            "--psi-dir",
            "psi",
            "--out",
            "v1.json",
        ],
        &GRID,
    );
    let o = run(d, &stored);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let direct = with(&["verify", "--a", &a, "--lambda", "0.8", "--omega", "0.8", "--out", "v2.json"], &GRID);
    let o = run(d, &direct);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut r1 = json(&d.join("v1.json"))["result"].clone();
    let r2 = json(&d.join("v2.json"))["result"].clone();
    assert_eq!(r1["mu"], r1["mu_min_report"]);
    r1.as_object_mut().unwrap().remove("mu_min_report");
    assert_eq!(r1, r2);

    let wrong = with(
        &["verify", "--a", &a, "--lambda", "0.8", "--omega", "0.5", "--field", "v.gpf", "--min-report", "min.json"],
        &GRID,
    );
    assert_eq!(code(&run(d, &wrong)), 2);
    let mismatch = with(&["verify", "--a", &a, "--lambda", "0.5", "--omega", "0.5", "--psi-dir", "psi"], &GRID);
    let o = run(d, &mismatch);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Lambda"), "{}", stderr(&o));
}

#[test]
fn sweep_writes_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(
        d,
        &with(
            &[
                "sweep",
                "--da-list",
                "1e-1,5e-2,2e-2",
                "--lambda",
                "0.8",
                "--omega",
                "0.8",
                "--csv",
                "s.csv",
                "--report",
                "s.json",
            ],
            &GRID,
        ),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(d.join("s.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "a,eps,mu,beta,beta_over_eps4,c_star_ref,xa_norm,R_resid1,R_resid2,I_resid,vortex_free_radius,decay_C1"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    let r = json(&d.join("s.json"));
    assert_eq!(r["result"]["points"].as_array().unwrap().len(), 3);
    assert!(r["result"]["xa_scaling"]["pass"].as_bool().unwrap());
    let both = with(&["sweep", "--da-list", "1e-1", "--a-list", "11"], &GRID);
    assert_eq!(code(&run(d, &both)), 2);
}
