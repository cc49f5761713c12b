use std::path::PathBuf;
use std::process::{Command, Output};

fn mzmesh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzmesh"))
        .args(args)
        .env_remove("MZMESH_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mzmesh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn build_mesh_flat_layers() {
    let json = scratch("mesh.json");
    let o = mzmesh(&[
        "build-mesh",
        "--d",
        "2",
        "--alpha",
        "2",
        "--n",
        "4",
        "--epsilon",
        "1",
        "--c0",
        "2",
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let out = stdout(&o);
    assert!(out.contains("m = 8"), "{out}");
    assert!(out.contains("cells = 64"), "{out}");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["m"], 8);
    assert_eq!(v["cells"].as_array().unwrap().len(), 64);
}

#[test]
fn sanity_passes() {
    let o = mzmesh(&["sanity", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS sanity"));
}

#[test]
fn mz_writes_report_and_summary() {
    let (json, csv) = (scratch("mz.json"), scratch("mz.csv"));
    let o = mzmesh(&[
        "mz",
        "--domain",
        "alpha:1.5",
        "--d",
        "2",
        "--n",
        "8",
        "--p",
        "2",
        "--epsilon",
        "0.25",
        "--seed",
        "7",
        "--ensemble",
        "5",
        "--out-json",
        json.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 7);
    for r in v["records"].as_array().unwrap() {
        let x = r["ratio"].as_f64().unwrap();
        assert!((0.5..=2.0).contains(&x));
    }
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 2);
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    let (a, b) = (scratch("a.json"), scratch("b.json"));
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let o = mzmesh(&[
            "lemma73",
            "--n-list",
            "4,8",
            "--beta",
            "1",
            "--seed",
            "5",
            "--ensemble",
            "4",
            "--threads",
            threads,
            "--out-json",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn invalid_values_exit_2() {
    assert_eq!(
        mzmesh(&[
            "mz",
            "--domain",
            "alpha:1.5",
            "--n",
            "4",
            "--epsilon",
            "1.5"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        mzmesh(&["mz", "--domain", "bogus", "--n", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        mzmesh(&["bernstein", "--domain", "alpha:1.5", "--p", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(mzmesh(&["--n", "4"]).status.code(), Some(2));
    assert_eq!(mzmesh(&["teleport"]).status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "build-mesh", "alpha": 2.0, "d": 2, "n": 4, "epsilon": 0.5}"#,
    )
    .unwrap();
    let o = mzmesh(&[
        "--config",
        cfg.to_str().unwrap(),
        "--epsilon",
        "1",
        "--print-config",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "build-mesh");
    assert_eq!(v["epsilon"], 1.0);
    assert_eq!(v["n"], 4);
    let o = mzmesh(&["--config", cfg.to_str().unwrap(), "--epsilon", "1"]);
    assert!(stdout(&o).contains("cells = 64"));
}

#[test]
fn unknown_config_keys_rejected() {
    let cfg = scratch("bad.json");
    std::fs::write(&cfg, r#"{"command": "sanity", "colour": "blue"}"#).unwrap();
    let o = mzmesh(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn refused_mesh_needs_force() {
    // alpha = 1.25 <= 2 - 2/3 is outside the three-dimensional range
    let o = mzmesh(&[
        "build-mesh",
        "--d",
        "3",
        "--alpha",
        "1.25",
        "--n",
        "2",
        "--epsilon",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = mzmesh(&[
        "build-mesh",
        "--d",
        "3",
        "--alpha",
        "1.25",
        "--n",
        "2",
        "--epsilon",
        "1",
        "--force",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
