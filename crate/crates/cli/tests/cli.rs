use std::process::{Command, Output};

use serde_json::Value;

fn hilmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilmod"))
        .args(args)
        .env_remove("HILMOD_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hilmod(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(
        hilmod(&["experiment", "witness", "--trunc", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        hilmod(&["experiment", "witness", "--horizon", "40"]).status.code(),
        Some(2)
    );
    assert_eq!(hilmod(&["experiment", "probe", "--op", "shift"]).status.code(), Some(2));
    let o = hilmod(&[
        "experiment",
        "witness",
        "--alg-dim",
        "2",
        "--trunc",
        "8",
        "--horizon",
        "4",
        "--op",
        "proj:2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("compact"));
}

#[test]
fn help_exits_0() {
    let o = hilmod(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
}

#[test]
fn counterexample_csv() {
    let o = hilmod(&["experiment", "counterexample", "--format", "csv", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["k", "norm", "tail", "sampled_sup"]);
    assert_eq!(rows.len(), 13);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], k.to_string());
        let norm: f64 = row[1].parse().unwrap();
        let tail: f64 = row[2].parse().unwrap();
        let sup: f64 = row[3].parse().unwrap();
        assert!((norm - 1.0).abs() < 1e-9);
        assert!(sup * sup <= tail + 1e-9);
    }
}

#[test]
fn witness_json() {
    let o = hilmod(&["experiment", "witness", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tool"], "hilmod");
    assert_eq!(v["passed"], true);
    assert!(v.get("timestamp").is_none());
    let report = &v["report"];
    assert!((report["delta"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(report["steps"].as_array().unwrap().len(), 3);
    let pairwise = report["pairwise"].as_array().unwrap();
    assert!((pairwise[0][1].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-10);
}

#[test]
fn witness_csv_is_pairwise_matrix() {
    let o = hilmod(&["experiment", "witness", "--steps", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["step", "1", "2"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn probe_table() {
    let o = hilmod(&["experiment", "probe", "--format", "csv", "--samples", "100,400"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["samples", "net_size"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "100");
    assert_eq!(rows[0][1], rows[1][1]);
}

#[test]
fn net_on_basis() {
    let o = hilmod(&["net", "--trunc", "16", "--epsilon", "0.5", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["net"]["center_indices"].as_array().unwrap().len(), 16);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("witness.json");
    std::fs::write(
        &config,
        r#"{ "algebra": { "dim": 2 }, "truncation": 16, "steps": 3, "horizon": 10 }"#,
    )
    .unwrap();
    let out = dir.path().join("report.json");
    let o = hilmod(&[
        "experiment",
        "witness",
        "--config",
        config.to_str().unwrap(),
        "--steps",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["truncation"], 16);
    assert_eq!(v["config"]["horizon"], 10);
    assert_eq!(v["report"]["steps"].as_array().unwrap().len(), 2);

    std::fs::write(&config, r#"{ "truncation": 16, "colour": "red" }"#).unwrap();
    let o = hilmod(&["experiment", "witness", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_chain_csv() {
    let o = hilmod(&["verify", "--suite", "chain", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header[..3], ["suite", "name", "value"]);
    assert!(rows.iter().any(|r| r[1].starts_with("tau<=tau2")));
    assert!(rows.iter().all(|r| r[0] == "chain" && r[6] == "true"));
}

#[test]
fn verify_is_reproducible() {
    let a = hilmod(&["verify", "--suite", "separation", "--seed", "7", "--no-timestamp"]);
    let b = hilmod(&["verify", "--suite", "separation", "--seed", "7", "--no-timestamp"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_hilmod"))
            .args(["verify", "--suite", "counterexample", "--no-timestamp"])
            .env("HILMOD_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("many").status.code(), Some(2));
}
