use std::path::Path;
use std::process::{Command, Output};

fn steerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steerlab"))
        .args(args)
        .env_remove("STEERLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Column `name` of the first data row of a schema-tagged CSV.
fn field(csv: &str, name: &str) -> String {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# steerlab-schema v1"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    row[i].to_string()
}

#[test]
fn werner_sum_verdict_is_steerable() {
    let o = steerlab(&["verdict", "--state", "werner:p=0.8", "--criterion", "sum"]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert_eq!(field(&out, "steerable"), "true");
    assert_eq!(field(&out, "family"), "werner");
    assert_eq!(field(&out, "source"), "matrix");
}

#[test]
fn vacuum_reid_is_boundary() {
    let o = steerlab(&["verdict", "--state", "tmsv:r=0", "--criterion", "reid", "--grid-n", "41"]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    let ratio: f64 = field(&out, "ratio").parse().unwrap();
    assert!((ratio - 1.0).abs() < 1e-6, "{ratio}");
    assert_eq!(field(&out, "steerable"), "false");
    assert_eq!(field(&out, "grid_n"), "41");
}

#[test]
fn json_verdict_has_core_fields() {
    let o = steerlab(&[
        "verdict", "--state", "tmsv:r=0.5", "--criterion", "sum", "--moments", "analytic", "--format", "json",
    ]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rec = &v[0];
    for key in ["criterion", "lhs", "rhs", "ratio", "steerable"] {
        assert!(rec.get(key).is_some(), "{key}");
    }
    let ratio = rec["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0f64.cosh()).abs() < 1e-12);
}

#[test]
fn parse_errors_exit_2_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let out_s = out.to_str().unwrap();
    for args in [
        vec!["verdict", "--state", "werner:p=1.5", "--criterion", "sum", "--out", out_s],
        vec!["verdict", "--state", "bogus:x=1", "--criterion", "sum", "--out", out_s],
        vec!["verdict", "--state", "werner:p=0.5", "--criterion", "reid", "--out", out_s],
        vec!["sweep", "--family", "werner", "--range", "0:1:0.1", "--criteria", "", "--out", out_s],
        vec!["sweep", "--family", "werner", "--range", "1:0:0.1", "--criteria", "sum", "--out", out_s],
        vec!["sweep", "--family", "werner", "--range", "0:1:0.1", "--out", out_s],
        vec!["table", "psub", "--grid-n", "40", "--out", out_s],
        vec!["certify", "--samples", "10", "--out", out_s],
    ] {
        let o = steerlab(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists(), "{args:?} left a file");
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn werner_sweep_crossings_and_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = steerlab(&[
        "sweep",
        "--family",
        "werner",
        "--range",
        "0:1:0.01",
        "--criteria",
        "sum,entropic",
        "--out",
        out.to_str().unwrap(),
        "--plot-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2 + 2 * 101);

    let first_steerable = |file: &str| -> f64 {
        let data = std::fs::read_to_string(dir.path().join(file)).unwrap();
        let rows: Vec<(f64, f64)> = data
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| {
                let mut it = l.split_whitespace().map(|t| t.parse::<f64>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        assert_eq!(rows.len(), 101);
        rows.iter().find(|(_, ratio)| *ratio > 1.0).unwrap().0
    };
    assert_eq!(first_steerable("werner_sum.dat"), 0.71);
    assert_eq!(first_steerable("werner_entropic.dat"), 0.78);
}

#[test]
fn tmsv_sweep_always_steerable() {
    let o = steerlab(&[
        "sweep", "--family", "tmsv", "--params", "0.1,0.5,1.0", "--criteria", "sum", "--moments", "analytic",
    ]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.contains(",true,")), "{out}");
}

fn table_bytes(dir: &Path, name: &str, threads: &str) -> Vec<u8> {
    let out = dir.join(name);
    let o = Command::new(env!("CARGO_BIN_EXE_steerlab"))
        .args(["table", "lg", "--grid-n", "49", "--out", out.to_str().unwrap()])
        .env("STEERLAB_THREADS", threads)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(out).unwrap()
}

#[test]
fn table_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = table_bytes(dir.path(), "a.csv", "1");
    let b = table_bytes(dir.path(), "b.csv", "1");
    let c = table_bytes(dir.path(), "c.csv", "4");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 2 + 6);
    assert!(text.lines().nth(1).unwrap().starts_with("family,param,reid,entropic,sum,"));
}

#[test]
fn bad_thread_count_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_steerlab"))
        .args(["verdict", "--state", "werner:p=0.8", "--criterion", "sum"])
        .env("STEERLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn certify_emits_report() {
    let o = steerlab(&["certify", "--samples", "2000", "--seed", "5", "--domain", "qubit"]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["samples"], 2000);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["seed"], 5);
    assert!(v["min_slack"].as_f64().unwrap() >= -1e-12);
}

#[test]
fn config_file_is_read_and_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"format": "json", "seed": 11}"#).unwrap();
    let o = steerlab(&["certify", "--samples", "1000", "--config", cfg.to_str().unwrap(), "--seed", "12"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 12);

    let o = steerlab(&["verdict", "--state", "werner:p=0.5", "--criterion", "chsh", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["steerable"], false);
}
