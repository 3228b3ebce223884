use std::process::{Command, Output};

fn rnajoint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rnajoint")).args(args).output().expect("spawn rnajoint")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, k: usize) -> Vec<String> {
    csv.lines().skip(1).map(|l| l.split(',').nth(k).unwrap_or("").to_string()).collect()
}

#[test]
fn secondary_sigma1_lambda2() {
    let out = stdout(&rnajoint(&["secondary", "--sigma", "1", "--lambda", "2", "--order", "8"]));
    assert_eq!(column(&out, 1), ["1", "1", "1", "2", "4", "8", "17", "37", "82"]);
}

#[test]
fn secondary_order_zero() {
    assert_eq!(stdout(&rnajoint(&["secondary", "--order", "0"])), "n,count\n0,1\n");
}

#[test]
fn lambda_one_is_a_usage_error() {
    let out = rnajoint(&["secondary", "--sigma", "1", "--lambda", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
}

#[test]
fn low_precision_is_a_usage_error() {
    assert!(!rnajoint(&["asym", "--sigma", "1", "--precision-bits", "32"]).status.success());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert!(!rnajoint(&["joint", "--bogus"]).status.success());
}

#[test]
fn joint_rows_and_determinism() {
    let a = stdout(&rnajoint(&["joint", "--sigma", "2", "--order", "4"]));
    assert!(a.starts_with("s,count\n0,1\n1,2\n"));
    let b = stdout(&rnajoint(&["joint", "--sigma", "2", "--order", "4"]));
    assert_eq!(a, b);
    let big = stdout(&rnajoint(&["joint", "--sigma", "1", "--order", "60"]));
    assert_eq!(big.lines().count(), 62);
}

#[test]
fn joint_matches_validate() {
    let joint = stdout(&rnajoint(&["joint", "--sigma", "2", "--order", "10"]));
    let report = stdout(&rnajoint(&["validate", "--sigma", "2", "--max-size", "10"]));
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 11);
    for (row, count) in rows.iter().zip(column(&joint, 1)) {
        assert_eq!(row["match"], true);
        assert_eq!(row["oracle"].as_str().unwrap(), count);
    }
}

#[test]
fn validate_sigma1_default_size() {
    let out = stdout(&rnajoint(&["validate", "--sigma", "1", "--format", "csv"]));
    assert_eq!(out.lines().count(), 11);
    assert!(column(&out, 4).iter().all(|m| m == "true"));
}

#[test]
fn validate_beyond_cap_fails() {
    assert!(!rnajoint(&["validate", "--sigma", "1", "--max-size", "12"]).status.success());
}

#[test]
fn asym_json_fields() {
    let out = stdout(&rnajoint(&["asym", "--sigma", "2"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let kinv: f64 = v["kappa_inv"].as_str().unwrap().parse().unwrap();
    assert!((kinv - 2.18096).abs() < 1e-5);
    assert_eq!(v["verified_unique"], true);
    assert_eq!(v["precision_bits"], 128);

    let out = stdout(&rnajoint(&["asym", "--sigma", "1"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let c: f64 = v["c"].as_str().unwrap().parse().unwrap();
    assert!((c / 1.38629 - 1.0).abs() < 0.01);
}

#[test]
fn asym_unverified_sigma_warns() {
    let out = rnajoint(&["asym", "--sigma", "6"]);
    let text = stdout(&out);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verified_unique"], false);
    assert!(v["warning"].is_string());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn plot_header_and_ratio() {
    let out = stdout(&rnajoint(&["plot", "--sigma", "2", "--order", "60"]));
    assert_eq!(out.lines().next(), Some("s,exact,asymptotic,ratio"));
    assert!(out.lines().nth(1).unwrap().ends_with(",,"));
    let ratios: Vec<f64> = column(&out, 3).iter().skip(1).map(|r| r.parse().unwrap()).collect();
    assert!((ratios[59] - 1.0).abs() < 0.1);
    assert!((ratios[59] - 1.0).abs() < (ratios[39] - 1.0).abs());
    let joint = stdout(&rnajoint(&["joint", "--sigma", "2", "--order", "60"]));
    assert_eq!(column(&out, 1), column(&joint, 1));
}

#[test]
fn shapes_methods_agree() {
    let closed = stdout(&rnajoint(&["shapes", "--order", "6"]));
    let grammar = stdout(&rnajoint(&["shapes", "--order", "6", "--method", "grammar"]));
    assert_eq!(closed, grammar);
    assert!(closed.starts_with("t,h,a1,a2,count\n"));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("rnajoint-cli-{}.csv", std::process::id()));
    let out = rnajoint(&["joint", "--order", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "s,count\n0,1\n1,2\n2,4\n3,8\n");
    let _ = std::fs::remove_file(path);
}
