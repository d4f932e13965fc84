use std::process::Command;

use serde_json::Value;

fn quartic(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_quartic"));
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("QUARTIC_")) {
        cmd.env_remove(k);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn count_prints_exact_value() {
    let (code, out, _) = quartic(&["count", "--n", "5", "--t", "6,6,6,7,7"], &[]);
    assert_eq!(code, 0);
    assert_eq!(out, "795\n");
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["count", "--nope"][..], &["frobnicate"], &["pearcey", "--a", "x", "--b", "1"], &["verify", "--suite", "none"]] {
        let (code, out, err) = quartic(args, &[]);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty() && !err.is_empty());
    }
    assert_eq!(quartic(&["count", "--t", "1,1"], &[("QUARTIC_FORMAT", "yaml")]).0, 2);
}

#[test]
fn numeric_failure_exits_one() {
    let (code, _, err) = quartic(&["count", "--n", "9", "--t", "20"], &[]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
    let (code, out, _) = quartic(&["verify", "--suite", "det"], &[]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
}

#[test]
fn verify_suite_passes() {
    let (code, out, _) = quartic(&["verify", "--suite", "utilities", "--format", "json"], &[]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["results"][0]["id"], 13);
    assert!(v["results"][0]["reference"].is_string());
}

#[test]
fn pearcey_json_fields() {
    let (code, out, _) = quartic(&["pearcey", "--a", "-24", "--b", "14", "--k", "0", "--format", "json"], &[]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let r = &v["results"][0];
    assert!((r["direct"].as_f64().unwrap() - 1.01e-5).abs() < 0.02e-5);
    assert!((r["saddle"].as_f64().unwrap() - 1.047e-5).abs() < 0.01e-5);
    assert!((r["ratio"].as_f64().unwrap() - 1.03).abs() < 0.01);
}

#[test]
fn json_output_is_byte_identical() {
    let args = ["partition", "--e", "1,1.1,1.2", "--samples", "20000", "--format", "json"];
    let a = quartic(&args, &[]);
    let b = quartic(&args, &[]);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(v["seed"], 42);
}

#[test]
fn seed_precedence() {
    let args = ["volume", "--h", "0.5,0.5,0.5,0.5", "--samples", "5000", "--format", "json"];
    let seed_of = |out: &str| serde_json::from_str::<Value>(out).unwrap()["seed"].as_u64().unwrap();
    let path = std::env::temp_dir().join(format!("quartic-test-{}.cfg", std::process::id()));
    std::fs::write(&path, "seed = 7\nformat = csv\n").unwrap();
    let cfg = path.to_str().unwrap();
    let (_, out, _) = quartic(&["volume", "--h", "0.5,0.5,0.5,0.5", "--samples", "5000", "--config", cfg], &[]);
    assert!(out.starts_with("n,dimension,exact,mc,"));
    let mut with_cfg = args.to_vec();
    with_cfg.extend(["--config", cfg]);
    assert_eq!(seed_of(&quartic(&with_cfg, &[]).1), 7);
    assert_eq!(seed_of(&quartic(&with_cfg, &[("QUARTIC_SEED", "8")]).1), 8);
    with_cfg.extend(["--seed", "9"]);
    assert_eq!(seed_of(&quartic(&with_cfg, &[("QUARTIC_SEED", "8")]).1), 9);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn csv_has_header() {
    let (code, out, _) = quartic(&["orthopoly", "--n", "3", "--format", "csv"], &[]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "m,r,band_lower,band_upper,in_band,h");
    assert_eq!(lines.len(), 4);
}
