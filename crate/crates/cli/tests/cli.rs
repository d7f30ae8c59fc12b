use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dbarg(args: &[&str]) -> Output {
    dbarg_env(args, None)
}

fn dbarg_env(args: &[&str], config_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dbarg"));
    cmd.args(args).env_remove("DBARG_CONFIG");
    if let Some(p) = config_env {
        cmd.env("DBARG_CONFIG", p);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> std::path::PathBuf {
    let path = dir.path().join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn radii_of_q_oscillator() {
    let out = dbarg(&["radii", "--psi", "qexp", "--lambda", "1", "--q", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "radii");
    assert!(v["errors"].as_array().unwrap().is_empty());
    let r = &v["results"][0];
    assert_eq!(r["r1"].as_f64(), Some(0.0));
    assert_eq!(r["r2"], "inf");
    assert_eq!(r["class"], "FullPlane");
}

#[test]
fn report_schema_fields() {
    let v = json(&dbarg(&["factorials", "--n", "-2..2"]));
    for key in ["command", "version", "config", "results", "errors"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v.get("wall_clock_seconds").is_none());
    assert_eq!(v["results"].as_array().unwrap().len(), 5);
    let timed = json(&dbarg(&["factorials", "--n", "-2..2", "--timing"]));
    assert!(timed["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn moments_table_matches_factorials() {
    let out = dbarg(&[
        "moments", "--psi", "qexp", "--lambda", "1", "--q", "0.5", "--n", "-6..6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["results"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 13);
    for (row, n) in rows.iter().zip(-6i64..=6) {
        assert_eq!(row["n"].as_i64(), Some(n));
        // M(n)/M(0) = q^{-n(n+1)/2} for λ = 1, q = 1/2
        let expected = 2f64.powf((n * (n + 1)) as f64 / 2.0);
        let m = row["moment"].as_f64().unwrap();
        assert!((m - expected).abs() <= 1e-8 * expected, "n = {n}: {m} vs {expected}");
        assert!(row["rel_err"].as_f64().unwrap() <= 1e-8);
    }
}

#[test]
fn ring_demo_csv_intervals() {
    let out = dbarg(&["ring-demo", "--variant", "exterior", "--q", "2", "--steps", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,lower,upper,excluded_points"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.windows(2).all(|w| w[1].1 > w[0].1));
    assert_eq!(rows[9], (0.0, 1024.0));
}

#[test]
fn ring_demo_disk_upper_is_inf() {
    let out = dbarg(&[
        "ring-demo",
        "--variant",
        "disk",
        "--q",
        "3",
        "--steps",
        "2",
        "--format",
        "json",
    ]);
    let v = json(&out);
    assert_eq!(v["results"][1]["upper"], "inf");
    assert!((v["results"][1]["lower"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-16);
}

#[test]
fn selftest_passes_by_default() {
    let out = dbarg(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 13);
    assert!(results.iter().all(|r| r["passed"] == true));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().filter(|l| l.contains(" PASS ")).count(), 13);
}

#[test]
fn selftest_with_looser_tolerance_still_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "[tolerance]\ntol = 1e-1\n");
    let out = dbarg(&["--config", cfg.to_str().unwrap(), "selftest"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["tolerance"]["tol"].as_f64(), Some(0.1));
}

#[test]
fn selftest_with_tiny_node_cap_reports_no_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "[caps]\nquadrature_nodes = 10\n");
    let out = dbarg_env(&["selftest"], Some(&cfg));
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    let errors = v["errors"].as_array().unwrap();
    assert!(!errors.is_empty());
    assert!(errors
        .iter()
        .all(|e| e["code"] == "QUADRATURE_NO_CONVERGENCE" && e["class"] == "Convergence"));
}

#[test]
fn explicit_config_wins_over_environment() {
    let dir = tempfile::tempdir().unwrap();
    let capped = write_config(&dir, "[caps]\nquadrature_nodes = 10\n");
    let other = dir.path().join("plain.toml");
    std::fs::write(&other, "seed = 7\n").unwrap();
    let out = dbarg_env(
        &["--config", other.to_str().unwrap(), "moments", "--n", "0..1"],
        Some(&capped),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["seed"].as_u64(), Some(7));
}

#[test]
fn output_is_deterministic() {
    let args = ["parseval", "--trials", "4", "--mode", "grid"];
    let a = dbarg(&args);
    let b = dbarg(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "seed = 99\n");
    let c = dbarg(&[
        "--config",
        cfg.to_str().unwrap(),
        "parseval",
        "--trials",
        "4",
        "--mode",
        "grid",
    ]);
    assert_ne!(json(&a)["results"], json(&c)["results"]);
}

#[test]
fn domain_errors_exit_two_with_code() {
    let out = dbarg(&["radii", "--q", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["errors"][0]["code"], "INVALID_SPEC");
    assert_eq!(v["errors"][0]["class"], "Domain");

    let out = dbarg(&["coherent", "--z", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["errors"][0]["code"], "ZERO_POINT");
}

#[test]
fn non_admissible_inverse_mellin_exits_three() {
    let out = dbarg(&[
        "weight", "--psi", "expoly", "--coeffs", "0,0,0,1", "--points", "3", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["errors"][0]["code"], "NON_DECAYING_INTEGRAND");
}

#[test]
fn malformed_arguments_exit_64() {
    for args in [
        vec!["bogus"],
        vec!["moments", "--n", "3..1"],
        vec!["moments", "--n", "x"],
        vec!["coherent", "--z", "1,2,3"],
        vec!["transport", "--choice", "[[1,1],[1,0]]"],
        vec!["radii", "--psi", "custom-table"],
        vec!["selftest", "--only", "99"],
    ] {
        let out = dbarg(&args);
        assert_eq!(out.status.code(), Some(64), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    for text in [
        "[tolerance]\nseries = -1\n",
        "nonsense = true\n",
        "[caps]\nquadrature_nodes = 0\n",
    ] {
        let cfg = write_config(&dir, text);
        let out = dbarg(&["--config", cfg.to_str().unwrap(), "radii"]);
        assert_eq!(out.status.code(), Some(64), "{text}");
    }
}

#[test]
fn csv_has_header_and_plain_decimals() {
    let out = dbarg(&["weight", "--points", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,F");
    assert_eq!(lines.len(), 6);
    for l in &lines[1..] {
        let (x, f) = l.split_once(',').unwrap();
        assert!(x.parse::<f64>().unwrap() > 0.0);
        assert!(f.parse::<f64>().unwrap() >= 0.0);
    }
}

#[test]
fn custom_table_psi() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("psi.csv");
    // ψ(x) = 2^x sampled coarsely; log-linear interpolation is exact here
    std::fs::write(&table, "x,psi\n-4,0.0625\n0,1\n4,16\n").unwrap();
    let t = table.to_str().unwrap();
    let v = json(&dbarg(&[
        "radii",
        "--psi",
        "custom-table",
        "--table",
        t,
        "--limit-neg",
        "0",
        "--limit-pos",
        "inf",
    ]));
    assert_eq!(v["results"][0]["class"], "FullPlane");
    let tab = json(&dbarg(&["kernel", "--psi", "custom-table", "--table", t, "--x", "1"]));
    let q = json(&dbarg(&[
        "kernel", "--psi", "qexp", "--lambda", "1", "--q", "0.5", "--x", "1",
    ]));
    let (a, b) = (
        tab["results"][0]["re"].as_f64().unwrap(),
        q["results"][0]["re"].as_f64().unwrap(),
    );
    assert!((a - b).abs() <= 1e-13 * b);
}

#[test]
fn transport_recursion_holds() {
    let out = dbarg(&["transport", "--choice", "[[1,0],[1,1]]", "--n", "-3..3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["summary"]["max_residual"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn psi_from_gaussian_weight() {
    let out = dbarg(&[
        "psi-from-f",
        "--psi",
        "logpower",
        "--nu",
        "0.5",
        "--order",
        "1",
        "--rho",
        "-1,0,2",
    ]);
    let v = json(&out);
    for row in v["results"].as_array().unwrap() {
        let rho = row["rho"].as_f64().unwrap();
        // exp((2ρ+1)/(4ν)) with ν = 1/2
        let expected = (rho + 0.5).exp();
        assert!((row["psi"].as_f64().unwrap() - expected).abs() <= 1e-10 * expected);
    }
}
