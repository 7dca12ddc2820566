//! End-to-end checks of the command-line surface: file formats, exit codes
//! and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_constrank")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("constrank-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn emit(dir: &Path, name: &str, n: usize) -> PathBuf {
    let path = dir.join(format!("{name}{n}.json"));
    run_ok(&[
        "opzoo",
        "emit",
        "--name",
        name,
        "--n",
        &n.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    path
}

#[test]
fn opzoo_emit_div_matches_documented_shape() {
    let text = run_ok(&["opzoo", "emit", "--name", "div", "--n", "2"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["dim_domain"], 2);
    assert_eq!(v["dim_codomain"], 1);
}

#[test]
fn opzoo_unknown_name_errors() {
    let out = run(&["opzoo", "emit", "--name", "nope", "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn crank_check_laplacian_reports_witness() {
    let dir = tmpdir("crank");
    let lap = emit(&dir, "laplacian", 2);
    let text = run_ok(&["crank", "check", "--op", lap.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["constant_over_c"]["verdict"], "no");
    let witness = v["constant_over_c"]["witness"].as_array().unwrap();
    assert_eq!(witness.len(), 2);
}

#[test]
fn crank_ellipticity_symgrad() {
    let dir = tmpdir("ellip");
    let sg = emit(&dir, "symgrad", 2);
    let text = run_ok(&["crank", "ellipticity", "--op", sg.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["c_elliptic"], true);
}

#[test]
fn factor_kernel_eq_exit_codes() {
    let dir = tmpdir("keq");
    let lap = emit(&dir, "laplacian", 2);
    let bilap = emit(&dir, "bilaplacian", 2);
    let out = run(&[
        "factor",
        "kernel-eq",
        "--b",
        lap.to_str().unwrap(),
        "--bt",
        bilap.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "equal");
}

#[test]
fn factor_through_strict_laplacian_errors() {
    let dir = tmpdir("fthrough");
    let lap = emit(&dir, "laplacian", 2);
    let bilap = emit(&dir, "bilaplacian", 2);
    let out = run(&[
        "factor",
        "through",
        "--a1",
        lap.to_str().unwrap(),
        "--a2",
        bilap.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("constant rank"), "stderr: {err}");
}

#[test]
fn nullsatz_certify_verify_round_trip() {
    let dir = tmpdir("nullsatz");
    // div system in the d x l file orientation
    let system = serde_json::json!({
        "n": 2, "rows": 2, "cols": 1,
        "entries": [
            [ {"n": 2, "terms": [{"exp": [1, 0], "coeff": "1"}]} ],
            [ {"n": 2, "terms": [{"exp": [0, 1], "coeff": "1"}]} ]
        ]
    });
    let b = serde_json::json!([
        {"n": 2, "terms": [{"exp": [2, 0], "coeff": "1"}]},
        {"n": 2, "terms": [{"exp": [1, 1], "coeff": "1"}]}
    ]);
    let q = serde_json::json!({"n": 2, "terms": [{"exp": [0, 1], "coeff": "1"}]});
    let p_path = dir.join("p.json");
    let b_path = dir.join("b.json");
    let q_path = dir.join("q.json");
    let c_path = dir.join("cert.json");
    std::fs::write(&p_path, system.to_string()).unwrap();
    std::fs::write(&b_path, b.to_string()).unwrap();
    std::fs::write(&q_path, q.to_string()).unwrap();
    run_ok(&[
        "nullsatz",
        "certify",
        "--p",
        p_path.to_str().unwrap(),
        "--b",
        b_path.to_str().unwrap(),
        "--q",
        q_path.to_str().unwrap(),
        "--out",
        c_path.to_str().unwrap(),
    ]);
    let out = run(&["nullsatz", "verify", "--cert", c_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "certificate must replay");

    // tamper with the certificate: drop m by one if possible, else patch h
    let mut file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&c_path).unwrap()).unwrap();
    file["certificate"]["h"][0]["terms"] = serde_json::json!([
        {"exp": [5, 0], "coeff": "7"}
    ]);
    let bad = dir.join("bad.json");
    std::fs::write(&bad, file.to_string()).unwrap();
    let out = run(&["nullsatz", "verify", "--cert", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "tampered certificate must fail");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tmpdir("determinism");
    let sg = emit(&dir, "devsymgrad", 3);
    let r1 = run_ok(&["crank", "check", "--op", sg.to_str().unwrap(), "--seed", "42"]);
    let r2 = run_ok(&["crank", "check", "--op", sg.to_str().unwrap(), "--seed", "42"]);
    assert_eq!(r1, r2);
    let lap = emit(&dir, "laplacian", 2);
    let k1 = run_ok(&["factor", "kernel-eq", "--b", lap.to_str().unwrap(), "--bt", lap.to_str().unwrap()]);
    let k2 = run_ok(&["factor", "kernel-eq", "--b", lap.to_str().unwrap(), "--bt", lap.to_str().unwrap()]);
    assert_eq!(k1, k2);
}

#[test]
fn poincare_solve_small_grid() {
    use constrank::poincare2d::csv::{write_grid_csv, write_traces_csv};
    use constrank::poincare2d::{GridField, Traces};
    let dir = tmpdir("poincare");
    let u_fn = |x1: f64, x2: f64| vec![x1.exp() * x2.sin() + 3.0 * x1 * x1, x1.exp() * x2.cos()];
    let grid = GridField::from_fn(32, 2, u_fn);
    let traces = Traces::from_fn(256, 2, u_fn);
    let u_path = dir.join("u.csv");
    let t_path = dir.join("traces.csv");
    write_grid_csv(&u_path, &grid).unwrap();
    write_traces_csv(&t_path, &traces).unwrap();
    let grad = emit(&dir, "gradient", 2);
    let curl = emit(&dir, "curl", 2);
    let v_path = dir.join("v.csv");
    let r_path = dir.join("report.json");
    run_ok(&[
        "poincare",
        "solve",
        "--a",
        grad.to_str().unwrap(),
        "--b",
        curl.to_str().unwrap(),
        "--u",
        u_path.to_str().unwrap(),
        "--traces",
        t_path.to_str().unwrap(),
        "--n",
        "32",
        "--out",
        v_path.to_str().unwrap(),
        "--report",
        r_path.to_str().unwrap(),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&r_path).unwrap()).unwrap();
    let interior = report["diagnostics"]["interior_rel_l2"].as_f64().unwrap();
    assert!(interior < 0.2, "interior error {interior}");
    assert!(v_path.exists());
}
