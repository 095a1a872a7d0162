use std::path::Path;
use std::process::{Command, Output};

use dyadic::io::read_kernel;
use dyadic::kernel::{gaussian, DEFAULT_WINDOW};

fn dyadic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyadic")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = dyadic(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_writes_a_loadable_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("g.json");
    ok(&["kernel", "build", "--type", "gaussian", "--t", "1", "--out", path(&k)]);
    assert_eq!(read_kernel(&k).unwrap(), gaussian(1.0, DEFAULT_WINDOW).unwrap());
    let raw: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&k).unwrap()).unwrap();
    assert_eq!(raw["j_lo"], -30);
    assert_eq!(raw["j_hi"], 30);
    assert_eq!(raw["lambda"].as_array().unwrap().len(), 61);
}

#[test]
fn convert_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("s.json");
    ok(&["kernel", "build", "--type", "step", "--window", "-3:3", "--out", path(&k)]);
    let all = ok(&["kernel", "convert", "--in", path(&k)]);
    let mut lines = all.lines();
    assert_eq!(lines.next(), Some("j,lambda,alpha,k,stab"));
    assert_eq!(lines.count(), 9);
    let only_k = ok(&["kernel", "convert", "--in", path(&k), "--show", "k"]);
    assert!(only_k.starts_with("j,k\n"));
}

#[test]
fn convolve_adds_heat_times() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    ok(&["kernel", "build", "--type", "gaussian", "--t", "0.5", "--out", path(&a)]);
    ok(&["kernel", "build", "--type", "gaussian", "--t", "1.5", "--out", path(&b)]);
    ok(&["kernel", "convolve", "--a", path(&a), "--b", path(&b), "--out", path(&c)]);
    let got = read_kernel(&c).unwrap();
    let want = gaussian(2.0, DEFAULT_WINDOW).unwrap();
    for j in -30..=30 {
        assert!((got.lambda(j) - want.lambda(j)).abs() <= 1e-12, "j = {j}");
    }
}

#[test]
fn stability_and_psi_print_json() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("p.json");
    ok(&["kernel", "build", "--type", "powerlaw", "--sigma", "0.6666666666666666", "--out", path(&k)]);
    let report: serde_json::Value = serde_json::from_str(&ok(&["stability", "--in", path(&k)])).unwrap();
    assert!((report["sigma_estimate"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-5);
    assert_eq!(report["converged"], true);
    let psi: serde_json::Value = serde_json::from_str(&ok(&["psi", "--r", "1"])).unwrap();
    assert!((psi["psi"].as_f64().unwrap() - 0.360_326_700_716_256_3).abs() < 1e-15);
}

#[test]
fn clt_writes_csv_tables() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.json");
    let out = dir.path().join("report.csv");
    ok(&["kernel", "build", "--type", "powerlaw", "--sigma", "0.6666666666666666", "--out", path(&seed)]);
    ok(&["clt", "--seed", path(&seed), "--imax", "8", "--out", path(&out)]);
    let rows = std::fs::read_to_string(&out).unwrap();
    let mut lines = rows.lines();
    assert_eq!(lines.next(), Some("i,j,lambda_mi,target,abs_err,gamma"));
    assert_eq!(lines.count(), 8 * 13);
    let lp = std::fs::read_to_string(dir.path().join("report_lp.csv")).unwrap();
    let mut lines = lp.lines();
    assert_eq!(lines.next(), Some("i,p,lp_err"));
    assert_eq!(lines.count(), 8 * 3);
}

#[test]
fn clt_json_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.json");
    ok(&["kernel", "build", "--type", "gaussian", "--t", "1", "--out", path(&seed)]);
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(&["clt", "--seed", path(&seed), "--format", "json", "--jrange", "-3:3", "--out", path(&out)]);
        std::fs::read(out).unwrap()
    };
    let first = run("a.json");
    assert_eq!(first, run("b.json"));
    let report: serde_json::Value = serde_json::from_slice(&first).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 20 * 7);
    assert!(rows.iter().all(|r| r["abs_err"].as_f64().unwrap() <= 1e-12));
}

#[test]
fn solve_round_trips_grid_functions() {
    let dir = tempfile::tempdir().unwrap();
    let u0 = dir.path().join("u0.csv");
    let u = dir.path().join("u.csv");
    std::fs::write(&u0, "cell_index,value\n0,1\n1,-1\n2,0\n3,0\n").unwrap();
    std::fs::write(dir.path().join("u0.json"), "{\"Jd\": 1, \"Jr\": 1}").unwrap();
    ok(&["solve", "--s", "1", "--t", "0", "--u0", path(&u0), "--out", path(&u)]);
    let text = std::fs::read_to_string(&u).unwrap();
    assert!(text.starts_with("cell_index,value\n0,1.0000000000000000e0\n1,-1.0000000000000000e0\n"));
    assert!(dir.path().join("u.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(dyadic(&["stability", "--in", path(&missing)]).status.code(), Some(3));
    let k = dir.path().join("k.json");
    assert_eq!(dyadic(&["kernel", "build", "--type", "powerlaw", "--sigma", "3", "--out", path(&k)]).status.code(), Some(2));
    assert_eq!(dyadic(&["psi", "--r", "-1"]).status.code(), Some(2));
    ok(&["kernel", "build", "--type", "gaussian", "--t", "2", "--out", path(&k)]);
    let out = dir.path().join("r.csv");
    let gated = dyadic(&["clt", "--seed", path(&k), "--t", "1", "--out", path(&out)]);
    assert_eq!(gated.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&gated.stderr).contains("error"));
    ok(&["clt", "--seed", path(&k), "--t", "1", "--assume-stable", "--imax", "2", "--out", path(&out)]);
}
