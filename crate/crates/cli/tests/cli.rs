use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn hodgefir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodgefir")).args(args).output().expect("spawn hodgefir")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn toy_file(dir: &Path) -> String {
    let json = stdout(&hodgefir(&["build", "--bundled", "toy"]));
    write(dir, "toy.json", &json)
}

#[test]
fn toy_spectrum_has_expected_labels() {
    let tmp = TempDir::new().unwrap();
    let complex = toy_file(tmp.path());
    let text = stdout(&hodgefir(&["spectrum", "--complex", &complex]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,eigenvalue,label"));
    let labels: Vec<&str> = lines.map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(labels.len(), 10);
    for (label, n) in [("Gradient", 6), ("Curl", 3), ("Harmonic", 1)] {
        assert_eq!(labels.iter().filter(|l| **l == label).count(), n, "{label}");
    }
}

#[test]
fn spectrum_json_and_eigenvectors() {
    let tmp = TempDir::new().unwrap();
    let vecs = tmp.path().join("u.csv");
    let out = hodgefir(&["--format", "json", "spectrum", "--bundled", "toy", "--eigenvectors", vecs.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 10);
    let text = fs::read_to_string(vecs).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert!(text.starts_with("u,v,u0,"));
}

#[test]
fn identity_filter_returns_input() {
    let tmp = TempDir::new().unwrap();
    let complex = toy_file(tmp.path());
    let filter = write(tmp.path(), "id.json", r#"{"h": [1.0]}"#);
    let flow = write(
        tmp.path(),
        "f.csv",
        "u,v,value\n1,2,0.5\n1,3,-1.25\n1,4,2.0\n2,3,3.0\n3,4,0.0\n4,5,1.0\n3,6,-0.75\n5,6,4.5\n5,7,1e-3\n6,7,7.0\n",
    );
    let out_path = tmp.path().join("g.csv");
    stdout(&hodgefir(&["apply", "--complex", &complex, "--filter", &filter, "--flow", &flow, "--out", out_path.to_str().unwrap()]));
    // rows come back in canonical edge order
    let read = |p: &str| -> std::collections::BTreeMap<String, f64> {
        let text = fs::read_to_string(p).unwrap();
        text.lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (format!("{}-{}", f[0], f[1]), f[2].parse().unwrap())
            })
            .collect()
    };
    assert_eq!(read(out_path.to_str().unwrap()), read(&flow));
}

#[test]
fn design_then_response() {
    let tmp = TempDir::new().unwrap();
    let spec = write(tmp.path(), "spec.json", r#"{"gradient": 1.0, "curl": 0.0, "harmonic": 0.0}"#);
    let filter = tmp.path().join("filter.json");
    let report = tmp.path().join("report.json");
    stdout(&hodgefir(&[
        "design", "--bundled", "toy", "--spec", &spec, "--family", "sv", "--l1", "6", "--l2", "0",
        "--out", filter.to_str().unwrap(), "--report", report.to_str().unwrap(),
    ]));
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(rep["residual"].as_f64().unwrap() < 1e-8);

    let text = stdout(&hodgefir(&["response", "--bundled", "toy", "--filter", filter.to_str().unwrap()]));
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let want = if f[1] == "Gradient" { 1.0 } else { 0.0 };
        assert!((f[2].parse::<f64>().unwrap() - want).abs() < 1e-8, "{line}");
    }
}

#[test]
fn design_rejects_mismatched_length_flags() {
    let tmp = TempDir::new().unwrap();
    let spec = write(tmp.path(), "spec.json", r#"{"gradient": 1.0}"#);
    let out = hodgefir(&["design", "--bundled", "toy", "--spec", &spec, "--family", "fir", "--l1", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_recovers_filter_from_pairs() {
    let tmp = TempDir::new().unwrap();
    let pairs = tmp.path().join("pairs");
    fs::create_dir(&pairs).unwrap();
    let filter = write(tmp.path(), "f.json", r#"{"h": [0.5, -0.25]}"#);
    let edges = ["1,2", "1,3", "1,4", "2,3", "3,4", "4,5", "3,6", "5,6", "5,7", "6,7"];
    for k in 0..3 {
        let body: String = edges.iter().enumerate().map(|(i, e)| format!("{e},{}\n", ((i * 7 + k * 3) % 11) as f64 - 5.0)).collect();
        let input = write(&pairs, &format!("p{k}_in.csv"), &format!("u,v,value\n{body}"));
        let out = pairs.join(format!("p{k}_out.csv"));
        stdout(&hodgefir(&["apply", "--bundled", "toy", "--filter", &filter, "--flow", &input, "--out", out.to_str().unwrap()]));
    }
    let text = stdout(&hodgefir(&["fit", "--bundled", "toy", "--pairs", pairs.to_str().unwrap(), "--family", "fir", "--length", "2"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let h: Vec<f64> = v["h"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((h[0] - 0.5).abs() < 1e-9 && (h[1] + 0.25).abs() < 1e-9, "{h:?}");
}

#[test]
fn predict_report_has_ten_rows_and_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let complex = write(tmp.path(), "sf.json", &stdout(&hodgefir(&["build", "--bundled", "sioux-falls"])));
    let run = |dir: &str| {
        let out = tmp.path().join(dir);
        stdout(&hodgefir(&["experiment", "predict", "--complex", &complex, "--seed", "7", "--out", out.to_str().unwrap()]));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let report = fs::read_to_string(a.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "l_total,e1,e2");
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("1,") && lines[1].ends_with(",--"));
    for name in ["report.csv", "report.json", "curve_prediction.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn extract_and_denoise_write_reports() {
    let tmp = TempDir::new().unwrap();
    let ex = tmp.path().join("ex");
    stdout(&hodgefir(&["experiment", "extract", "--bundled", "toy", "--lengths", "2,10", "--out", ex.to_str().unwrap()]));
    let report = fs::read_to_string(ex.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 1 + 3 * 2 * 2);
    assert!(ex.join("curve_extract_gradient.csv").exists());

    let dn = tmp.path().join("dn");
    stdout(&hodgefir(&["experiment", "denoise", "--bundled", "toy", "--trials", "10", "--out", dn.to_str().unwrap()]));
    let report = fs::read_to_string(dn.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 6);
    assert!(dn.join("curve_denoise.csv").exists());
}

#[test]
fn fill_triangles_emits_filled_complex() {
    let tmp = TempDir::new().unwrap();
    let c = write(tmp.path(), "c.json", r#"{"nodes": [1, 2, 3, 4], "edges": [[1, 2], [2, 3], [1, 3], [3, 4]]}"#);
    let text = stdout(&hodgefir(&["fill-triangles", "--complex", &c]));
    assert_eq!(text, "u,v,w,filled\n1,2,3,false\n");
    let text = stdout(&hodgefir(&["fill-triangles", "--complex", &c, "--emit-complex"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["triangles"].as_array().unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(hodgefir(&["spectrum", "--bundled", "toy", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(hodgefir(&["spectrum"]).status.code(), Some(1));
    assert_eq!(hodgefir(&["--tol-zero", "2", "spectrum", "--bundled", "toy"]).status.code(), Some(1));
    assert_eq!(hodgefir(&["spectrum", "--complex", "/no/such/file.json"]).status.code(), Some(2));

    let bad = write(tmp.path(), "bad.json", r#"{"nodes": [1, 2], "edges": [[1, 1]]}"#);
    let out = hodgefir(&["build", "--complex", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "data");

    let mixed = write(tmp.path(), "mixed.json", r#"{"h": [1.0], "h0": 1.0}"#);
    assert_eq!(hodgefir(&["response", "--bundled", "toy", "--filter", &mixed]).status.code(), Some(2));
    assert!(hodgefir(&["--help"]).status.success());
    assert!(hodgefir(&["experiment", "predict", "--help"]).status.success());
}

#[test]
fn failed_run_leaves_no_output() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("g.csv");
    let filter = write(tmp.path(), "id.json", r#"{"h": [1.0]}"#);
    let flow = write(tmp.path(), "f.csv", "u,v,value\n1,9,1.0\n");
    let res = hodgefir(&["apply", "--bundled", "toy", "--filter", &filter, "--flow", &flow, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 2);
}
