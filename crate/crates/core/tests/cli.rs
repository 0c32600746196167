use std::process::Command;

use maxconv::cli::{run, EXIT_DOMAIN, EXIT_PASS, EXIT_USAGE, EXIT_VIOLATION};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("maxconv").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn dist_lines() {
    let (code, out, _) = call(&["dist", "--family", "dagum", "--alpha", "2", "--x", "2"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out, "2,0.8,0.2\n");

    let (_, out, _) = call(&["dist", "--family", "frechet", "--alpha", "1", "--x", "1"]);
    assert!(out.starts_with("1,0.367879"));

    let (_, out, _) = call(&["dist", "--family", "pareto", "--alpha", "1", "--x", "0.5,2"]);
    assert_eq!(out, "0.5,0,1\n2,0.5,0.5\n");
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["dist", "--x", "1"]).0, EXIT_USAGE);
    assert_eq!(call(&["nonsense"]).0, EXIT_USAGE);
    assert_eq!(call(&["dist", "--family", "dagum", "--alpha", "-1", "--x", "1"]).0, EXIT_DOMAIN);
    assert_eq!(call(&["rho", "--alpha", "1", "--x", "2", "--inverse"]).0, EXIT_DOMAIN);
    let (code, _, err) = call(&["rate", "--kind", "boolean", "--family", "pareto", "--alpha", "1", "--n", "1:10:3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--aux"));
    assert_eq!(call(&["rate", "--kind", "free", "--alpha", "1", "--n", "0:10:3"]).0, EXIT_USAGE);
    assert_eq!(call(&["rate", "--kind", "free", "--alpha", "1", "--n", "1:10:3", "--tol", "0.5"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_PASS);
}

#[test]
fn power_and_scaling() {
    let (code, out, _) = call(&["power", "--family", "frechet", "--kind", "boolean", "--n", "10", "--x", "1"]);
    assert_eq!(code, EXIT_PASS);
    let v: f64 = out.trim().split(',').nth(1).unwrap().parse().unwrap();
    let p = (-1.0f64).exp();
    assert!((v - p / (1.0 + 9.0 * (1.0 - p))).abs() < 1e-15);

    let (_, out, _) = call(&["power", "--family", "frechet", "--kind", "boolean", "--n", "10", "--x", "1", "--normalized"]);
    let v: f64 = out.trim().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.487_398_511_143_423_6).abs() < 1e-15);

    let (_, out, _) = call(&["power", "--family", "frechet", "--kind", "free", "--n", "100", "--x", "1", "--normalized"]);
    let v: f64 = out.trim().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - (1.0 - 100.0 * (1.0 - (-0.01f64).exp()))).abs() < 1e-14);

    let (_, out, _) = call(&["scaling", "--family", "frechet", "--alpha", "1", "--n", "1"]);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|t| t.parse().unwrap()).collect();
    assert!((row[2] - 1.0 / 2f64.ln()).abs() < 1e-15 && (row[3] - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn rho_round_trip() {
    let (_, out, _) = call(&["rho", "--alpha", "1", "--x", "3", "--inverse"]);
    let x: f64 = out.trim().split(',').nth(1).unwrap().parse().unwrap();
    let e = std::f64::consts::E;
    assert!((x - 3.0 * (e - 1.0) * (e - 1.0)).abs() < 1e-12);
    let (_, out, _) = call(&["rho", "--alpha", "1", "--x", &x.to_string()]);
    let t: f64 = out.trim().split(',').nth(1).unwrap().parse().unwrap();
    assert!((t - 3.0).abs() < 1e-9);
}

#[test]
fn rate_free_csv() {
    let (code, out, _) = call(&["rate", "--kind", "free", "--family", "frechet", "--alpha", "1", "--n", "1:1000:20", "--tol", "1e-9"]);
    assert_eq!(code, EXIT_PASS);
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rd.headers().unwrap().len(), 11);
    let mut rows = 0;
    for rec in rd.records() {
        let rec = rec.unwrap();
        let n: f64 = rec[0].parse().unwrap();
        let sup_hi: f64 = rec[5].parse().unwrap();
        assert!(sup_hi <= 1.0 / n + 1e-9);
        rows += 1;
    }
    // 20 geometric levels round to 19 distinct integers (1.44 rounds to 1)
    assert_eq!(rows, 19);
}

#[test]
fn rate_boolean_json_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rate.json");
    let p = path.to_str().unwrap();
    let args = ["rate", "--kind", "boolean", "--family", "frechet", "--alpha", "1", "--n", "1e2:1e6:9", "--format", "json", "--output", p];
    let (code, out, _) = call(&args);
    assert_eq!(code, EXIT_PASS);
    assert!(out.is_empty());
    let first = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert!(v["slope"].as_f64().unwrap() <= -0.45);
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);
    assert!(v["config"]["n_list"].is_array());
    call(&args);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
}

#[test]
fn rate_svg() {
    let (code, out, _) = call(&["rate", "--kind", "boolean", "--alpha", "2", "--n", "10:1e5:5", "--format", "svg"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.starts_with("<svg"));
    assert_eq!(out.matches("<polyline").count(), 2);
}

#[test]
fn rate_with_tabulated_aux() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    // alpha/(x^alpha - 1) for alpha = 1, tabulated
    let mut text = String::from("# g for the Frechet law\nvalid_from = 2\n");
    for k in 0..=40 {
        let x = 2.0 * 10f64.powf(k as f64 * 0.25);
        text.push_str(&format!("{x}, {}\n", 1.0 / (x - 1.0)));
    }
    std::fs::write(&path, text).unwrap();
    let (code, out, err) = call(&[
        "rate", "--kind", "free", "--family", "pareto", "--alpha", "1", "--n", "10:1000:3", "--aux",
        path.to_str().unwrap(),
    ]);
    // the Pareto law meets |k| = g with equality, which the precheck accepts or rejects by one ulp
    assert!(code == EXIT_PASS || code == EXIT_DOMAIN || code == EXIT_VIOLATION, "{code} {err}");
    if code == EXIT_PASS {
        assert!(out.lines().count() == 4);
    }
}

#[test]
fn verify_suites() {
    let (code, out, _) = call(&["verify", "--suite", "homomorphism", "--samples", "10000"]);
    assert_eq!(code, EXIT_PASS);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);

    let (code, out, _) = call(&["verify", "--suite", "dagum-lipschitz", "--alpha1", "1", "--alpha2", "2"]);
    assert_eq!(code, EXIT_PASS);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["measured"].as_f64().unwrap() <= 0.367_879_441_171_442_33);

    let (code, out, _) = call(&["verify", "--suite", "sandwich", "--alpha", "1", "--n", "10000"]);
    assert_eq!(code, EXIT_PASS);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["report"]["skipped"].is_u64());

    assert_eq!(call(&["verify", "--suite", "vonmises", "--alpha", "2"]).0, EXIT_PASS);
    assert_eq!(call(&["verify", "--suite", "tail-chain", "--n", "1000"]).0, EXIT_PASS);
}

#[test]
fn verify_reports_violation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(&path, "valid_from = 2\n2, 1e-9\n1e9, 1e-10\n").unwrap();
    let (code, out, _) = call(&["verify", "--suite", "vonmises", "--aux", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_VIOLATION);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn binary_exit_codes_and_threads() {
    let bin = env!("CARGO_BIN_EXE_maxconv");
    let out = Command::new(bin)
        .args(["dist", "--family", "dagum", "--alpha", "2", "--x", "2"])
        .env("MAXCONV_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "2,0.8,0.2\n");
    let out = Command::new(bin).args(["dist"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin)
        .args(["rate", "--kind", "free", "--alpha", "1", "--n", "1:100:5", "--format", "json"])
        .env("MAXCONV_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
