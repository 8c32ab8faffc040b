use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stable-products"))
        .args(args)
        .env("STABLE_PRODUCTS_THREADS", "4")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn stable_table_succeeds() {
    let o = bin(&[
        "stable", "--alpha", "1.5", "--p1", "0.5", "--xmin", "-2", "--xmax", "2", "--points", "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("x,value,method,error_estimate\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn fourier_and_tail_expansion_agree() {
    let get = |method: &str| {
        let o = bin(&[
            "stable", "--alpha", "0.7", "--p1", "0.9", "--xmin", "3", "--xmax", "3", "--points",
            "1", "--method", method, "--json",
        ]);
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["rows"][0]["value"].as_f64().unwrap()
    };
    let (f, a) = (get("fourier"), get("asymptotic"));
    assert!((f / a - 1.0).abs() < 1e-8, "{f} vs {a}");
}

#[test]
fn invalid_parameters_exit_2() {
    let o = bin(&[
        "stable", "--alpha", "1.5", "--p1", "0.9", "--xmin", "0", "--xmax", "1", "--points", "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&[
        "product", "--alpha1", "1.5", "--alpha2", "0.75", "--p1", "0.5", "--q1", "0.5", "--xmin",
        "1", "--xmax", "2", "--points", "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(bin(&["product"]).status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3() {
    let o = bin(&[
        "product",
        "--alpha1",
        "1.5",
        "--alpha2",
        "1.5",
        "--p1",
        "0.6",
        "--q1",
        "0.6",
        "--xmin",
        "0.5",
        "--xmax",
        "1",
        "--points",
        "2",
        "--compare-oracles",
        "--contour-height",
        "0.5",
        "--contour-nodes",
        "64",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn oracle_comparison_is_tight() {
    let o = bin(&[
        "product",
        "--alpha1",
        "0.7",
        "--alpha2",
        "0.6",
        "--p1",
        "0.8",
        "--q1",
        "0.7",
        "--xmin",
        "-3",
        "--xmax",
        "3",
        "--points",
        "7",
        "--compare-oracles",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("0,,unsupported,"));
    let line = text
        .lines()
        .find(|l| l.starts_with("# max_discrepancy="))
        .unwrap();
    let d: f64 = line
        .trim_start_matches("# max_discrepancy=")
        .parse()
        .unwrap();
    assert!(d <= 1e-6, "{d}");
}

#[test]
fn sampling_is_reproducible() {
    let dir = std::env::temp_dir().join(format!("stable-products-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.join(name);
        let o = bin(&[
            "sample",
            "--alpha1",
            "1.5",
            "--alpha2",
            "0.7",
            "--p1",
            "0.6",
            "--q1",
            "0.8",
            "--n",
            "20000",
            "--seed",
            seed,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(summary["n"], 20000);
        std::fs::read(path).unwrap()
    };
    let a = run("a.txt", "11");
    let b = run("b.txt", "11");
    let c = run("c.txt", "12");
    assert_eq!(a, b);
    assert_ne!(a, c);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_with_impossible_tolerance_exits_1() {
    let o = bin(&["verify", "--grid-size", "1", "--tolerance", "1e-20"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], false);
}
