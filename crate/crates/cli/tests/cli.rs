use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ptqkr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptqkr"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn body(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn free_rotor_spectrum_is_real() {
    let dir = tempfile::tempdir().unwrap();
    let out = ptqkr(&[
        "spectrum",
        "--k",
        "0",
        "--N",
        "1",
        "--M",
        "5",
        "--out",
        arg(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = body(&dir.path().join("spectrum.csv"));
    assert_eq!(rows[0], "index,re_eps,im_eps,is_real");
    assert_eq!(rows.len(), 6);
    assert!(rows[1..].iter().all(|r| r.ends_with(",1")));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["P"], 1.0);
    assert_eq!(summary["D"], 5);
}

#[test]
fn csv_header_carries_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = ptqkr(&[
        "spectrum",
        "--N",
        "1",
        "--M",
        "7",
        "--k",
        "2.5",
        "--lambda",
        "1e-3",
        "--out",
        arg(dir.path()),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let params = text.lines().find(|l| l.starts_with("# params: ")).unwrap();
    let record: serde_json::Value = serde_json::from_str(&params["# params: ".len()..]).unwrap();
    assert_eq!(record["params"]["k"], 2.5);
    assert_eq!(record["params"]["lambda"], 1e-3);
    assert_eq!(record["params"]["M"], 7);
}

#[test]
fn missing_required_flag_exits_2_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = ptqkr(&["spectrum", "--M", "5", "--k", "1", "--out", arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--N"), "{err}");
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn invalid_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // gcd(N, M) = 2
    let out = ptqkr(&[
        "spectrum",
        "--N",
        "2",
        "--M",
        "4",
        "--k",
        "1",
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = ptqkr(&[
        "spectrum",
        "--N",
        "1",
        "--M",
        "5",
        "--k",
        "1e3",
        "--lambda",
        "1",
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_class_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = ptqkr(&["baseline", "--class", "AII", "--out", arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"N": 1, "M": 9, "k": 3.0, "lambda": 0.5}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = ptqkr(&[
        "spectrum",
        "--config",
        arg(&cfg),
        "--lambda",
        "0",
        "--out",
        arg(&out_dir),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = body(&out_dir.join("spectrum.csv"));
    assert_eq!(rows.len(), 10);
    assert!(rows[1..].iter().all(|r| r.ends_with(",1")));
}

#[test]
fn phase_zero_lambda_column_is_unbroken() {
    let dir = tempfile::tempdir().unwrap();
    let out = ptqkr(&[
        "phase",
        "--N",
        "1",
        "--M",
        "21",
        "--k-min-exp",
        "0",
        "--k-max-exp",
        "3",
        "--k-points",
        "3",
        "--lambda-min-exp",
        "-6",
        "--lambda-max-exp",
        "-2",
        "--lambda-points",
        "2",
        "--with-zero-lambda",
        "--out",
        arg(dir.path()),
    ]);
    assert!(out.status.success());
    let rows = body(&dir.path().join("phase.csv"));
    assert_eq!(rows[0], "k,lambda,P,n_real,D,tol_real");
    let zero: Vec<&String> = rows[1..]
        .iter()
        .filter(|r| r.split(',').nth(1) == Some("0e0"))
        .collect();
    assert_eq!(zero.len(), 3);
    assert!(zero.iter().all(|r| r.split(',').nth(2) == Some("1e0")));
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn stats_output_is_byte_identical_across_cache_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let base = [
        "stats",
        "--N",
        "1",
        "--M",
        "61",
        "--k",
        "40",
        "--lambda",
        "1e-3",
        "--q",
        "0.001",
        "--ensemble",
        "kwindow",
        "--k-half-width",
        "4",
        "--subset",
        "all",
    ];
    let runs = [
        ("cold", vec!["--workers", "1", "--cache", arg(&cache)]),
        ("warm", vec!["--workers", "3", "--cache", arg(&cache)]),
        ("nocache", vec!["--workers", "2"]),
    ];
    let mut outputs = Vec::new();
    for (name, extra) in &runs {
        let out_dir = dir.path().join(name);
        let mut args: Vec<&str> = base.to_vec();
        args.extend(extra.iter().copied());
        args.extend(["--out", arg(&out_dir)]);
        let out = ptqkr(&args);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(read_all(&out_dir));
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    assert!(fs::read_dir(&cache).unwrap().count() > 0);
}

#[test]
fn baseline_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str, workers: &str| {
        let out_dir = dir.path().join(name);
        let out = ptqkr(&[
            "baseline",
            "--class",
            "GOE",
            "--class",
            "AIdagger",
            "--n",
            "64",
            "--count",
            "4",
            "--seed",
            seed,
            "--workers",
            workers,
            "--out",
            arg(&out_dir),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        read_all(&out_dir)
    };
    let a = run("a", "7", "1");
    let b = run("b", "7", "2");
    let c = run("c", "8", "1");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let rows = body(&dir.path().join("a").join("baseline.csv"));
    assert_eq!(rows[0], "kind,n,count,r_mean,r_stderr");
    assert!(rows[1].starts_with("GOE,64,4,"));
    assert!(rows[2].starts_with("AIdagger,64,4,"));
}

#[test]
fn transition_reports_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = ptqkr(&[
        "transition",
        "--N",
        "1",
        "--M",
        "41",
        "--k",
        "200",
        "--q",
        "0.001",
        "--lambda-min-exp",
        "-6",
        "--lambda-max-exp",
        "-2",
        "--lambda-points",
        "3",
        "--out",
        arg(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(dir.path().join("transition.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# lambda_0: ")));
    let rows = body(&dir.path().join("transition.csv"));
    assert_eq!(rows[0], "lambda,r_mean,r_stderr,n_ratios");
    assert_eq!(rows.len(), 4);
}
