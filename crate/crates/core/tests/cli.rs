use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_moment-bounds"));
    cmd.env_remove("MOMENT_BOUNDS_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn bounds_for_a_positive_quantity() {
    let v = json(&run(&[
        "bounds", "--mean", "1", "--std", "0.4", "--xmin", "0", "--orders", "3",
    ]));
    assert_eq!(v[0]["order"], 3);
    assert!(close(v[0]["lower"].as_f64().unwrap(), -2.1, 1e-12));
    assert_eq!(v[0]["upper"], "+inf");
    assert_eq!(v[0]["status"], "proven");
}

#[test]
fn bounds_accepts_scientific_notation_and_lists() {
    let v = json(&run(&[
        "bounds", "--mean", "1e0", "--std", "2", "--xmin", "0", "--xmax", "5.0", "--orders",
        "3,4,5",
    ]));
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    assert!(close(reports[1]["lower"].as_f64().unwrap(), 3.25, 1e-12));
    assert!(close(reports[1]["upper"].as_f64().unwrap(), 3.25, 1e-12));
    assert_eq!(reports[1]["status"], "conjectured");
    assert_eq!(reports[1]["lower_status"], "proven");
    assert_eq!(reports[2]["delta_params"]["delta_prime"], 2.0);
}

#[test]
fn moments_of_a_symmetric_pair() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "d.json",
        r#"{"values": [0, 2], "probabilities": [0.5, 0.5]}"#,
    );
    let out = run(&["moments", &file, "--max-order", "4"]);
    let v = json(&out);
    assert_eq!(v["mean"], 1.0);
    assert_eq!(v["standardized_moments"][0], 0.0);
    assert_eq!(v["standardized_moments"][1], 1.0);
    let text = String::from_utf8(out.stdout).unwrap();
    let at: Vec<usize> = [
        "\"mean\"",
        "\"std_dev\"",
        "\"cov\"",
        "\"central_moments\"",
        "\"standardized_moments\"",
    ]
    .iter()
    .map(|k| text.find(k).unwrap())
    .collect();
    assert!(
        at.windows(2).all(|w| w[0] < w[1]),
        "keys out of order: {text}"
    );
}

#[test]
fn construct_recovers_the_canonical_pair() {
    let v = json(&run(&[
        "construct",
        "--order",
        "3",
        "--mean",
        "1.5",
        "--cov",
        "0.577350269",
        "--target",
        "1.154700538",
    ]));
    let d = &v[0];
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert!(close(d["values"][0].as_f64().unwrap(), 1.0, 1e-8));
    assert!(close(d["values"][1].as_f64().unwrap(), 3.0, 1e-8));
    assert!(close(d["probabilities"][0].as_f64().unwrap(), 0.75, 1e-8));
    assert!(close(d["probabilities"][1].as_f64().unwrap(), 0.25, 1e-8));
}

#[test]
fn construct_output_feeds_moments() {
    let dir = tempfile::tempdir().unwrap();
    for (order, target) in [("3", -0.7), ("4", 5.5), ("5", 12.0), ("6", 2.0)] {
        let v = json(&run(&[
            "construct",
            "--order",
            order,
            "--mean",
            "2",
            "--cov",
            "0.3",
            "--target",
            &target.to_string(),
        ]));
        for (i, d) in v.as_array().unwrap().iter().enumerate() {
            let file = write(dir.path(), &format!("c{order}_{i}.json"), &d.to_string());
            let m = json(&run(&["moments", &file, "--max-order", order]));
            let n: usize = order.parse().unwrap();
            assert!(close(m["mean"].as_f64().unwrap(), 2.0, 1e-9));
            assert!(close(m["cov"].as_f64().unwrap(), 0.3, 1e-9));
            assert!(
                close(
                    m["standardized_moments"][n - 3].as_f64().unwrap(),
                    target,
                    1e-9
                ),
                "order {order}: {m}"
            );
        }
    }
}

#[test]
fn construct_without_solution_is_a_domain_error() {
    let out = run(&[
        "construct",
        "--order",
        "4",
        "--mean",
        "1",
        "--cov",
        "0.5",
        "--target",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn decompose_writes_pieces_with_the_input_mean() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "d.json",
        r#"{"values": [0, 1, 2, 5], "probabilities": [0.4, 0.3, 0.2, 0.1]}"#,
    );
    let out_path = dir.path().join("pieces.json");
    let out = run(&["decompose", &file, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let mean = v["mean"].as_f64().unwrap();
    assert!(close(mean, 1.2, 1e-15));
    let mut total = 0.0;
    for c in v["components"].as_array().unwrap() {
        let xs: Vec<f64> = c["values"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        let ps: Vec<f64> = c["probabilities"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        let m: f64 = xs.iter().zip(&ps).map(|(x, p)| x * p).sum();
        assert!(close(m, mean, 1e-12));
        total += c["weight"].as_f64().unwrap();
    }
    assert!(close(total, 1.0, 1e-12));
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "d.json",
        r#"{"values": [0.3, 1, 7], "probabilities": [0.2, 0.7, 0.1]}"#,
    );
    for args in [
        vec!["moments", file.as_str(), "--max-order", "8"],
        vec!["decompose", file.as_str()],
        vec![
            "bounds", "--mean", "1", "--std", "0.9", "--xmin", "0", "--xmax", "4", "--orders",
            "3,4,5,6",
        ],
    ] {
        let (a, b) = (run(&args), run(&args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn sweep_csv_is_independent_of_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in [None, Some("1"), Some("4")] {
        let path = dir
            .path()
            .join(format!("s{}.csv", threads.unwrap_or("all")));
        let mut cmd = bin();
        if let Some(t) = threads {
            cmd.env("MOMENT_BOUNDS_THREADS", t);
        }
        let args = [
            "sweep",
            "--xmin",
            "0",
            "--xmax",
            "5",
            "--mean",
            "1",
            "--bins",
            "10",
            "--samples",
            "200",
            "--orders",
            "3,4,5",
            "--seed",
            "42",
            "--out",
        ];
        let out = cmd.args(args).arg(&path).output().unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert!(text.starts_with("delta_bin_lo,delta_bin_hi,order,family,n_samples,n_discarded,"));
    assert_eq!(text.lines().count(), 1 + 10 * 3 * 2);
}

#[test]
fn sweep_dumps_counterexamples() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("mid.csv");
    let out = run(&[
        "sweep",
        "--xmin",
        "0",
        "--xmax",
        "5",
        "--mean",
        "2.5",
        "--bins",
        "10",
        "--samples",
        "300",
        "--orders",
        "4",
        "--seed",
        "9",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("outside the limits"), "{err}");
    let dump = dir.path().join("mid.csv.counterexamples.json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dump).unwrap()).unwrap();
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["status"] == "conjectured"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["bounds", "--mean", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["bounds", "--mean", "1", "--std", "1", "--wat"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let out = bin()
        .env("MOMENT_BOUNDS_THREADS", "0")
        .args([
            "sweep",
            "--xmin",
            "0",
            "--xmax",
            "5",
            "--mean",
            "1",
            "--out",
            "/tmp/x.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_with_one() {
    let out = run(&["moments", "/definitely/missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("/definitely/missing.json"));
    let out = run(&[
        "bounds", "--mean", "1", "--std", "2.5", "--xmin", "0", "--xmax", "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "sweep",
        "--xmin",
        "0",
        "--xmax",
        "5",
        "--mean",
        "1",
        "--samples",
        "10",
        "--out",
        "/tmp/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
