mod common;

use std::fs;
use std::process::Command;

use common::*;
use pmg::Format;

fn pmg(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pmg")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["pmg"];
    full.extend_from_slice(args);
    let code = pmg::cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_circle(dir: &std::path::Path) -> String {
    let path = dir.join("circle.csv");
    pmg::PointCloud::from_rows(&circle(100, 1.0, (0.0, 0.0)))
        .unwrap()
        .save(&path, Format::Csv)
        .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn id_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_circle(dir.path());
    let (code, stdout, _) = pmg(&["id", "--input", &input, "--k", "10"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["k"], 10);
    assert_eq!(v["method"], "tle");
    assert_eq!(v["n_points"], 100);

    let random = dir.path().join("random_circle.csv");
    pmg::analysis::sample_manifold(pmg::analysis::ManifoldKind::Circle, 400, &Default::default(), 1)
        .unwrap()
        .save(&random, Format::Csv)
        .unwrap();
    let (_, stdout, _) = pmg(&["id", "--input", random.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let id = v["global_id"].as_f64().unwrap();
    assert!((0.7..=1.3).contains(&id), "id = {id}");
}

#[test]
fn holes_counts_circle_and_writes_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_circle(dir.path());
    let diagram = dir.path().join("d.csv");
    let (code, stdout, _) = pmg(&[
        "holes",
        "--input",
        &input,
        "--pairs",
        "--diagram",
        diagram.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["n_holes"], 1);
    let text = fs::read_to_string(diagram).unwrap();
    assert!(text.starts_with("dim,birth,death\n"));
    assert!(text.contains(",inf"));
}

#[test]
fn curvature_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_circle(dir.path());
    let (code, stdout, _) = pmg(&["curvature", "--input", &input, "--m", "1", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("mean_curvature"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_circle(dir.path());
    let (code, _, stderr) = pmg(&["id", "--input", "/nonexistent.csv"]);
    assert_eq!(code, 1);
    let diag: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(diag["exit_code"], 1);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2\n3\n").unwrap();
    assert_eq!(pmg(&["id", "--input", bad.to_str().unwrap()]).0, 1);

    assert_eq!(pmg(&["holes", "--input", &input, "--tau", "-1"]).0, 2);
    assert_eq!(pmg(&["id", "--input", &input, "--k", "0"]).0, 2);
    assert_eq!(pmg(&["id", "--input", &input, "--method", "nope"]).0, 2);
    assert_eq!(pmg(&["curvature", "--input", &input, "--m", "2"]).0, 2);
    assert_eq!(pmg(&["frobnicate"]).0, 2);
}

#[test]
fn help_lists_defaults() {
    let (code, stdout, _) = pmg(&["holes", "--help"]);
    assert_eq!(code, 0);
    for needle in ["--tau", "[default: auto]", "[default: 1000]", "[default: 42]"] {
        assert!(stdout.contains(needle), "missing {needle}:\n{stdout}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_circle(dir.path());
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "k=7\nmethod=mle\n").unwrap();
    let (_, stdout, _) = in_process(&["id", "--input", &input, "--config", cfg.to_str().unwrap(), "--k", "9"]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["k"], 9);
    assert_eq!(v["method"], "mle");
    fs::write(&cfg, "colour=blue\n").unwrap();
    assert_eq!(
        in_process(&["id", "--input", &input, "--config", cfg.to_str().unwrap()]).0,
        2
    );
}

#[test]
fn report_is_deterministic_and_two_classes_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let acc = pmg::analysis::write_synthetic_suite(dir.path(), 300, 3).unwrap();
    let args = [
        "report",
        "--embeddings",
        dir.path().to_str().unwrap(),
        "--accuracy",
        acc.to_str().unwrap(),
    ];
    let (code, a, _) = pmg(&args);
    assert_eq!(code, 0);
    let (_, b, _) = pmg(&args);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(v["correlations"]["global_id"].as_f64().unwrap() < -0.8);

    let small = tempfile::tempdir().unwrap();
    for (i, label) in ["a", "b"].iter().enumerate() {
        gaussian_cloud(30, 3, i as u64)
            .save(small.path().join(format!("{label}.csv")), Format::Csv)
            .unwrap();
    }
    let acc2 = small.path().join("acc.csv");
    fs::write(&acc2, "a,0.9\nb,0.8\n").unwrap();
    let (code, _, stderr) = pmg(&[
        "report",
        "--embeddings",
        small.path().to_str().unwrap(),
        "--accuracy",
        acc2.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("undefined_correlation") || stderr.contains("correlation"));
}

#[test]
fn sample_round_trips_through_binary() {
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("s.pmg");
    let (code, _, _) = pmg(&[
        "sample",
        "--kind",
        "sphere",
        "-n",
        "50",
        "--binary",
        "--output",
        bin.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let cloud = pmg::load_point_cloud(&bin, Format::Binary).unwrap();
    assert_eq!((cloud.len(), cloud.dim()), (50, 3));
    assert_eq!(pmg(&["sample", "--kind", "sphere", "-n", "5", "--binary"]).0, 2);
    let (_, csv, _) = pmg(&["sample", "--kind", "circle", "-n", "4", "--seed", "1"]);
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn binary_and_in_process_agree() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_circle(dir.path());
    let args = ["holes", "--input", input.as_str()];
    assert_eq!(pmg(&args).1, in_process(&args).1);
}
