mod common;

use common::*;
use pmg::analysis::{sample_manifold, ManifoldKind, SampleParams};
use pmg::{api, Error, Format};

fn cli_json(args: &[&str]) -> serde_json::Value {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["pmg"];
    full.extend_from_slice(args);
    assert_eq!(
        pmg::cli::run(full, &mut out, &mut err),
        0,
        "{}",
        String::from_utf8_lossy(&err)
    );
    serde_json::from_slice(&out).unwrap()
}

fn fixture(name: &str, cloud: &pmg::PointCloud, dir: &std::path::Path) -> String {
    let path = dir.join(name);
    cloud.save(&path, Format::Binary).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn global_id_matches_cli() {
    let dir = tempfile::tempdir().unwrap();
    let params = SampleParams {
        dim: 2,
        ..Default::default()
    };
    let square = sample_manifold(ManifoldKind::Hypercube, 2000, &params, 1).unwrap();
    let path = fixture("square.pmg", &square, dir.path());
    let bound = api::global_id(square.as_flat(), 2000, 2, 20, "tle").unwrap();
    let cli = cli_json(&["id", "--input", &path, "--k", "20"]);
    assert_eq!(bound.to_bits(), cli["global_id"].as_f64().unwrap().to_bits());
}

#[test]
fn curvature_matches_cli() {
    let dir = tempfile::tempdir().unwrap();
    let sphere = sample_manifold(ManifoldKind::Sphere, 500, &SampleParams::default(), 2).unwrap();
    let path = fixture("sphere.pmg", &sphere, dir.path());
    let bound = api::curvature_profile(sphere.as_flat(), 500, 3, Some(30), Some(2)).unwrap();
    let cli = cli_json(&["curvature", "--input", &path, "--k", "30", "--m", "2"]);
    assert_eq!(bound.mean.to_bits(), cli["mean_curvature"].as_f64().unwrap().to_bits());
    assert_eq!(
        bound.mean_abs.to_bits(),
        cli["mean_abs_curvature"].as_f64().unwrap().to_bits()
    );
}

#[test]
fn holes_match_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = pmg::PointCloud::from_rows(&circle(100, 1.0, (0.0, 0.0))).unwrap();
    let path = fixture("circle.pmg", &cloud, dir.path());
    let bound = api::hole_metrics(cloud.as_flat(), 100, 2, None).unwrap();
    let cli = cli_json(&["holes", "--input", &path]);
    assert_eq!(bound.n_holes, 1);
    assert_eq!(
        bound.total.to_bits(),
        cli["total_persistence"].as_f64().unwrap().to_bits()
    );
    assert_eq!(
        bound.density.to_bits(),
        cli["persistence_density"].as_f64().unwrap().to_bits()
    );
    let blob = gaussian_cloud(300, 3, 1);
    assert_eq!(api::hole_metrics(blob.as_flat(), 300, 3, None).unwrap().n_holes, 0);
}

#[test]
fn bias_report_matches_cli() {
    let dir = tempfile::tempdir().unwrap();
    let acc = pmg::analysis::write_synthetic_suite(dir.path(), 300, 5).unwrap();
    let bound = api::bias_report(dir.path(), &acc, &pmg::cli::RunConfig::default()).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let args = [
        "pmg",
        "report",
        "--embeddings",
        dir.path().to_str().unwrap(),
        "--accuracy",
        acc.to_str().unwrap(),
    ];
    assert_eq!(pmg::cli::run(args, &mut out, &mut err), 0);
    assert_eq!(bound.to_json() + "\n", String::from_utf8(out).unwrap());
}

#[test]
fn validation() {
    assert!(matches!(api::global_id(&[], 0, 2, 5, "tle"), Err(Error::Validation(_))));
    assert!(matches!(
        api::global_id(&[0.0; 6], 2, 2, 5, "tle"),
        Err(Error::Validation(_))
    ));
    let err = api::global_id(&[0.0, 1.0, 2.0, 3.0], 4, 1, 4, "tle").unwrap_err();
    assert!(err.to_string().contains("k must be < n"));
    assert!(matches!(
        api::hole_metrics(&[0.0, 1.0, 2.0], 3, 1, Some(-1.0)),
        Err(Error::Parameter(_))
    ));
    let (wide, warning) = api::widen_f32(&[1.5f32, 2.0]);
    assert_eq!(wide, vec![1.5, 2.0]);
    assert!(warning.contains("32-bit"));
}
