//! Persistent homology of a circle, two circles and a Gaussian blob.
//!
//! ```bash
//! cargo run --release --example holes
//! ```

use pmg::analysis::{sample_manifold, ManifoldKind, SampleParams};
use pmg::topology::{analyze_holes, diagrams_to_csv, HolesConfig};
use pmg::PointCloud;

fn main() -> pmg::Result<()> {
    let circle = sample_manifold(ManifoldKind::Circle, 200, &SampleParams::default(), 1)?;
    let shifted = circle.map_points(2, |x, out| {
        out[0] = x[0] + 4.0;
        out[1] = x[1];
    })?;
    let two: Vec<Vec<f64>> = circle.points().chain(shifted.points()).map(|p| p.to_vec()).collect();
    let two = PointCloud::from_rows(&two)?;
    let blob = sample_manifold(
        ManifoldKind::GaussianBlob,
        300,
        &SampleParams {
            dim: 3,
            ..Default::default()
        },
        2,
    )?;

    let config = HolesConfig::default();
    for (name, cloud) in [("circle", &circle), ("two circles", &two), ("blob", &blob)] {
        let a = analyze_holes(cloud, &config)?;
        println!(
            "{name:<12} holes {}  tau {:.3}  total {:.3}  density {:.3}",
            a.metrics.n_holes, a.metrics.tau, a.metrics.total_persistence, a.metrics.persistence_density
        );
    }

    let a = analyze_holes(&circle, &config)?;
    let csv = diagrams_to_csv(&a.diagrams);
    println!("\nlongest bars of the circle:");
    let mut h1: Vec<_> = a.diagrams.h1.pairs.clone();
    h1.sort_by(|x, y| y.persistence().total_cmp(&x.persistence()));
    for p in h1.iter().take(3) {
        println!("  H1 [{:.3}, {:.3})", p.birth, p.death);
    }
    println!("diagram csv has {} rows", csv.lines().count() - 1);
    Ok(())
}
