//! Mean Gaussian curvature of spheres of several radii; expected 1/r^2.
//!
//! ```bash
//! cargo run --release --example curvature
//! ```

use pmg::analysis::{sample_manifold, ManifoldKind, SampleParams};
use pmg::curvature::{curvature_profile, local_frame};
use pmg::knn;

fn main() -> pmg::Result<()> {
    for radius in [0.5, 1.0, 2.0, 4.0] {
        let params = SampleParams {
            radius,
            ..Default::default()
        };
        let cloud = sample_manifold(ManifoldKind::Sphere, 2000, &params, 7)?;
        let graph = knn(&cloud, 30)?;
        let est = curvature_profile(&cloud, &graph, 2)?;
        println!(
            "r = {radius:<4} mean G = {:.4}  (1/r^2 = {:.4}, skipped {})",
            est.mean_curvature,
            1.0 / (radius * radius),
            est.skipped
        );
    }

    // The frame at one point: the normal of a sphere is radial.
    let cloud = sample_manifold(ManifoldKind::Sphere, 2000, &SampleParams::default(), 7)?;
    let frame = local_frame(&cloud, &knn(&cloud, 30)?, 0, 2)?;
    let radial: f64 = frame.normal.iter().zip(cloud.point(0)).map(|(a, b)| a * b).sum();
    println!("|normal . x| at point 0 = {:.4}", radial.abs());
    Ok(())
}
