//! Estimates the intrinsic dimension of hypercubes embedded in R^10.
//!
//! ```bash
//! cargo run --release --example intrinsic_dimension
//! ```

use pmg::analysis::{sample_manifold, ManifoldKind, SampleParams};
use pmg::intrinsic_dim::{global_id, local_id, Method, DEFAULT_K};
use pmg::knn;

fn main() -> pmg::Result<()> {
    println!("{:>4} {:>8} {:>8}", "d", "MLE", "TLE");
    for d in 1..=6 {
        let params = SampleParams {
            dim: d,
            ambient: Some(10),
            ..Default::default()
        };
        let cloud = sample_manifold(ManifoldKind::Hypercube, 2000, &params, d as u64)?;
        let graph = knn(&cloud, DEFAULT_K)?;
        let mle = global_id(&local_id(&cloud, &graph, Method::Mle)?);
        let tle = global_id(&local_id(&cloud, &graph, Method::Tle)?);
        println!("{d:>4} {mle:>8.3} {tle:>8.3}");
    }
    Ok(())
}
