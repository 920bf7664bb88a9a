//! Sampling, saving, loading and neighbor search.
//!
//! ```bash
//! cargo run --release --example point_clouds
//! ```

use pmg::analysis::{sample_manifold, ManifoldKind, SampleParams};
use pmg::{diameter, knn, load_point_cloud, Format};

fn main() -> pmg::Result<()> {
    let params = SampleParams {
        minor_radius: 0.4,
        ambient: Some(5),
        noise: 0.01,
        ..Default::default()
    };
    let torus = sample_manifold(ManifoldKind::Torus, 1000, &params, 3)?;
    println!(
        "torus: {} points in R^{}, diameter {:.3}",
        torus.len(),
        torus.dim(),
        diameter(&torus)
    );

    let dir = std::env::temp_dir();
    let csv = dir.join("torus.csv");
    let bin = dir.join("torus.pmg");
    torus.save(&csv, Format::Csv)?;
    torus.save(&bin, Format::Binary)?;
    let from_csv = load_point_cloud(&csv, Format::detect(&csv)?)?;
    let from_bin = load_point_cloud(&bin, Format::detect(&bin)?)?;
    println!(
        "reloaded {:?}: csv equal {}, binary equal {}",
        from_bin.label(),
        from_csv.as_flat() == torus.as_flat(),
        from_bin.as_flat() == torus.as_flat()
    );

    let graph = knn(&torus, 5)?;
    println!("neighbors of point 0: {:?}", graph.indices(0));
    println!("distances:            {:.4?}", graph.distances(0));
    Ok(())
}
