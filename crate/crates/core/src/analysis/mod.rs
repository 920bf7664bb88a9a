//! Per-class complexity profiles, correlation with accuracy, and synthetic
//! ground-truth manifolds.

mod pearson;
mod profile;
mod report;
mod synth;

pub use pearson::pearson;
pub use profile::{clamp_k, profile_class, ComplexityProfile, ProfileConfig, ResolvedParameters};
pub use report::{
    bias_report_from_profiles, build_bias_report, correlate, discover_classes, AccuracyTable, BiasReport, ClassEntry,
    Measure, ReportOptions,
};
pub use synth::{random_orthonormal_map, sample_manifold, ManifoldKind, SampleParams};

use std::path::Path;

use crate::error::{Error, Result};
use crate::pointcloud::Format;

/// Writes a six-class suite of hypercubes with generating dimension 1..=6
/// embedded in `R^8`, plus `accuracy.csv` with accuracy `(10 - dim) / 10`.
///
/// Class files are `dim1.csv` .. `dim6.csv`; the accuracy table is written
/// next to them and returned.
pub fn write_synthetic_suite(dir: impl AsRef<Path>, n: usize, seed: u64) -> Result<std::path::PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut table = String::from("label,accuracy\n");
    for dim in 1..=6usize {
        let params = SampleParams {
            dim,
            ambient: Some(8),
            ..Default::default()
        };
        let cloud = sample_manifold(ManifoldKind::Hypercube, n, &params, seed.wrapping_add(dim as u64))?;
        cloud.save(dir.join(format!("dim{dim}.csv")), Format::Csv)?;
        table.push_str(&format!("dim{dim},{}\n", (10 - dim) as f64 / 10.0));
    }
    let accuracy = dir.join("accuracy.csv");
    std::fs::write(&accuracy, table).map_err(|e| Error::io(&accuracy, e))?;
    Ok(accuracy)
}
