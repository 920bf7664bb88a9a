//! Flat entry points over row-major `f64` buffers.
//!
//! These are the functions a scripting-language binding wraps: each takes a
//! contiguous `(n, p)` buffer, converts it once to a [`PointCloud`] and runs
//! the same code path as the corresponding CLI command, so results are
//! bit-identical to the CLI's JSON output for equal inputs and parameters.

use std::path::Path;

use serde::Serialize;

use crate::analysis::{build_bias_report, BiasReport, ProfileConfig, ReportOptions};
use crate::cli::{self, CurvatureOutput, HolesOutput, IdOutput, RunConfig};
use crate::curvature::TangentDim;
use crate::error::{Error, Result};
use crate::intrinsic_dim::Method;
use crate::pointcloud::PointCloud;
use crate::topology::Threshold;

/// Validates the buffer shape and builds the cloud.
pub fn cloud_from_buffer(data: &[f64], n: usize, p: usize) -> Result<PointCloud> {
    if data.is_empty() {
        return Err(Error::Validation("input array is empty".into()));
    }
    if n.checked_mul(p) != Some(data.len()) {
        return Err(Error::Validation(format!(
            "shape ({n}, {p}) does not match buffer length {}",
            data.len()
        )));
    }
    PointCloud::from_flat(data.to_vec(), n, p)
}

/// Converts single-precision input, reporting the widening as a warning.
pub fn widen_f32(data: &[f32]) -> (Vec<f64>, String) {
    (
        data.iter().map(|&v| v as f64).collect(),
        "32-bit input converted to 64-bit; results may differ from 64-bit input".to_string(),
    )
}

/// Global intrinsic dimension; `k` must satisfy `2 <= k <= n - 1`.
pub fn global_id(data: &[f64], n: usize, p: usize, k: usize, method: &str) -> Result<f64> {
    let cloud = cloud_from_buffer(data, n, p)?;
    let method: Method = method.parse()?;
    if k >= n {
        return Err(Error::Parameter(format!("k must be < n (k = {k}, n = {n})")));
    }
    let config = RunConfig {
        k: Some(k),
        method,
        ..RunConfig::default()
    };
    let out: IdOutput = cli::run_id(&cloud, &config, false)?;
    Ok(out.global_id)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSummary {
    pub mean: f64,
    pub mean_abs: f64,
    pub skipped: usize,
}

pub fn curvature_profile(
    data: &[f64],
    n: usize,
    p: usize,
    k: Option<usize>,
    m: Option<usize>,
) -> Result<CurvatureSummary> {
    let cloud = cloud_from_buffer(data, n, p)?;
    let config = RunConfig {
        k,
        m: m.map(TangentDim::Fixed).unwrap_or(TangentDim::Auto),
        ..RunConfig::default()
    };
    let out: CurvatureOutput = cli::run_curvature(&cloud, &config, false)?;
    Ok(CurvatureSummary {
        mean: out.mean_curvature,
        mean_abs: out.mean_abs_curvature,
        skipped: out.skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoleSummary {
    pub n_holes: usize,
    pub total: f64,
    pub avg: f64,
    pub density: f64,
}

pub fn hole_metrics(data: &[f64], n: usize, p: usize, tau: Option<f64>) -> Result<HoleSummary> {
    let cloud = cloud_from_buffer(data, n, p)?;
    let config = RunConfig {
        tau: tau.map(Threshold::Value).unwrap_or(Threshold::Auto),
        ..RunConfig::default()
    };
    let out: HolesOutput = cli::run_holes(&cloud, &config, false)?;
    Ok(HoleSummary {
        n_holes: out.n_holes,
        total: out.total_persistence,
        avg: out.avg_persistence,
        density: out.persistence_density,
    })
}

pub fn bias_report(embeddings_dir: &Path, accuracy: &Path, config: &RunConfig) -> Result<BiasReport> {
    let profile: ProfileConfig = config.profile_config();
    build_bias_report(
        embeddings_dir,
        accuracy,
        &profile,
        &ReportOptions {
            signed_curvature: config.signed_curvature,
        },
        config.echo(),
    )
}
