//! Local and global intrinsic-dimension estimation from k-nearest-neighbor
//! distances.
//!
//! Two local estimators are provided:
//!
//! * **MLE**: `-((1/k) Σ_j ln(r_j / r_k))^-1` over the `k` neighbor distances.
//! * **TLE** (tight-locality estimator): uses every neighbor `v` (and the
//!   center itself) together with every other neighbor `w` to produce two
//!   distance-ratio measurements per pair, one for `v` and one for its
//!   reflection `2z - v` through the center. Measurements are
//!   `ln(d_z(v, w) / r_k)`; the estimate is the negative reciprocal of their
//!   mean.
//!
//! The global estimate is the plain arithmetic mean of local values. Points
//! where a local estimate is undefined are counted in `skipped` and imputed
//! with the mean of the defined ones, so the global mean still averages over
//! all `n` points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointcloud::{NeighborGraph, PointCloud};

pub const DEFAULT_K: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mle,
    Tle,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mle" => Ok(Method::Mle),
            "tle" => Ok(Method::Tle),
            other => Err(Error::Parameter(format!(
                "unknown intrinsic-dimension method {other:?} (expected mle or tle)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Mle => "mle",
            Method::Tle => "tle",
        })
    }
}

/// Per-point intrinsic-dimension estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalIdEstimates {
    pub method: Method,
    pub k: usize,
    pub values: Vec<f64>,
    /// Points whose estimate was undefined and imputed.
    pub skipped: usize,
}

impl LocalIdEstimates {
    /// Imputes undefined entries with the mean of the defined ones.
    fn from_raw(method: Method, k: usize, raw: Vec<Option<f64>>) -> Result<Self> {
        let defined: Vec<f64> = raw.iter().flatten().copied().collect();
        if defined.is_empty() {
            return Err(Error::Validation(format!(
                "{method} intrinsic dimension is undefined at every point"
            )));
        }
        let fill = defined.iter().sum::<f64>() / defined.len() as f64;
        let skipped = raw.len() - defined.len();
        let values = raw.into_iter().map(|v| v.unwrap_or(fill)).collect();
        Ok(Self {
            method,
            k,
            values,
            skipped,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_inputs(cloud: &PointCloud, graph: &NeighborGraph) -> Result<()> {
    if graph.len() != cloud.len() {
        return Err(Error::Parameter(format!(
            "neighbor graph covers {} points but the cloud has {}",
            graph.len(),
            cloud.len()
        )));
    }
    if graph.k() < 2 {
        return Err(Error::Parameter(format!(
            "intrinsic-dimension estimation needs k >= 2 (k = {})",
            graph.k()
        )));
    }
    Ok(())
}

/// MLE estimate from one point's ascending neighbor distances.
///
/// Zero distances are dropped and the neighbor count reduced accordingly.
/// Returns `None` when fewer than two neighbors remain or the log-ratio sum
/// vanishes.
pub fn mle_from_distances(distances: &[f64]) -> Option<f64> {
    let r_k = *distances.last()?;
    if !(r_k > 0.0) {
        return None;
    }
    let valid: Vec<f64> = distances.iter().copied().filter(|&r| r > 0.0).collect();
    if valid.len() < 2 {
        return None;
    }
    let sum: f64 = valid.iter().map(|r| (r / r_k).ln()).sum();
    let mean = sum / valid.len() as f64;
    let id = -1.0 / mean;
    (id.is_finite() && id > 0.0).then_some(id)
}

pub fn local_id_mle(cloud: &PointCloud, graph: &NeighborGraph) -> Result<LocalIdEstimates> {
    check_inputs(cloud, graph)?;
    let raw: Vec<Option<f64>> = (0..cloud.len())
        .into_par_iter()
        .map(|i| mle_from_distances(graph.distances(i)))
        .collect();
    LocalIdEstimates::from_raw(Method::Mle, graph.k(), raw)
}

/// TLE pair measurement `d_z(v, w)` for neighborhood radius `r`.
///
/// With `a = |z - v|^2`, `c = |w - v|^2` and `B = 2 (z - v)·(w - v)` this is
/// `2 r c / (B + sqrt(B^2 + 4 c (r^2 - a)))`, the distance ratio that places
/// `w` relative to `v` inside the ball of radius `r` around `z`. When `v` lies
/// on the boundary sphere (`a = r^2`) it reduces to
/// `r c / (2 (z - v)·(w - v))`.
///
/// Returns `None` for non-finite or non-positive values.
pub fn tle_pair_distance(center: &[f64], v: &[f64], w: &[f64], r: f64) -> Option<f64> {
    let mut a = 0.0;
    let mut c = 0.0;
    let mut dot = 0.0;
    for ((&z, &v), &w) in center.iter().zip(v).zip(w) {
        let zv = z - v;
        let wv = w - v;
        a += zv * zv;
        c += wv * wv;
        dot += zv * wv;
    }
    pair_distance_from_moments(a, c, 2.0 * dot, r)
}

#[inline]
fn pair_distance_from_moments(a: f64, c: f64, b: f64, r: f64) -> Option<f64> {
    let disc = b * b + 4.0 * c * (r * r - a);
    if !(disc >= 0.0) {
        return None;
    }
    let den = b + disc.sqrt();
    let d = 2.0 * r * c / den;
    (d.is_finite() && d > 0.0).then_some(d)
}

/// The boundary-sphere form `r (w - v)·(w - v) / (2 (z - v)·(w - v))`.
pub fn tle_boundary_pair_distance(center: &[f64], v: &[f64], w: &[f64], r: f64) -> Option<f64> {
    let mut c = 0.0;
    let mut dot = 0.0;
    for ((&z, &v), &w) in center.iter().zip(v).zip(w) {
        c += (w - v) * (w - v);
        dot += (z - v) * (w - v);
    }
    let d = r * c / (2.0 * dot);
    (d.is_finite() && d > 0.0).then_some(d)
}

/// TLE estimate at one point given its neighbor coordinates and radius.
pub fn tle_at(center: &[f64], neighbors: &[&[f64]], r: f64) -> Option<f64> {
    if !(r > 0.0) || neighbors.len() < 2 {
        return None;
    }
    let p = center.len();
    // v ranges over the neighbors plus the center; w over the neighbors.
    let mut sources: Vec<&[f64]> = neighbors.to_vec();
    sources.push(center);
    let mut reflected = vec![0.0; p];
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut pairs = 0usize;
    for (vi, v) in sources.iter().enumerate() {
        for (z, (rv, x)) in center.iter().zip(reflected.iter_mut().zip(v.iter())) {
            *rv = 2.0 * z - x;
        }
        for (wi, w) in neighbors.iter().enumerate() {
            if vi == wi {
                continue;
            }
            let mut kept = false;
            for src in [*v, reflected.as_slice()] {
                if let Some(d) = tle_pair_distance(center, src, w, r) {
                    sum += (d / r).ln();
                    count += 1;
                    kept = true;
                }
            }
            pairs += kept as usize;
        }
    }
    if pairs < 2 || count == 0 {
        return None;
    }
    let id = -1.0 / (sum / count as f64);
    (id.is_finite() && id > 0.0).then_some(id)
}

pub fn local_id_tle(cloud: &PointCloud, graph: &NeighborGraph) -> Result<LocalIdEstimates> {
    check_inputs(cloud, graph)?;
    let raw: Vec<Option<f64>> = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let neighbors: Vec<&[f64]> = graph.indices(i).iter().map(|&j| cloud.point(j)).collect();
            tle_at(cloud.point(i), &neighbors, graph.radius(i))
        })
        .collect();
    LocalIdEstimates::from_raw(Method::Tle, graph.k(), raw)
}

pub fn local_id(cloud: &PointCloud, graph: &NeighborGraph, method: Method) -> Result<LocalIdEstimates> {
    match method {
        Method::Mle => local_id_mle(cloud, graph),
        Method::Tle => local_id_tle(cloud, graph),
    }
}

/// Arithmetic mean of the local estimates.
pub fn global_id(local: &LocalIdEstimates) -> f64 {
    local.values.iter().sum::<f64>() / local.values.len() as f64
}
