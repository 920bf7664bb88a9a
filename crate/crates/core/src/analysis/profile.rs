use serde::{Deserialize, Serialize};

use crate::curvature::{self, TangentDim};
use crate::error::{Error, Result};
use crate::intrinsic_dim::{self, Method, DEFAULT_K};
use crate::pointcloud::{knn, NeighborGraph, PointCloud};
use crate::topology::{analyze_holes, HoleMetrics, HolesConfig, Threshold, DEFAULT_MAX_POINTS};

/// Parameters shared by every complexity measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileConfig {
    /// Neighbor count; `None` uses 20 for the intrinsic dimension and
    /// `max(20, m^2 + 5)` for curvature.
    pub k: Option<usize>,
    pub m: TangentDim,
    pub tau: Threshold,
    pub epsilon_max: Threshold,
    pub max_points: usize,
    pub seed: u64,
    pub id_method: Method,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            k: None,
            m: TangentDim::Auto,
            tau: Threshold::Auto,
            epsilon_max: Threshold::Auto,
            max_points: DEFAULT_MAX_POINTS,
            seed: 42,
            id_method: Method::Tle,
        }
    }
}

impl ProfileConfig {
    pub fn holes(&self) -> HolesConfig {
        HolesConfig {
            tau: self.tau,
            epsilon_max: self.epsilon_max,
            max_points: self.max_points,
            seed: self.seed,
        }
    }
}

/// Parameter values actually used for one class, with `auto` resolved.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResolvedParameters {
    pub k_id: Option<usize>,
    pub k_curvature: Option<usize>,
    pub m: Option<usize>,
    pub tau: Option<f64>,
    pub epsilon_max: Option<f64>,
    pub max_points: usize,
    pub seed: u64,
}

/// Geometric complexity of one class manifold. Measures that could not be
/// computed are `None` and explained in `warnings`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityProfile {
    pub label: String,
    pub n_points: usize,
    pub global_id: Option<f64>,
    pub mean_curvature: Option<f64>,
    pub mean_abs_curvature: Option<f64>,
    pub holes: Option<HoleMetrics>,
    pub essential_h1: Option<usize>,
    pub parameters: ResolvedParameters,
    pub warnings: Vec<String>,
}

/// Clamps `k` to `n - 1`, recording a warning when it had to shrink.
pub fn clamp_k(k: usize, n: usize, what: &str, warnings: &mut Vec<String>) -> Result<usize> {
    if k == 0 {
        return Err(Error::Parameter("k must be >= 1".into()));
    }
    if n < 2 {
        return Err(Error::Validation(format!("{what} needs at least 2 points (n = {n})")));
    }
    if k > n - 1 {
        warnings.push(format!("{what}: k = {k} clamped to n - 1 = {}", n - 1));
        return Ok(n - 1);
    }
    Ok(k)
}

/// Computes intrinsic dimension, curvature and hole metrics for one class.
///
/// A failing measure is recorded as a warning; an error is returned only
/// when no measure could be computed or a parameter is invalid.
pub fn profile_class(cloud: &PointCloud, config: &ProfileConfig) -> Result<ComplexityProfile> {
    if config.k == Some(0) {
        return Err(Error::Parameter("k must be >= 1".into()));
    }
    if config.m == TangentDim::Fixed(0) {
        return Err(Error::Parameter("tangent dimension m must be >= 1".into()));
    }
    if config.max_points == 0 {
        return Err(Error::Parameter("max_points must be >= 1".into()));
    }
    if let Threshold::Value(t) = config.tau {
        if t < 0.0 {
            return Err(Error::Parameter(format!("tau must be non-negative (got {t})")));
        }
    }
    let n = cloud.len();
    let mut warnings = Vec::new();
    let mut params = ResolvedParameters {
        max_points: config.max_points,
        seed: config.seed,
        ..Default::default()
    };

    // Intrinsic dimension.
    let mut graph: Option<NeighborGraph> = None;
    let global_id = clamp_k(config.k.unwrap_or(DEFAULT_K), n, "intrinsic dimension", &mut warnings)
        .and_then(|k| {
            let g = knn(cloud, k)?;
            let local = intrinsic_dim::local_id(cloud, &g, config.id_method)?;
            params.k_id = Some(k);
            if local.skipped > 0 {
                warnings.push(format!(
                    "intrinsic dimension undefined at {} points (imputed)",
                    local.skipped
                ));
            }
            graph = Some(g);
            Ok(intrinsic_dim::global_id(&local))
        })
        .map_err(|e| warnings.push(format!("intrinsic dimension: {e}")))
        .ok();

    // Curvature.
    let curv = (|| -> Result<curvature::CurvatureEstimates> {
        let m = match config.m {
            TangentDim::Fixed(m) => m,
            TangentDim::Auto => {
                let id = global_id.ok_or_else(|| {
                    Error::Validation("automatic tangent dimension needs the intrinsic dimension".into())
                })?;
                curvature::resolve_tangent_dim(id, cloud.dim())?
            }
        };
        params.m = Some(m);
        let k = config.k.unwrap_or_else(|| curvature::default_k(m));
        let k = clamp_k(k, n, "curvature", &mut warnings)?;
        params.k_curvature = Some(k);
        let g = match &graph {
            Some(g) if g.k() == k => g.clone(),
            Some(g) if g.k() > k => g.truncate(k)?,
            _ => knn(cloud, k)?,
        };
        curvature::curvature_profile(cloud, &g, m)
    })();
    let (mean_curvature, mean_abs_curvature) = match curv {
        Ok(c) => {
            warnings.extend(c.warnings.iter().cloned());
            (Some(c.mean_curvature), Some(c.mean_abs_curvature))
        }
        Err(e @ Error::Parameter(_)) if config.m != TangentDim::Auto || config.k.is_some() => return Err(e),
        Err(e) => {
            warnings.push(format!("curvature: {e}"));
            (None, None)
        }
    };

    // Holes.
    let (holes, essential_h1) = match analyze_holes(cloud, &config.holes()) {
        Ok(a) => {
            params.tau = Some(a.metrics.tau);
            params.epsilon_max = Some(a.epsilon_max);
            if a.n_used < n {
                warnings.push(format!("holes computed on a {}-point subsample", a.n_used));
            }
            (Some(a.metrics), Some(a.essential_h1))
        }
        Err(e @ Error::Parameter(_)) => return Err(e),
        Err(e) => {
            warnings.push(format!("holes: {e}"));
            (None, None)
        }
    };

    if global_id.is_none() && mean_curvature.is_none() && holes.is_none() {
        return Err(Error::Validation(format!(
            "no complexity measure could be computed: {}",
            warnings.join("; ")
        )));
    }

    Ok(ComplexityProfile {
        label: cloud.label().unwrap_or("").to_string(),
        n_points: n,
        global_id,
        mean_curvature,
        mean_abs_curvature,
        holes,
        essential_h1,
        parameters: params,
        warnings,
    })
}
