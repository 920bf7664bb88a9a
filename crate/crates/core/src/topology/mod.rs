//! Vietoris-Rips persistent homology (H0 and H1 over Z/2) and hole metrics.

mod filtration;
mod metrics;
mod persistence;

pub use filtration::{build_filtration, subsample, Edge, Filtration, Threshold};
pub use metrics::{filtration_span_density, hole_metrics, HoleMetrics, DEFAULT_TAU_FRACTION};
pub use persistence::{betti_numbers, persistence, Diagrams, PersistenceDiagram, PersistencePair};

use serde::Serialize;

use crate::error::Result;
use crate::pointcloud::{diameter, PointCloud};

pub const DEFAULT_MAX_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolesConfig {
    pub tau: Threshold,
    pub epsilon_max: Threshold,
    pub max_points: usize,
    pub seed: u64,
}

impl Default for HolesConfig {
    fn default() -> Self {
        Self {
            tau: Threshold::Auto,
            epsilon_max: Threshold::Auto,
            max_points: DEFAULT_MAX_POINTS,
            seed: 42,
        }
    }
}

/// Everything computed for one cloud by [`analyze_holes`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoleAnalysis {
    pub metrics: HoleMetrics,
    pub essential_h1: usize,
    /// Density with the whole filtration range as denominator.
    pub persistence_density_filtration: f64,
    pub epsilon_max: f64,
    pub diameter: f64,
    /// Points actually filtered after subsampling.
    pub n_used: usize,
    pub diagrams: Diagrams,
}

/// Subsample, filter, compute persistence and summarize the H1 diagram.
///
/// The diameter used for the default `tau` is that of the filtered sample.
pub fn analyze_holes(cloud: &PointCloud, config: &HolesConfig) -> Result<HoleAnalysis> {
    let sample = subsample(cloud, config.max_points, config.seed)?;
    let diam = diameter(&sample);
    let eps = match config.epsilon_max {
        Threshold::Auto => Threshold::Value(diam),
        fixed => fixed,
    };
    let filtration = build_filtration(&sample, eps)?;
    let diagrams = persistence(&filtration);
    let metrics = hole_metrics(&diagrams.h1, config.tau, diam)?;
    Ok(HoleAnalysis {
        persistence_density_filtration: filtration_span_density(&metrics, filtration.epsilon_max()),
        essential_h1: diagrams.h1.essential_count(),
        epsilon_max: filtration.epsilon_max(),
        diameter: diam,
        n_used: sample.len(),
        metrics,
        diagrams,
    })
}

/// Diagram export as `dim,birth,death` rows; essential deaths are written as `inf`.
pub fn diagrams_to_csv(diagrams: &Diagrams) -> String {
    let mut out = String::from("dim,birth,death\n");
    for d in [&diagrams.h0, &diagrams.h1] {
        for p in &d.pairs {
            let death = if p.death.is_finite() {
                format!("{:?}", p.death)
            } else {
                "inf".to_string()
            };
            out.push_str(&format!("{},{:?},{}\n", d.dimension, p.birth, death));
        }
    }
    out
}
