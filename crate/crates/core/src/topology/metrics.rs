use serde::Serialize;

use super::filtration::Threshold;
use super::persistence::PersistenceDiagram;
use crate::error::{Error, Result};

/// Default significance threshold as a fraction of the cloud diameter.
pub const DEFAULT_TAU_FRACTION: f64 = 0.1;

/// Summary of the significant H1 features of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoleMetrics {
    pub n_holes: usize,
    pub tau: f64,
    pub total_persistence: f64,
    pub avg_persistence: f64,
    /// Total persistence over the span `max death - min birth` of the
    /// significant pairs.
    pub persistence_density: f64,
}

/// Counts finite H1 pairs with `death - birth > tau` and their persistence.
///
/// `Threshold::Auto` uses `tau = 0.1 * cloud_diameter`. Essential classes are
/// ignored.
pub fn hole_metrics(h1: &PersistenceDiagram, tau: Threshold, cloud_diameter: f64) -> Result<HoleMetrics> {
    let tau = tau.resolve(|| DEFAULT_TAU_FRACTION * cloud_diameter);
    if !(tau >= 0.0) {
        return Err(Error::Parameter(format!("tau must be non-negative (got {tau})")));
    }
    let significant: Vec<_> = h1.finite().filter(|p| p.persistence() > tau).collect();
    let n_holes = significant.len();
    // fold from +0.0; an empty f64 sum is -0.0
    let total_persistence = significant.iter().map(|p| p.persistence()).fold(0.0, |a, b| a + b);
    let avg_persistence = if n_holes == 0 {
        0.0
    } else {
        total_persistence / n_holes as f64
    };
    let persistence_density = if n_holes == 0 {
        0.0
    } else {
        let first_birth = significant.iter().map(|p| p.birth).fold(f64::INFINITY, f64::min);
        let last_death = significant.iter().map(|p| p.death).fold(f64::NEG_INFINITY, f64::max);
        total_persistence / (last_death - first_birth)
    };
    Ok(HoleMetrics {
        n_holes,
        tau,
        total_persistence,
        avg_persistence,
        persistence_density,
    })
}

/// Alternative density: total persistence over the whole filtration range `[0, epsilon_max]`.
pub fn filtration_span_density(metrics: &HoleMetrics, epsilon_max: f64) -> f64 {
    if metrics.n_holes == 0 || !(epsilon_max > 0.0) {
        0.0
    } else {
        metrics.total_persistence / epsilon_max
    }
}
