use std::cmp::Ordering;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointcloud::{diameter, PointCloud};

/// A real parameter that may be resolved automatically from the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threshold {
    Auto,
    Value(f64),
}

impl Threshold {
    pub fn resolve(self, auto: impl FnOnce() -> f64) -> f64 {
        match self {
            Threshold::Auto => auto(),
            Threshold::Value(v) => v,
        }
    }
}

impl std::str::FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Threshold::Auto);
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Threshold::Value)
            .ok_or_else(|| Error::Parameter(format!("expected a real number or \"auto\", got {s:?}")))
    }
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threshold::Auto => f.write_str("auto"),
            Threshold::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub length: f64,
}

impl Edge {
    pub(crate) fn order(&self, other: &Edge) -> Ordering {
        self.length
            .total_cmp(&other.length)
            .then(self.i.cmp(&other.i))
            .then(self.j.cmp(&other.j))
    }
}

/// Vietoris-Rips filtration up to dimension two.
///
/// Edges are stored explicitly, sorted by `(length, i, j)` with `i < j`.
/// Triangles are enumerated on demand from the pairwise distance matrix; a
/// triangle enters at the length of its longest edge.
#[derive(Debug, Clone)]
pub struct Filtration {
    vertex_count: usize,
    edges: Vec<Edge>,
    epsilon_max: f64,
    distances: Vec<f64>,
}

impl Filtration {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn epsilon_max(&self) -> f64 {
        self.epsilon_max
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.vertex_count + j]
    }

    /// Whether the edge `{i, j}` is present (length within the cap).
    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.distance(i, j) <= self.epsilon_max
    }
}

/// Builds the Rips filtration of `cloud` capped at `epsilon_max`.
///
/// `Threshold::Auto` resolves to the cloud diameter, so every loop can die.
pub fn build_filtration(cloud: &PointCloud, epsilon_max: Threshold) -> Result<Filtration> {
    let n = cloud.len();
    let cap = epsilon_max.resolve(|| diameter(cloud));
    if !(cap >= 0.0) {
        return Err(Error::Parameter(format!(
            "epsilon_max must be non-negative (got {cap})"
        )));
    }
    let mut distances = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = cloud.distance(i, j);
            distances[i * n + j] = d;
            distances[j * n + i] = d;
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let length = distances[i * n + j];
            if length <= cap {
                edges.push(Edge { i, j, length });
            }
        }
    }
    edges.sort_unstable_by(Edge::order);
    Ok(Filtration {
        vertex_count: n,
        edges,
        epsilon_max: cap,
        distances,
    })
}

/// Deterministic uniform subsample of at most `max_points` points.
///
/// Returns the cloud unchanged when it is already small enough. Selected
/// points keep their original relative order.
pub fn subsample(cloud: &PointCloud, max_points: usize, seed: u64) -> Result<PointCloud> {
    if max_points == 0 {
        return Err(Error::Parameter("max_points must be >= 1".into()));
    }
    if cloud.len() <= max_points {
        return Ok(cloud.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, cloud.len(), max_points).into_vec();
    picked.sort_unstable();
    cloud.select(&picked)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilateral_triangle_edges() {
        let h = 3f64.sqrt() / 2.0;
        let cloud = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]]).unwrap();
        let f = build_filtration(&cloud, Threshold::Auto).unwrap();
        assert_eq!(f.edges().len(), 3);
        for e in f.edges() {
            assert!((e.length - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn square_edges_and_cap() {
        let cloud = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let f = build_filtration(&cloud, Threshold::Auto).unwrap();
        let lengths: Vec<f64> = f.edges().iter().map(|e| e.length).collect();
        assert_eq!(&lengths[..4], &[1.0; 4]);
        assert_eq!(&lengths[4..], &[2f64.sqrt(); 2]);
        assert_eq!(f.epsilon_max(), 2f64.sqrt());
        assert_eq!((f.edges()[0].i, f.edges()[0].j), (0, 1));

        let capped = build_filtration(&cloud, Threshold::Value(1.2)).unwrap();
        assert_eq!(capped.edges().len(), 4);
        assert!(!capped.has_edge(0, 2));
    }

    #[test]
    fn negative_cap_rejected() {
        let cloud = PointCloud::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(build_filtration(&cloud, Threshold::Value(-1.0)).is_err());
    }

    #[test]
    fn threshold_parse() {
        assert_eq!("auto".parse::<Threshold>().unwrap(), Threshold::Auto);
        assert_eq!("0.5".parse::<Threshold>().unwrap(), Threshold::Value(0.5));
        assert!("x".parse::<Threshold>().is_err());
        assert!("nan".parse::<Threshold>().is_err());
    }

    #[test]
    fn subsample_is_deterministic_and_ordered() {
        let rows: Vec<[f64; 1]> = (0..50).map(|i| [i as f64]).collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let a = subsample(&cloud, 10, 7).unwrap();
        let b = subsample(&cloud, 10, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.as_flat().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(subsample(&cloud, 100, 7).unwrap(), cloud);
    }
}
