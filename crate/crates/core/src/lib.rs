//! Geometric complexity of point-cloud manifolds.
//!
//! `pmg` measures how complex a sampled manifold is: its intrinsic
//! dimension ([`intrinsic_dim`]), its pointwise Gaussian curvature
//! ([`curvature`]) and its one-dimensional holes through Vietoris-Rips
//! persistent homology ([`topology`]). The [`analysis`] module profiles one
//! embedding cloud per class and correlates the complexity of each class with
//! its classification accuracy.
//!
//! ```
//! use pmg::analysis::{sample_manifold, ManifoldKind, SampleParams};
//! use pmg::topology::{analyze_holes, HolesConfig};
//!
//! let circle = sample_manifold(ManifoldKind::Circle, 80, &SampleParams::default(), 7).unwrap();
//! let holes = analyze_holes(&circle, &HolesConfig::default()).unwrap();
//! assert_eq!(holes.metrics.n_holes, 1);
//! ```

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod api;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod intrinsic_dim;
pub mod pointcloud;
pub mod topology;

pub use error::{Error, Result};
pub use pointcloud::{diameter, knn, load_point_cloud, Format, NeighborGraph, PointCloud};
