//! Seeded samples from simple manifolds with known geometry, used as ground
//! truth for the estimators.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldKind {
    Circle,
    Sphere,
    Torus,
    Hypercube,
    GaussianBlob,
    Line,
}

impl std::str::FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "circle" => ManifoldKind::Circle,
            "sphere" => ManifoldKind::Sphere,
            "torus" => ManifoldKind::Torus,
            "hypercube" => ManifoldKind::Hypercube,
            "gaussian_blob" | "blob" => ManifoldKind::GaussianBlob,
            "line" => ManifoldKind::Line,
            other => return Err(Error::Parameter(format!("unknown manifold kind {other:?}"))),
        })
    }
}

/// Shape parameters for [`sample_manifold`].
///
/// `radius` is the size parameter of every kind: circle and sphere radius,
/// torus major radius, hypercube side length, blob standard deviation and
/// line length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleParams {
    pub radius: f64,
    /// Torus tube radius.
    pub minor_radius: f64,
    /// Intrinsic dimension for sphere (S^dim), hypercube and blob.
    pub dim: usize,
    /// Ambient dimension; larger than the natural one embeds through a random
    /// orthonormal map.
    pub ambient: Option<usize>,
    /// Standard deviation of isotropic Gaussian noise.
    pub noise: f64,
}

impl Default for SampleParams {
    fn default() -> Self {
        Self {
            radius: 1.0,
            minor_radius: 0.3,
            dim: 2,
            ambient: None,
            noise: 0.0,
        }
    }
}

impl ManifoldKind {
    fn natural_dim(self, params: &SampleParams) -> usize {
        match self {
            ManifoldKind::Circle => 2,
            ManifoldKind::Sphere => params.dim + 1,
            ManifoldKind::Torus => 3,
            ManifoldKind::Hypercube | ManifoldKind::GaussianBlob => params.dim,
            ManifoldKind::Line => 1,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Random `ambient x natural` matrix with orthonormal columns.
pub fn random_orthonormal_map(ambient: usize, natural: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(ambient, natural, |_, _| gaussian(rng));
    let qr = g.qr();
    qr.q().columns(0, natural).into_owned()
}

pub fn sample_manifold(kind: ManifoldKind, n: usize, params: &SampleParams, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::Parameter("sample size n must be >= 1".into()));
    }
    if !(params.radius > 0.0) || !params.radius.is_finite() {
        return Err(Error::Parameter(format!(
            "radius must be positive (got {})",
            params.radius
        )));
    }
    if !(params.noise >= 0.0) {
        return Err(Error::Parameter(format!("noise must be >= 0 (got {})", params.noise)));
    }
    if matches!(
        kind,
        ManifoldKind::Sphere | ManifoldKind::Hypercube | ManifoldKind::GaussianBlob
    ) && params.dim == 0
    {
        return Err(Error::Parameter("intrinsic dimension must be >= 1".into()));
    }
    if kind == ManifoldKind::Torus && !(params.minor_radius > 0.0 && params.minor_radius < params.radius) {
        return Err(Error::Parameter("torus needs 0 < minor_radius < radius".into()));
    }
    let natural = kind.natural_dim(params);
    let ambient = params.ambient.unwrap_or(natural);
    if ambient < natural {
        return Err(Error::Parameter(format!(
            "ambient dimension {ambient} is smaller than the manifold's natural dimension {natural}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = params.radius;
    let mut data = Vec::with_capacity(n * natural);
    for _ in 0..n {
        match kind {
            ManifoldKind::Circle => {
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                data.extend_from_slice(&[r * t.cos(), r * t.sin()]);
            }
            ManifoldKind::Sphere => {
                let g: Vec<f64> = loop {
                    let g: Vec<f64> = (0..natural).map(|_| gaussian(&mut rng)).collect();
                    if g.iter().any(|v| *v != 0.0) {
                        break g;
                    }
                };
                let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                data.extend(g.iter().map(|v| r * v / norm));
            }
            ManifoldKind::Torus => {
                let u = rng.random_range(0.0..std::f64::consts::TAU);
                let v = rng.random_range(0.0..std::f64::consts::TAU);
                let ring = r + params.minor_radius * v.cos();
                data.extend_from_slice(&[ring * u.cos(), ring * u.sin(), params.minor_radius * v.sin()]);
            }
            ManifoldKind::Hypercube => data.extend((0..natural).map(|_| r * rng.random::<f64>())),
            ManifoldKind::GaussianBlob => data.extend((0..natural).map(|_| r * gaussian(&mut rng))),
            ManifoldKind::Line => data.push(r * rng.random::<f64>()),
        }
    }
    let mut cloud = PointCloud::from_flat(data, n, natural)?;
    if ambient > natural {
        let map = random_orthonormal_map(ambient, natural, &mut rng);
        cloud = cloud.map_points(ambient, |src, dst| {
            for (a, d) in dst.iter_mut().enumerate() {
                *d = (0..natural).map(|b| map[(a, b)] * src[b]).sum();
            }
        })?;
    }
    if params.noise > 0.0 {
        let sigma = params.noise;
        cloud = cloud.map_points(ambient, |src, dst| {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = s + sigma * gaussian(&mut rng);
            }
        })?;
    }
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norms(c: &PointCloud) -> Vec<f64> {
        c.points()
            .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    #[test]
    fn circle_on_radius() {
        let c = sample_manifold(ManifoldKind::Circle, 100, &SampleParams::default(), 3).unwrap();
        assert_eq!((c.len(), c.dim()), (100, 2));
        assert!(norms(&c).iter().all(|r| (r - 1.0).abs() < 1e-12));
    }

    #[test]
    fn sphere_radius_two() {
        let params = SampleParams {
            radius: 2.0,
            ..Default::default()
        };
        let c = sample_manifold(ManifoldKind::Sphere, 200, &params, 1).unwrap();
        assert_eq!(c.dim(), 3);
        assert!(norms(&c).iter().all(|r| (r - 2.0).abs() < 1e-12));
    }

    #[test]
    fn seeded_and_reproducible() {
        let p = SampleParams::default();
        let a = sample_manifold(ManifoldKind::Torus, 50, &p, 9).unwrap();
        let b = sample_manifold(ManifoldKind::Torus, 50, &p, 9).unwrap();
        let c = sample_manifold(ManifoldKind::Torus, 50, &p, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_params() {
        let p = SampleParams {
            dim: 5,
            ambient: Some(3),
            ..Default::default()
        };
        assert!(matches!(
            sample_manifold(ManifoldKind::Hypercube, 10, &p, 0),
            Err(Error::Parameter(_))
        ));
        assert!(sample_manifold(ManifoldKind::Line, 0, &SampleParams::default(), 0).is_err());
        let neg = SampleParams {
            noise: -1.0,
            ..Default::default()
        };
        assert!(sample_manifold(ManifoldKind::Circle, 5, &neg, 0).is_err());
    }

    #[test]
    fn noise_moves_points_off_the_circle() {
        let p = SampleParams {
            noise: 0.05,
            ..Default::default()
        };
        let c = sample_manifold(ManifoldKind::Circle, 100, &p, 3).unwrap();
        assert!(norms(&c).iter().any(|r| (r - 1.0).abs() > 1e-3));
    }

    #[test]
    fn kind_parse() {
        assert_eq!(
            "gaussian-blob".parse::<ManifoldKind>().unwrap(),
            ManifoldKind::GaussianBlob
        );
        assert!("klein".parse::<ManifoldKind>().is_err());
    }
}
