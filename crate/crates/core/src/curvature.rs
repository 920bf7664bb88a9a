//! Pointwise Gaussian-curvature estimation on point-cloud manifolds.
//!
//! At every point `z` a local frame is estimated from the covariance of its
//! `k` neighbors: the top `m` eigenvectors span the tangent space and the
//! eigenvector of the smallest non-zero eigenvalue beyond the tangent block is
//! the normal `u`. Neighbors are projected into the tangent frame
//! (`o_j = [(z_j - z)·ξ_1, …, (z_j - z)·ξ_m]`) and a pure quadratic
//! hypersurface `h(o) = ½ Σ_ab θ_ab o_a o_b` is fitted to the normal offsets
//! `(z_j - z)·u` in closed form. The curvature at `z` is `det(θ)`, with `θ`
//! reshaped to `m x m` and symmetrized.
//!
//! For `m = 2` this is the classical Gaussian curvature of a surface; for
//! other `m` it is the determinant of the fitted second-order form.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointcloud::{NeighborGraph, PointCloud};

/// Eigenvalues below this fraction of the largest one are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Ridge weight relative to the mean diagonal of the normal matrix.
pub const RIDGE_SCALE: f64 = 1e-8;
const MAX_REFINEMENT_STEPS: usize = 64;
const SKIP_WARNING_FRACTION: f64 = 0.2;

/// Tangent dimension: fixed, or resolved from the global intrinsic dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TangentDim {
    Fixed(usize),
    Auto,
}

impl std::str::FromStr for TangentDim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(TangentDim::Auto);
        }
        let m: usize = s
            .parse()
            .map_err(|_| Error::Parameter(format!("tangent dimension must be an integer or \"auto\", got {s:?}")))?;
        if m == 0 {
            return Err(Error::Parameter("tangent dimension m must be >= 1".into()));
        }
        Ok(TangentDim::Fixed(m))
    }
}

impl std::fmt::Display for TangentDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TangentDim::Fixed(m) => write!(f, "{m}"),
            TangentDim::Auto => f.write_str("auto"),
        }
    }
}

/// Resolves `m` from a global intrinsic-dimension estimate, clamped to `[1, p-1]`.
pub fn resolve_tangent_dim(global_id: f64, p: usize) -> Result<usize> {
    if p < 2 {
        return Err(Error::Parameter(format!(
            "curvature needs ambient dimension p >= 2 (p = {p})"
        )));
    }
    let m = global_id.round();
    let m = if m.is_finite() { m.max(1.0) as usize } else { 1 };
    Ok(m.clamp(1, p - 1))
}

/// Default neighbor count for a tangent dimension: `max(20, m^2 + 5)`.
pub fn default_k(m: usize) -> usize {
    20.max(m * m + 5)
}

/// Local PCA frame at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFrame {
    pub center: Vec<f64>,
    pub tangent_basis: Vec<Vec<f64>>,
    pub normal: Vec<f64>,
    /// All `p` covariance eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram-Schmidt `candidate` against `basis`; returns the unit remainder if any.
fn orthonormalize(candidate: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let scale = dot(candidate, candidate).sqrt();
    if scale == 0.0 {
        return None;
    }
    let mut v: Vec<f64> = candidate.iter().map(|x| x / scale).collect();
    // two passes for numerical orthogonality
    for _ in 0..2 {
        for b in basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    let norm = dot(&v, &v).sqrt();
    (norm > 1e-8).then(|| v.iter().map(|x| x / norm).collect())
}

struct Spectrum {
    values: Vec<f64>,
    /// Eigenvectors for the leading entries of `values`; may be shorter than `values`.
    vectors: Vec<Vec<f64>>,
}

fn sorted_spectrum(matrix: DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let eig = SymmetricEigen::new(matrix);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (values, vectors)
}

/// Eigen-decomposes the neighbor covariance `Σ y_j y_j^T`.
///
/// When `p > k` the `k x k` Gram matrix is decomposed instead; it shares the
/// non-zero spectrum and eigenvectors are mapped back through the neighbor
/// offsets.
fn covariance_spectrum(offsets: &[Vec<f64>], p: usize) -> Spectrum {
    let k = offsets.len();
    if p <= k {
        let mut cov = DMatrix::<f64>::zeros(p, p);
        for y in offsets {
            for a in 0..p {
                for b in a..p {
                    cov[(a, b)] += y[a] * y[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                cov[(a, b)] = cov[(b, a)];
            }
        }
        let (values, vecs) = sorted_spectrum(cov);
        Spectrum {
            values,
            vectors: vecs.into_iter().map(|v| v.iter().copied().collect()).collect(),
        }
    } else {
        let gram = DMatrix::<f64>::from_fn(k, k, |i, j| dot(&offsets[i], &offsets[j]));
        let (mut values, vecs) = sorted_spectrum(gram);
        let top = values[0].max(0.0);
        let mut vectors = Vec::new();
        for (lambda, v) in values.iter().zip(&vecs) {
            if *lambda <= RANK_TOLERANCE * top || *lambda <= 0.0 {
                break;
            }
            let mut xi = vec![0.0; p];
            for (coef, y) in v.iter().zip(offsets) {
                xi.iter_mut().zip(y).for_each(|(x, yy)| *x += coef * yy);
            }
            let norm = dot(&xi, &xi).sqrt();
            xi.iter_mut().for_each(|x| *x /= norm);
            vectors.push(xi);
        }
        values.resize(p, 0.0);
        Spectrum { values, vectors }
    }
}

/// Builds the tangent frame of `point` from its graph neighbors.
pub fn local_frame(cloud: &PointCloud, graph: &NeighborGraph, point: usize, m: usize) -> Result<LocalFrame> {
    let p = cloud.dim();
    let k = graph.k();
    if m == 0 || m >= p {
        return Err(Error::Parameter(format!(
            "tangent dimension must satisfy 1 <= m < p (m = {m}, p = {p})"
        )));
    }
    if k < m + 1 {
        return Err(Error::Parameter(format!(
            "curvature needs k >= m + 1 neighbors (k = {k}, m = {m})"
        )));
    }
    if point >= cloud.len() {
        return Err(Error::Parameter(format!("point index {point} out of range")));
    }
    let center = cloud.point(point).to_vec();
    let neighbors: Vec<&[f64]> = graph.indices(point).iter().map(|&j| cloud.point(j)).collect();
    let mut centroid = vec![0.0; p];
    for nb in &neighbors {
        centroid.iter_mut().zip(nb.iter()).for_each(|(c, x)| *c += x);
    }
    centroid.iter_mut().for_each(|c| *c /= k as f64);
    let offsets: Vec<Vec<f64>> = neighbors
        .iter()
        .map(|nb| nb.iter().zip(&centroid).map(|(x, c)| x - c).collect())
        .collect();

    let Spectrum {
        mut values,
        mut vectors,
    } = covariance_spectrum(&offsets, p);
    let top = values[0];
    let spread: f64 = neighbors.iter().map(|nb| dot(nb, nb)).sum::<f64>() / k as f64;
    if !(top > 1e-24 * spread.max(f64::MIN_POSITIVE)) {
        return Err(Error::DegenerateFrame { point });
    }
    if let Some(bad) = values.iter().find(|&&l| l < -1e-12 * top) {
        return Err(Error::Internal(format!(
            "covariance eigenvalue {bad} is negative at point {point}"
        )));
    }
    values.iter_mut().for_each(|l| *l = l.max(0.0));

    let zero = RANK_TOLERANCE * top;
    let normal_index = (m..p).rev().find(|&i| values[i] > zero).unwrap_or(m);

    // Complete the basis when the spectrum only provided the non-zero block.
    if vectors.len() <= normal_index {
        let mut seeds: Vec<Vec<f64>> = vec![centroid.iter().zip(&center).map(|(c, z)| c - z).collect()];
        seeds.extend((0..p).map(|i| {
            let mut e = vec![0.0; p];
            e[i] = 1.0;
            e
        }));
        for seed in seeds {
            if vectors.len() > normal_index {
                break;
            }
            if let Some(v) = orthonormalize(&seed, &vectors) {
                vectors.push(v);
            }
        }
    }

    Ok(LocalFrame {
        center,
        tangent_basis: vectors[..m].to_vec(),
        normal: vectors[normal_index].clone(),
        eigenvalues: values,
    })
}

/// Solves the least-squares system `design · θ ≈ target` through the ridge
/// regularized normal equations `(OᵀO + εI) θ = Oᵀ T`, followed by iterative
/// refinement against the unregularized equations.
///
/// `ε = 1e-8 · trace(OᵀO) / q` for `q` unknowns. Refinement drives the
/// solution toward the minimum-norm least-squares solution. Coefficients of
/// identical columns (the duplicated `θ_ab` / `θ_ba`) are then averaged,
/// which removes the rounding error the ridge amplifies along that exact
/// null direction.
pub fn solve_quadratic_fit(design: &DMatrix<f64>, target: &DVector<f64>) -> Option<DVector<f64>> {
    let q = design.ncols();
    let normal = design.transpose() * design;
    let rhs = design.transpose() * target;
    let trace = normal.trace();
    if !(trace > 0.0) || !trace.is_finite() {
        return None;
    }
    let eps = RIDGE_SCALE * trace / q as f64;
    let mut regularized = normal.clone();
    for i in 0..q {
        regularized[(i, i)] += eps;
    }
    let chol = regularized.cholesky()?;
    let mut theta = chol.solve(&rhs);
    for _ in 0..MAX_REFINEMENT_STEPS {
        let residual = &rhs - &normal * &theta;
        let step = chol.solve(&residual);
        theta += &step;
        if step.amax() <= 1e-15 * theta.amax() {
            break;
        }
    }
    for group in identical_columns(design) {
        let mean = group.iter().map(|&c| theta[c]).sum::<f64>() / group.len() as f64;
        group.iter().for_each(|&c| theta[c] = mean);
    }
    theta.iter().all(|v| v.is_finite()).then_some(theta)
}

/// Groups of two or more bitwise-identical columns.
fn identical_columns(design: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let q = design.ncols();
    let mut seen = vec![false; q];
    let mut groups = Vec::new();
    for a in 0..q {
        if seen[a] {
            continue;
        }
        let group: Vec<usize> = (a..q)
            .filter(|&b| !seen[b] && design.column(a) == design.column(b))
            .collect();
        group.iter().for_each(|&b| seen[b] = true);
        if group.len() > 1 {
            groups.push(group);
        }
    }
    groups
}

/// Design matrix rows `½ o_a o_b` over all `(a, b)`, row-major in `(a, b)`.
pub fn quadratic_design(projections: &[Vec<f64>], m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(projections.len(), m * m, |j, col| {
        let (a, b) = (col / m, col % m);
        0.5 * projections[j][a] * projections[j][b]
    })
}

/// Reshapes the fitted coefficients to `m x m` and symmetrizes them.
pub fn symmetric_form(theta: &DVector<f64>, m: usize) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(m, m, |a, b| theta[a * m + b]);
    (&raw + raw.transpose()) * 0.5
}

/// Curvature proxy `det(θ)` at `point`, or `None` when the fit is degenerate.
pub fn gaussian_curvature_at(cloud: &PointCloud, graph: &NeighborGraph, point: usize, m: usize) -> Result<Option<f64>> {
    let frame = local_frame(cloud, graph, point, m)?;
    Ok(curvature_in_frame(cloud, graph, point, &frame))
}

fn curvature_in_frame(cloud: &PointCloud, graph: &NeighborGraph, point: usize, frame: &LocalFrame) -> Option<f64> {
    let m = frame.tangent_basis.len();
    let mut projections = Vec::with_capacity(graph.k());
    let mut heights = Vec::with_capacity(graph.k());
    for &j in graph.indices(point) {
        let offset: Vec<f64> = cloud.point(j).iter().zip(&frame.center).map(|(x, z)| x - z).collect();
        projections.push(
            frame
                .tangent_basis
                .iter()
                .map(|xi| dot(&offset, xi))
                .collect::<Vec<_>>(),
        );
        heights.push(dot(&offset, &frame.normal));
    }
    let design = quadratic_design(&projections, m);
    let theta = solve_quadratic_fit(&design, &DVector::from_vec(heights))?;
    let g = symmetric_form(&theta, m).determinant();
    g.is_finite().then_some(g)
}

/// Per-point curvatures and their manifold-level aggregates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureEstimates {
    /// `None` where the fit was degenerate.
    pub values: Vec<Option<f64>>,
    pub m: usize,
    pub k: usize,
    pub mean_curvature: f64,
    pub mean_abs_curvature: f64,
    pub skipped: usize,
    pub warnings: Vec<String>,
}

impl CurvatureEstimates {
    fn from_values(values: Vec<Option<f64>>, m: usize, k: usize) -> Result<Self> {
        let defined: Vec<f64> = values.iter().flatten().copied().collect();
        if defined.is_empty() {
            return Err(Error::Validation("curvature fit is degenerate at every point".into()));
        }
        let count = defined.len() as f64;
        let mean_curvature = defined.iter().sum::<f64>() / count;
        let mean_abs_curvature = defined.iter().map(|g| g.abs()).sum::<f64>() / count;
        let skipped = values.len() - defined.len();
        let mut warnings = Vec::new();
        if skipped as f64 > SKIP_WARNING_FRACTION * values.len() as f64 {
            warnings.push(format!(
                "curvature skipped at {skipped} of {} points (degenerate local fits)",
                values.len()
            ));
        }
        Ok(Self {
            values,
            m,
            k,
            mean_curvature,
            mean_abs_curvature,
            skipped,
            warnings,
        })
    }
}

/// Curvature at every point of `cloud` with a fixed tangent dimension.
pub fn curvature_profile(cloud: &PointCloud, graph: &NeighborGraph, m: usize) -> Result<CurvatureEstimates> {
    if graph.len() != cloud.len() {
        return Err(Error::Parameter("neighbor graph does not match the cloud".into()));
    }
    let values: Vec<Result<Option<f64>>> = (0..cloud.len())
        .into_par_iter()
        .map(|i| match local_frame(cloud, graph, i, m) {
            Ok(frame) => Ok(curvature_in_frame(cloud, graph, i, &frame)),
            Err(Error::DegenerateFrame { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    CurvatureEstimates::from_values(values, m, graph.k())
}
