//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use nalgebra::DMatrix;
use pmg::PointCloud;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cloud(n: usize, p: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let data: Vec<f64> = (0..n * p).map(|_| r.random::<f64>()).collect();
    PointCloud::from_flat(data, n, p).unwrap()
}

pub fn gaussian_cloud(n: usize, p: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let data: Vec<f64> = (0..n * p).map(|_| StandardNormal.sample(&mut r)).collect();
    PointCloud::from_flat(data, n, p).unwrap()
}

pub fn circle(n: usize, radius: f64, center: (f64, f64)) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            [center.0 + radius * t.cos(), center.1 + radius * t.sin()]
        })
        .collect()
}

/// Random rotation (orthogonal, det +1) of size `p`.
pub fn random_rotation(p: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let g = DMatrix::from_fn(p, p, |_, _| -> f64 { StandardNormal.sample(&mut r) });
    let mut q = g.qr().q();
    if q.determinant() < 0.0 {
        for i in 0..p {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Applies `x -> s * R x + t` to every point.
pub fn transform(cloud: &PointCloud, rot: &DMatrix<f64>, scale: f64, shift: &[f64]) -> PointCloud {
    let p = cloud.dim();
    let mut data = Vec::with_capacity(cloud.len() * p);
    for x in cloud.points() {
        for a in 0..p {
            let v: f64 = (0..p).map(|b| rot[(a, b)] * x[b]).sum();
            data.push(scale * v + shift[a]);
        }
    }
    PointCloud::from_flat(data, cloud.len(), p).unwrap()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s.sqrt()
}

/// Exhaustive kNN: full sort of all distances, ties by index.
pub fn brute_knn(cloud: &PointCloud, k: usize) -> Vec<Vec<(usize, f64)>> {
    (0..cloud.len())
        .map(|i| {
            let mut all: Vec<(usize, f64)> = (0..cloud.len())
                .filter(|&j| j != i)
                .map(|j| (j, dist(cloud.point(i), cloud.point(j))))
                .collect();
            all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
            all.truncate(k);
            all
        })
        .collect()
}

pub fn brute_diameter(cloud: &PointCloud) -> f64 {
    let mut best = 0.0f64;
    for i in 0..cloud.len() {
        for j in 0..cloud.len() {
            best = best.max(dist(cloud.point(i), cloud.point(j)));
        }
    }
    best
}

/// Naive MLE: literal formula with no zero handling.
pub fn naive_mle(distances: &[f64]) -> f64 {
    let k = distances.len();
    let rk = distances[k - 1];
    let mut s = 0.0;
    for r in distances {
        s += (r / rk).ln();
    }
    -1.0 / (s / k as f64)
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, sorted descending.
pub fn jacobi_eigenvalues(mut a: DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let scale: f64 = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[(p, q)] == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

/// Least squares through the normal equations with an explicit pseudo-inverse.
pub fn pinv_least_squares(design: &DMatrix<f64>, target: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
    let normal = design.transpose() * design;
    let tol = 1e-12 * normal.norm();
    let pinv = normal.pseudo_inverse(tol).unwrap();
    pinv * (design.transpose() * target)
}

/// Diagram as sorted `(dim, birth, death)` triples without zero-length pairs.
pub type Bars = Vec<(usize, f64, f64)>;

/// Standard left-to-right boundary-matrix reduction over Z/2 of the full Rips
/// 2-skeleton; no clearing, no implicit cofaces.
pub fn naive_diagrams(cloud: &PointCloud, cap: f64) -> Bars {
    let n = cloud.len();
    let d = |i: usize, j: usize| dist(cloud.point(i), cloud.point(j));
    // (value, dim, vertices)
    let mut simplices: Vec<(f64, usize, Vec<usize>)> = (0..n).map(|v| (0.0, 0, vec![v])).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if d(i, j) <= cap {
                simplices.push((d(i, j), 1, vec![i, j]));
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let v = d(i, j).max(d(i, k)).max(d(j, k));
                if d(i, j) <= cap && d(i, k) <= cap && d(j, k) <= cap {
                    simplices.push((v, 2, vec![i, j, k]));
                }
            }
        }
    }
    simplices.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let index: std::collections::HashMap<Vec<usize>, usize> =
        simplices.iter().enumerate().map(|(i, s)| (s.2.clone(), i)).collect();
    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|s| {
            if s.1 == 0 {
                return Vec::new();
            }
            let mut col: Vec<usize> = (0..s.2.len())
                .map(|drop| {
                    let face: Vec<usize> =
                        s.2.iter()
                            .enumerate()
                            .filter(|(i, _)| *i != drop)
                            .map(|(_, v)| *v)
                            .collect();
                    index[&face]
                })
                .collect();
            col.sort_unstable();
            col
        })
        .collect();
    let mut low_owner: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match low_owner.get(&low) {
                Some(&other) => {
                    let merged = xor_sorted(&columns[j], &columns[other]);
                    columns[j] = merged;
                }
                None => {
                    low_owner.insert(low, j);
                    break;
                }
            }
        }
    }
    let mut bars = Vec::new();
    let mut paired = vec![false; simplices.len()];
    for (&low, &j) in &low_owner {
        paired[low] = true;
        paired[j] = true;
        let (b, dth) = (simplices[low].0, simplices[j].0);
        if dth > b {
            bars.push((simplices[low].1, b, dth));
        }
    }
    for (i, s) in simplices.iter().enumerate() {
        if !paired[i] && columns[i].is_empty() && s.1 <= 1 {
            bars.push((s.1, s.0, f64::INFINITY));
        }
    }
    bars.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.partial_cmp(&b.1).unwrap())
            .then(a.2.partial_cmp(&b.2).unwrap())
    });
    bars
}

fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn library_bars(d: &pmg::topology::Diagrams) -> Bars {
    let mut bars: Bars =
        d.h0.pairs
            .iter()
            .map(|p| (0, p.birth, p.death))
            .chain(d.h1.pairs.iter().map(|p| (1, p.birth, p.death)))
            .collect();
    bars.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.partial_cmp(&b.1).unwrap())
            .then(a.2.partial_cmp(&b.2).unwrap())
    });
    bars
}
