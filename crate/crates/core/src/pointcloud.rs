//! Point clouds, file ingestion, exact k-nearest neighbors and the diameter.
//!
//! A [`PointCloud`] stores `n` points of ambient dimension `p` in a single
//! row-major buffer. Clouds are immutable once built and every constructor
//! validates that all coordinates are finite.
//!
//! Two on-disk formats are supported:
//!
//! * CSV: one point per row, comma-separated reals, no header. A first row made
//!   of non-numeric tokens is treated as a header and skipped.
//! * Binary: little-endian header `b"PMG1"`, `u32 n`, `u32 p`, followed by
//!   `n * p` IEEE-754 `f64` values in row-major order.

use std::cmp::Ordering;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"PMG1";
const BINARY_HEADER_LEN: usize = 12;

/// On-disk encoding of a point cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Binary,
}

impl Format {
    /// Sniffs the format from the leading magic bytes, defaulting to CSV.
    pub fn detect(path: impl AsRef<Path>) -> Result<Format> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(if bytes.starts_with(BINARY_MAGIC) {
            Format::Binary
        } else {
            Format::Csv
        })
    }
}

/// An ordered sample of `n` points in `R^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    n: usize,
    p: usize,
    label: Option<String>,
}

impl PointCloud {
    /// Builds a cloud from a row-major buffer of `n * p` values.
    pub fn from_flat(data: Vec<f64>, n: usize, p: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("point cloud is empty (n = 0)".into()));
        }
        if p == 0 {
            return Err(Error::Validation("point cloud has dimension p = 0".into()));
        }
        if data.len() != n * p {
            return Err(Error::Validation(format!(
                "buffer length {} does not match shape {n} x {p}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite coordinate at point {}, column {}",
                pos / p,
                pos % p
            )));
        }
        Ok(Self {
            data,
            n,
            p,
            label: None,
        })
    }

    /// Builds a cloud from a list of equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let p = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * p);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != p {
                return Err(Error::Validation(format!(
                    "row {i} has {} values, expected {p}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, rows.len(), p)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false: clouds hold at least one point.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.p)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    /// Returns the sub-cloud made of `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            if i >= self.n {
                return Err(Error::Parameter(format!(
                    "index {i} out of range for {} points",
                    self.n
                )));
            }
            data.extend_from_slice(self.point(i));
        }
        let mut out = Self::from_flat(data, indices.len(), self.p)?;
        out.label = self.label.clone();
        Ok(out)
    }

    /// Applies `f` to every point, producing a cloud of dimension `p_out`.
    pub fn map_points<F>(&self, p_out: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let mut data = vec![0.0; self.n * p_out];
        for (src, dst) in self.points().zip(data.chunks_exact_mut(p_out.max(1))) {
            f(src, dst);
        }
        let mut out = Self::from_flat(data, self.n, p_out)?;
        out.label = self.label.clone();
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>, format: Format) -> Result<Self> {
        load_point_cloud(path, format)
    }

    pub fn save(&self, path: impl AsRef<Path>, format: Format) -> Result<()> {
        let path = path.as_ref();
        let bytes = match format {
            Format::Binary => self.to_binary(),
            Format::Csv => self.to_csv().into_bytes(),
        };
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(&bytes).map_err(|e| Error::io(path, e))
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(BINARY_HEADER_LEN + self.data.len() * 8);
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&(self.p as u32).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// CSV text using the shortest round-tripping decimal form of each value.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.points() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < BINARY_HEADER_LEN || &bytes[..4] != BINARY_MAGIC {
            return Err(Error::Format {
                line: 0,
                message: "missing PMG1 header".into(),
            });
        }
        let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let p = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let body = &bytes[BINARY_HEADER_LEN..];
        if body.len() != n * p * 8 {
            return Err(Error::Format {
                line: 0,
                message: format!(
                    "header declares {n} x {p} values but payload holds {} bytes",
                    body.len()
                ),
            });
        }
        let data = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::from_flat(data, n, p)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut data = Vec::new();
        let mut p = None;
        let mut n = 0usize;
        for (idx, record) in reader.records().enumerate() {
            let line = idx + 1;
            let record = record.map_err(|e| Error::Format {
                line: e.position().map(|p| p.line() as usize).unwrap_or(line),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(line);
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse::<f64>().ok()).collect();
            if n == 0 && p.is_none() && parsed.iter().all(Option::is_none) {
                // header row
                continue;
            }
            let width = record.len();
            match p {
                None => p = Some(width),
                Some(expected) if expected != width => {
                    return Err(Error::Format {
                        line,
                        message: format!("expected {expected} values, found {width}"),
                    });
                }
                Some(_) => {}
            }
            for (col, value) in parsed.into_iter().enumerate() {
                let value = value.ok_or_else(|| Error::Format {
                    line,
                    message: format!("column {} is not a real number: {:?}", col + 1, &record[col]),
                })?;
                if !value.is_finite() {
                    return Err(Error::Validation(format!(
                        "non-finite value {value} at line {line}, column {}",
                        col + 1
                    )));
                }
                data.push(value);
            }
            n += 1;
        }
        let Some(p) = p else {
            return Err(Error::Validation("no data rows found".into()));
        };
        Self::from_flat(data, n, p)
    }
}

/// Reads a cloud from disk. The file stem becomes the cloud's label.
pub fn load_point_cloud(path: impl AsRef<Path>, format: Format) -> Result<PointCloud> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let cloud = match format {
        Format::Binary => PointCloud::from_binary(&bytes)?,
        Format::Csv => {
            let text = String::from_utf8(bytes).map_err(|e| Error::Format {
                line: 0,
                message: format!("file is not UTF-8: {e}"),
            })?;
            PointCloud::from_csv_str(&text)?
        }
    };
    Ok(match path.file_stem().and_then(|s| s.to_str()) {
        Some(stem) => cloud.with_label(stem),
        None => cloud,
    })
}

#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

/// Per-point k-nearest-neighbor lists, sorted by ascending distance.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    k: usize,
    indices: Vec<usize>,
    distances: Vec<f64>,
}

impl NeighborGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.indices.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self, i: usize) -> &[usize] {
        &self.indices[i * self.k..(i + 1) * self.k]
    }

    pub fn distances(&self, i: usize) -> &[f64] {
        &self.distances[i * self.k..(i + 1) * self.k]
    }

    /// Distance to the k-th (farthest retained) neighbor of `i`.
    pub fn radius(&self, i: usize) -> f64 {
        self.distances[(i + 1) * self.k - 1]
    }

    /// Keeps only the first `k` neighbors of every point.
    pub fn truncate(&self, k: usize) -> Result<NeighborGraph> {
        if k == 0 || k > self.k {
            return Err(Error::Parameter(format!(
                "cannot truncate a {}-neighbor graph to k = {k}",
                self.k
            )));
        }
        let n = self.len();
        let mut indices = Vec::with_capacity(n * k);
        let mut distances = Vec::with_capacity(n * k);
        for i in 0..n {
            indices.extend_from_slice(&self.indices(i)[..k]);
            distances.extend_from_slice(&self.distances(i)[..k]);
        }
        Ok(NeighborGraph { k, indices, distances })
    }
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Exact Euclidean k-nearest neighbors of every point, self excluded.
///
/// Ties are broken by ascending point index. Duplicate points are allowed and
/// show up as zero distances.
pub fn knn(cloud: &PointCloud, k: usize) -> Result<NeighborGraph> {
    let n = cloud.len();
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!(
            "k must satisfy 1 <= k <= n - 1 (k = {k}, n = {n})"
        )));
    }
    let rows: Vec<Vec<(f64, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let center = cloud.point(i);
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (euclidean(center, cloud.point(j)), j))
                .collect();
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, by_distance_then_index);
                cand.truncate(k);
            }
            cand.sort_unstable_by(by_distance_then_index);
            cand
        })
        .collect();
    let mut indices = Vec::with_capacity(n * k);
    let mut distances = Vec::with_capacity(n * k);
    for row in rows {
        for (d, j) in row {
            indices.push(j);
            distances.push(d);
        }
    }
    Ok(NeighborGraph { k, indices, distances })
}

/// Maximum pairwise Euclidean distance; zero for a single point.
pub fn diameter(cloud: &PointCloud) -> f64 {
    let n = cloud.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let a = cloud.point(i);
            ((i + 1)..n)
                .map(|j| squared_euclidean(a, cloud.point(j)))
                .fold(0.0_f64, f64::max)
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}
