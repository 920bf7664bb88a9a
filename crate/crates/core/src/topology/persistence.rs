//! Persistent homology of a Rips filtration in dimensions 0 and 1 over Z/2.
//!
//! H0 comes from a union-find sweep over the sorted edges (elder rule). H1 is
//! computed by reducing the coboundary matrix of the edges: columns are edges
//! in decreasing filtration order, rows are triangles, and the pivot of a
//! column is its earliest triangle. Edges that already kill an H0 class are
//! cleared and never reduced. Triangle coboundaries are enumerated on the fly
//! and reduced columns are stored only as the list of edges that were added
//! to them.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use serde::{Serialize, Serializer};

use super::filtration::Filtration;

/// Birth/death pair; `death` is infinite for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }
}

impl Serialize for PersistencePair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let death = if self.death.is_finite() { Some(self.death) } else { None };
        (self.birth, death).serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceDiagram {
    pub dimension: usize,
    /// Sorted by `(birth, death)`.
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    fn new(dimension: usize, mut pairs: Vec<PersistencePair>) -> Self {
        pairs.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
        Self { dimension, pairs }
    }

    pub fn finite(&self) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(|p| !p.is_essential())
    }

    pub fn essential_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.is_essential()).count()
    }

    /// Number of intervals `[birth, death)` containing `epsilon`.
    pub fn betti(&self, epsilon: f64) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.birth <= epsilon && epsilon < p.death)
            .count()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// A triangle keyed by its filtration value, then its sorted vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Triangle {
    diam: f64,
    vertices: [u32; 3],
}

impl Eq for Triangle {}

impl std::hash::Hash for Triangle {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.diam.to_bits().hash(state);
        self.vertices.hash(state);
    }
}

impl Ord for Triangle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.diam
            .total_cmp(&other.diam)
            .then(self.vertices.cmp(&other.vertices))
    }
}

impl PartialOrd for Triangle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn cofacets(filtration: &Filtration, i: usize, j: usize, length: f64, out: &mut Vec<Triangle>) {
    out.clear();
    for v in 0..filtration.vertex_count() {
        if v == i || v == j || !filtration.has_edge(i, v) || !filtration.has_edge(j, v) {
            continue;
        }
        let diam = length.max(filtration.distance(i, v)).max(filtration.distance(j, v));
        let mut vertices = [i as u32, j as u32, v as u32];
        vertices.sort_unstable();
        out.push(Triangle { diam, vertices });
    }
}

/// The earliest cofacet of an edge, found without materializing the rest.
fn min_cofacet(filtration: &Filtration, i: usize, j: usize, length: f64) -> Option<Triangle> {
    let n = filtration.vertex_count();
    let cap = filtration.epsilon_max();
    let mut best: Option<(f64, usize)> = None;
    for v in 0..n {
        if v == i || v == j {
            continue;
        }
        let (di, dj) = (filtration.distance(i, v), filtration.distance(j, v));
        if di > cap || dj > cap {
            continue;
        }
        let diam = length.max(di).max(dj);
        // vertices are scanned in increasing order, so ties keep the first
        if best.is_none_or(|(d, _)| diam < d) {
            best = Some((diam, v));
        }
    }
    best.map(|(diam, v)| {
        let mut vertices = [i as u32, j as u32, v as u32];
        vertices.sort_unstable();
        Triangle { diam, vertices }
    })
}

/// Pops the minimum surviving entry of a Z/2 column stored as a heap.
fn pop_pivot(heap: &mut BinaryHeap<Reverse<Triangle>>) -> Option<Triangle> {
    while let Some(Reverse(top)) = heap.pop() {
        if heap.peek().map(|r| r.0) == Some(top) {
            heap.pop();
            continue;
        }
        return Some(top);
    }
    None
}

/// H0 and H1 persistence diagrams.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagrams {
    pub h0: PersistenceDiagram,
    pub h1: PersistenceDiagram,
}

/// Computes the H0 and H1 diagrams of `filtration`.
///
/// Zero-persistence pairs are dropped.
pub fn persistence(filtration: &Filtration) -> Diagrams {
    let n = filtration.vertex_count();
    let edges = filtration.edges();

    let mut uf = UnionFind::new(n);
    let mut h0 = Vec::new();
    let mut kills_component = vec![false; edges.len()];
    for (rank, e) in edges.iter().enumerate() {
        if uf.union(e.i, e.j) {
            kills_component[rank] = true;
            if e.length > 0.0 {
                h0.push(PersistencePair {
                    birth: 0.0,
                    death: e.length,
                });
            }
        }
    }
    let components = (0..n).filter(|&v| uf.find(v) == v).count();
    h0.extend((0..components).map(|_| PersistencePair {
        birth: 0.0,
        death: f64::INFINITY,
    }));

    let mut h1 = Vec::new();
    let mut pivot_owner: HashMap<Triangle, usize> = HashMap::new();
    let mut reductions: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut scratch = Vec::new();
    let mut heap = BinaryHeap::new();

    for rank in (0..edges.len()).rev() {
        if kills_component[rank] {
            continue;
        }
        let edge = edges[rank];
        let first = min_cofacet(filtration, edge.i, edge.j, edge.length);

        // Fast path: the earliest cofacet is not yet claimed.
        let pivot = match first {
            None => None,
            Some(t) if !pivot_owner.contains_key(&t) => Some((t, Vec::new())),
            Some(_) => {
                cofacets(filtration, edge.i, edge.j, edge.length, &mut scratch);
                heap.clear();
                heap.extend(scratch.iter().map(|&t| Reverse(t)));
                let mut added: Vec<usize> = Vec::new();
                let mut found = None;
                while let Some(t) = pop_pivot(&mut heap) {
                    let Some(&owner) = pivot_owner.get(&t) else {
                        heap.push(Reverse(t));
                        found = Some(t);
                        break;
                    };
                    // Adds the owner's reduced column: t cancels against it.
                    heap.push(Reverse(t));
                    let mut sources = vec![owner];
                    if let Some(extra) = reductions.get(&owner) {
                        sources.extend_from_slice(extra);
                    }
                    for src in sources {
                        let e = edges[src];
                        cofacets(filtration, e.i, e.j, e.length, &mut scratch);
                        heap.extend(scratch.iter().map(|&t| Reverse(t)));
                        added.push(src);
                    }
                }
                found.map(|t| (t, cancel_mod2(added)))
            }
        };

        match pivot {
            Some((t, added)) => {
                assert!(t.diam >= edge.length, "death precedes birth in H1 reduction");
                if t.diam > edge.length {
                    h1.push(PersistencePair {
                        birth: edge.length,
                        death: t.diam,
                    });
                }
                pivot_owner.insert(t, rank);
                if !added.is_empty() {
                    reductions.insert(rank, added);
                }
            }
            None => h1.push(PersistencePair {
                birth: edge.length,
                death: f64::INFINITY,
            }),
        }
    }

    Diagrams {
        h0: PersistenceDiagram::new(0, h0),
        h1: PersistenceDiagram::new(1, h1),
    }
}

/// Removes entries that occur an even number of times.
fn cancel_mod2(mut items: Vec<usize>) -> Vec<usize> {
    items.sort_unstable();
    let mut out = Vec::with_capacity(items.len());
    let mut i = 0;
    while i < items.len() {
        let mut j = i;
        while j < items.len() && items[j] == items[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(items[i]);
        }
        i = j;
    }
    out
}

/// `(β0, β1)` at scale `epsilon`.
pub fn betti_numbers(filtration: &Filtration, epsilon: f64) -> (usize, usize) {
    let d = persistence(filtration);
    (d.h0.betti(epsilon), d.h1.betti(epsilon))
}
