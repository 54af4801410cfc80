use std::ops::Deref;
use std::sync::Arc;

use rayon::prelude::*;

use super::{within, GridIndex, PointCloud};
use crate::error::{DepthError, Result};

/// Default cap on directed adjacency entries (`2 |E|`).
pub const DEFAULT_EDGE_CAP: u64 = 200_000_000;

/// Neighbors of one vertex as at most two id slices.
#[derive(Clone, Debug)]
pub struct Neighbors<'a> {
    head: std::slice::Iter<'a, u32>,
    tail: std::slice::Iter<'a, u32>,
}

impl<'a> Neighbors<'a> {
    pub fn new(head: &'a [u32], tail: &'a [u32]) -> Self {
        Neighbors {
            head: head.iter(),
            tail: tail.iter(),
        }
    }
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        match self.head.next() {
            Some(&v) => Some(v as usize),
            None => self.tail.next().map(|&v| v as usize),
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.head.len() + self.tail.len();
        (n, Some(n))
    }
}

impl ExactSizeIterator for Neighbors<'_> {}

/// Identifies a graph cheaply: vertex count, entry count and a hash of the degree sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GraphFingerprint {
    pub vertices: usize,
    pub entries: u64,
    pub degree_hash: u64,
}

/// Read access to an undirected simple graph on vertices `0..n`.
pub trait Adjacency: Sync {
    fn vertex_count(&self) -> usize;

    fn degree(&self, v: usize) -> usize;

    fn neighbors(&self, v: usize) -> Neighbors<'_>;

    /// Connection radius when the graph is a neighborhood graph.
    fn radius(&self) -> Option<f64> {
        None
    }

    fn entry_count(&self) -> u64 {
        (0..self.vertex_count())
            .map(|v| self.degree(v) as u64)
            .sum()
    }

    fn max_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    fn fingerprint(&self) -> GraphFingerprint {
        let mut hash = 0xcbf2_9ce4_8422_2325u64;
        let mut entries = 0u64;
        for v in 0..self.vertex_count() {
            let d = self.degree(v) as u64;
            entries += d;
            hash = splitmix(hash ^ d.wrapping_add(v as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        }
        GraphFingerprint {
            vertices: self.vertex_count(),
            entries,
            degree_hash: hash,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Compressed sparse rows with ascending neighbor ids per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsrGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl CsrGraph {
    /// Builds from undirected edges; duplicates are merged, self-loops rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(DepthError::input(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(DepthError::input(format!("self-loop at vertex {a}")));
            }
            rows[a].push(b as u32);
            rows[b].push(a as u32);
        }
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
        }
        Ok(CsrGraph::from_sorted_rows(rows))
    }

    pub fn complete(n: usize) -> Self {
        let rows = (0..n as u32)
            .map(|i| (0..n as u32).filter(|&j| j != i).collect())
            .collect();
        CsrGraph::from_sorted_rows(rows)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        CsrGraph::from_edges(n, &edges).expect("valid path")
    }

    fn from_sorted_rows(rows: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        for row in &rows {
            offsets.push(offsets.last().unwrap() + row.len());
        }
        CsrGraph {
            offsets,
            targets: rows.concat(),
        }
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub fn row(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Undirected edges `(src, dst)` with `src < dst`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |v| {
            self.row(v)
                .iter()
                .filter(move |&&w| (w as usize) > v)
                .map(move |&w| (v, w as usize))
        })
    }

    /// Copy with the extra undirected edge `(a, b)`.
    pub fn with_edge(&self, a: usize, b: usize) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = self.edges().collect();
        edges.push((a, b));
        CsrGraph::from_edges(self.vertex_count(), &edges)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let edges: Vec<(usize, usize)> = self.edges().map(|(a, b)| (perm[a], perm[b])).collect();
        CsrGraph::from_edges(self.vertex_count(), &edges)
    }
}

impl Adjacency for CsrGraph {
    fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    fn neighbors(&self, v: usize) -> Neighbors<'_> {
        Neighbors::new(self.row(v), &[])
    }

    fn entry_count(&self) -> u64 {
        self.targets.len() as u64
    }
}

/// The closed-ball graph `G_r` of a point cloud, in CSR form.
#[derive(Clone, Debug)]
pub struct NeighborhoodGraph {
    radius: f64,
    cloud: Arc<PointCloud>,
    csr: CsrGraph,
}

impl NeighborhoodGraph {
    pub fn build(cloud: Arc<PointCloud>, radius: f64) -> Result<Self> {
        Self::build_with_cap(cloud, radius, DEFAULT_EDGE_CAP)
    }

    /// Builds the graph, failing with a sizing error when `2 |E|` would exceed `edge_cap`.
    ///
    /// Rows are computed independently per vertex and sorted, so the output
    /// does not depend on the thread count.
    pub fn build_with_cap(cloud: Arc<PointCloud>, radius: f64, edge_cap: u64) -> Result<Self> {
        let index = GridIndex::new(&cloud, radius)?;
        let n = cloud.len();
        let degrees: Vec<usize> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut c = 0usize;
                index.for_each_within(&cloud, cloud.point(i), |_| c += 1);
                c - 1
            })
            .collect();
        let total: u64 = degrees.iter().map(|&d| d as u64).sum();
        if total > edge_cap {
            return Err(DepthError::Sizing {
                what: "neighborhood graph entries",
                needed: total,
                cap: edge_cap,
            });
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        for d in &degrees {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut targets = vec![0u32; total as usize];
        let mut slices: Vec<(usize, &mut [u32])> = Vec::with_capacity(n);
        let mut rest = targets.as_mut_slice();
        for (i, &d) in degrees.iter().enumerate() {
            let (row, tail) = rest.split_at_mut(d);
            slices.push((i, row));
            rest = tail;
        }
        slices.into_par_iter().for_each(|(i, row)| {
            let mut k = 0;
            index.for_each_within(&cloud, cloud.point(i), |j| {
                if j as usize != i {
                    row[k] = j;
                    k += 1;
                }
            });
            row.sort_unstable();
        });
        Ok(NeighborhoodGraph {
            radius,
            cloud,
            csr: CsrGraph { offsets, targets },
        })
    }

    pub fn cloud(&self) -> &Arc<PointCloud> {
        &self.cloud
    }

    pub fn csr(&self) -> &CsrGraph {
        &self.csr
    }
}

impl Deref for NeighborhoodGraph {
    type Target = CsrGraph;

    fn deref(&self) -> &CsrGraph {
        &self.csr
    }
}

impl Adjacency for NeighborhoodGraph {
    fn vertex_count(&self) -> usize {
        self.csr.vertex_count()
    }

    #[inline]
    fn degree(&self, v: usize) -> usize {
        self.csr.degree(v)
    }

    #[inline]
    fn neighbors(&self, v: usize) -> Neighbors<'_> {
        self.csr.neighbors(v)
    }

    fn radius(&self) -> Option<f64> {
        Some(self.radius)
    }

    fn entry_count(&self) -> u64 {
        self.csr.entry_count()
    }
}

/// The closed-ball graph of a one-dimensional cloud, stored implicitly.
///
/// In sorted order every neighborhood is a contiguous run, so the graph costs
/// `O(n)` memory however dense it is. Neighbors are reported in coordinate
/// order rather than by ascending id.
#[derive(Clone, Debug)]
pub struct IntervalGraph {
    radius: f64,
    /// Vertex ids sorted by coordinate (ties by id).
    order: Vec<u32>,
    /// Position of each vertex in `order`.
    rank: Vec<u32>,
    /// Neighborhood of the vertex at position `p` is `order[lo[p]..=hi[p]]` minus itself.
    lo: Vec<u32>,
    hi: Vec<u32>,
}

impl IntervalGraph {
    pub fn build(cloud: &PointCloud, radius: f64) -> Result<Self> {
        if cloud.dim() != 1 {
            return Err(DepthError::input(
                "interval graphs need a one-dimensional cloud",
            ));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DepthError::input(format!(
                "radius must be finite and > 0, got {radius}"
            )));
        }
        let n = cloud.len();
        if n > u32::MAX as usize {
            return Err(DepthError::input(
                "point clouds are limited to u32::MAX points",
            ));
        }
        let xs = cloud.coords();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by(|&a, &b| xs[a as usize].total_cmp(&xs[b as usize]).then(a.cmp(&b)));
        let mut rank = vec![0u32; n];
        for (p, &v) in order.iter().enumerate() {
            rank[v as usize] = p as u32;
        }
        let sorted: Vec<f64> = order.iter().map(|&v| xs[v as usize]).collect();
        let r_sq = radius * radius;
        let mut lo = vec![0u32; n];
        let mut hi = vec![0u32; n];
        let (mut a, mut b) = (0usize, 0usize);
        for p in 0..n {
            while !within(&sorted[a..a + 1], &sorted[p..p + 1], radius, r_sq) {
                a += 1;
            }
            b = b.max(p);
            while b + 1 < n && within(&sorted[b + 1..b + 2], &sorted[p..p + 1], radius, r_sq) {
                b += 1;
            }
            lo[p] = a as u32;
            hi[p] = b as u32;
        }
        Ok(IntervalGraph {
            radius,
            order,
            rank,
            lo,
            hi,
        })
    }
}

impl Adjacency for IntervalGraph {
    fn vertex_count(&self) -> usize {
        self.order.len()
    }

    #[inline]
    fn degree(&self, v: usize) -> usize {
        let p = self.rank[v] as usize;
        (self.hi[p] - self.lo[p]) as usize
    }

    #[inline]
    fn neighbors(&self, v: usize) -> Neighbors<'_> {
        let p = self.rank[v] as usize;
        let (lo, hi) = (self.lo[p] as usize, self.hi[p] as usize);
        Neighbors::new(&self.order[lo..p], &self.order[p + 1..=hi])
    }

    fn radius(&self) -> Option<f64> {
        Some(self.radius)
    }
}
