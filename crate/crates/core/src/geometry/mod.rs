//! Point clouds, radius queries and r-neighborhood graphs.

mod ball;
mod cloud;
mod graph;
mod index;
mod metrics;

pub use ball::{ball_intersection_volume_mc, normalization, unit_ball_volume, McEstimate};
pub use cloud::{PointCloud, Provenance};
pub use graph::{
    Adjacency, CsrGraph, GraphFingerprint, IntervalGraph, NeighborhoodGraph, Neighbors,
    DEFAULT_EDGE_CAP,
};
pub use index::GridIndex;
pub use metrics::{bfs_distances, connected_components, graph_diameter};

/// Closed-ball membership `|a - b| <= r`, shared by every radius test in the crate.
///
/// `r_sq` must be `r * r`; the squared comparison settles everything except
/// distances within a few ulps of `r`, which fall back to the exact root.
#[inline]
pub(crate) fn within(a: &[f64], b: &[f64], r: f64, r_sq: f64) -> bool {
    let d2 = sq_dist(a, b);
    if d2 < r_sq * (1.0 - 1e-14) {
        true
    } else if d2 > r_sq * (1.0 + 1e-14) {
        false
    } else {
        d2.sqrt() <= r
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
