//! Degree, graph H-index iterates and coreness.
//!
//! Scores stay integral until they are divided by `N = n * omega * r^d` at the
//! API edge ([`point_depth`], [`VertexScores::normalized`]).

use rayon::prelude::*;

use crate::error::{DepthError, Result};
use crate::geometry::{
    graph_diameter, normalization, Adjacency, GraphFingerprint, GridIndex, PointCloud,
};

/// Largest graph accepted by [`coreness_bruteforce`].
pub const BRUTEFORCE_MAX_VERTICES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Degree,
    /// `k` applications of the H transform to the degrees.
    HIterate(u32),
    Coreness,
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Measure::Degree => f.write_str("degree"),
            Measure::HIterate(k) => write!(f, "h{k}"),
            Measure::Coreness => f.write_str("coreness"),
        }
    }
}

/// One nonnegative integer score per vertex, tied to the graph it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexScores {
    values: Vec<u32>,
    measure: Measure,
    fingerprint: GraphFingerprint,
    radius: Option<f64>,
}

impl VertexScores {
    fn for_graph<G: Adjacency + ?Sized>(graph: &G, values: Vec<u32>, measure: Measure) -> Self {
        VertexScores {
            values,
            measure,
            fingerprint: graph.fingerprint(),
            radius: graph.radius(),
        }
    }

    /// Arbitrary scores for `graph`, e.g. as input to [`h_transform_graph`].
    pub fn custom<G: Adjacency + ?Sized>(
        graph: &G,
        values: Vec<u32>,
        measure: Measure,
    ) -> Result<Self> {
        if values.len() != graph.vertex_count() {
            return Err(DepthError::input(format!(
                "{} scores for {} vertices",
                values.len(),
                graph.vertex_count()
            )));
        }
        Ok(Self::for_graph(graph, values, measure))
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn fingerprint(&self) -> GraphFingerprint {
        self.fingerprint
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> u32 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// Scores divided by `normalizer`.
    pub fn normalized(&self, normalizer: f64) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64 / normalizer).collect()
    }

    fn check<G: Adjacency + ?Sized>(&self, graph: &G) -> Result<()> {
        let fp = graph.fingerprint();
        if fp != self.fingerprint {
            return Err(DepthError::Fingerprint(format!(
                "scores from a graph with {} vertices / {} entries, given {} / {}",
                self.fingerprint.vertices, self.fingerprint.entries, fp.vertices, fp.entries
            )));
        }
        Ok(())
    }
}

pub fn degree_scores<G: Adjacency + ?Sized>(graph: &G) -> VertexScores {
    let values = (0..graph.vertex_count())
        .map(|v| graph.degree(v) as u32)
        .collect();
    VertexScores::for_graph(graph, values, Measure::Degree)
}

/// Largest `h` such that at least `h` of the given scores are `>= h`.
///
/// Scores are clamped at `cap`, which must bound the answer (the count of
/// scores always does).
#[inline]
fn h_index_capped(scores: impl Iterator<Item = u32>, cap: u32, counts: &mut Vec<u32>) -> u32 {
    let cap = cap as usize;
    counts.clear();
    counts.resize(cap + 1, 0);
    for s in scores {
        counts[(s as usize).min(cap)] += 1;
    }
    let mut at_least = 0u32;
    for h in (1..=cap).rev() {
        at_least += counts[h];
        if at_least as usize >= h {
            return h as u32;
        }
    }
    0
}

/// [`h_index_capped`] together with the number of scores `>= h`.
#[inline]
fn h_index_with_support(
    scores: impl Iterator<Item = u32>,
    cap: u32,
    counts: &mut Vec<u32>,
) -> (u32, u32) {
    let cap = cap as usize;
    counts.clear();
    counts.resize(cap + 1, 0);
    let mut total = 0u32;
    for s in scores {
        counts[(s as usize).min(cap)] += 1;
        total += 1;
    }
    let mut at_least = 0u32;
    for h in (1..=cap).rev() {
        at_least += counts[h];
        if at_least as usize >= h {
            return (h as u32, at_least);
        }
    }
    (0, total)
}

/// One application of the H transform: every vertex gets the largest `h`
/// such that at least `h` neighbors score `>= h`. Isolated vertices get 0.
pub fn h_transform_graph<G: Adjacency + ?Sized>(
    graph: &G,
    scores: &VertexScores,
) -> Result<VertexScores> {
    scores.check(graph)?;
    let s = scores.values();
    let values: Vec<u32> = (0..graph.vertex_count())
        .into_par_iter()
        .map_init(Vec::new, |buf, v| {
            let deg = graph.degree(v) as u32;
            h_index_capped(graph.neighbors(v).map(|w| s[w]), deg, buf)
        })
        .collect();
    let measure = match scores.measure() {
        Measure::Degree => Measure::HIterate(1),
        Measure::HIterate(k) => Measure::HIterate(k + 1),
        Measure::Coreness => Measure::Coreness,
    };
    Ok(VertexScores::for_graph(graph, values, measure))
}

/// Jacobi iteration of the H transform from the degrees, touching only
/// vertices that will change.
///
/// Every vertex keeps `support[v]`, the number of neighbors scoring at least
/// `s_v`. Iterates are non-increasing, so `v` changes exactly when its
/// support falls below `s_v`, and a neighbor dropping from `old` to `new`
/// lowers it only when `new < s_v <= old`. The result is the same vector the
/// plain transform produces.
struct HIteration<'g, G: Adjacency + ?Sized> {
    graph: &'g G,
    current: Vec<u32>,
    support: Vec<u32>,
    /// Vertices whose support is below their score.
    pending: Vec<u32>,
    sweeps: usize,
    mark: Vec<bool>,
}

impl<'g, G: Adjacency + ?Sized> HIteration<'g, G> {
    fn new(graph: &'g G) -> Self {
        let n = graph.vertex_count();
        HIteration {
            graph,
            current: (0..n).map(|v| graph.degree(v) as u32).collect(),
            support: vec![0; n],
            pending: Vec::new(),
            sweeps: 0,
            mark: vec![false; n],
        }
    }

    /// Applies one transform; returns whether anything changed.
    fn sweep(&mut self) -> bool {
        let graph = self.graph;
        let cur = &self.current;
        let candidates: Vec<u32> = if self.sweeps == 0 {
            (0..graph.vertex_count() as u32).collect()
        } else {
            std::mem::take(&mut self.pending)
        };
        // (vertex, new score, support at the new score from the old scores)
        let results: Vec<(u32, u32, u32)> = candidates
            .par_iter()
            .map_init(Vec::new, |buf, &v| {
                let sv = cur[v as usize];
                let (h, support) =
                    h_index_with_support(graph.neighbors(v as usize).map(|w| cur[w]), sv, buf);
                (v, h, support)
            })
            .collect();
        let mut changed = Vec::new();
        for &(v, h, support) in &results {
            let old = self.current[v as usize];
            self.support[v as usize] = support;
            if h != old {
                changed.push((v, old));
                self.current[v as usize] = h;
            }
        }
        let mut pending = Vec::new();
        for &(u, old) in &changed {
            let new = self.current[u as usize];
            for v in graph.neighbors(u as usize) {
                let sv = self.current[v];
                if new < sv && sv <= old {
                    self.support[v] -= 1;
                    if self.support[v] < sv && !self.mark[v] {
                        self.mark[v] = true;
                        pending.push(v as u32);
                    }
                }
            }
        }
        for &(u, _) in &changed {
            let u = u as usize;
            if self.support[u] < self.current[u] && !self.mark[u] {
                self.mark[u] = true;
                pending.push(u as u32);
            }
        }
        for &v in &pending {
            self.mark[v as usize] = false;
        }
        pending.sort_unstable();
        self.pending = pending;
        self.sweeps += 1;
        !changed.is_empty()
    }
}

/// `H^k` applied to the degrees; `k = 0` returns the degrees.
pub fn iterated_h<G: Adjacency + ?Sized>(graph: &G, k: u32) -> VertexScores {
    let mut it = HIteration::new(graph);
    for _ in 0..k {
        if !it.sweep() {
            break;
        }
    }
    let measure = if k == 0 {
        Measure::Degree
    } else {
        Measure::HIterate(k)
    };
    VertexScores::for_graph(graph, it.current, measure)
}

/// Iterates of the H transform at the requested counts, from one pass.
///
/// `ks` may be in any order; the output follows it.
pub fn iterated_h_many<G: Adjacency + ?Sized>(graph: &G, ks: &[u32]) -> Vec<VertexScores> {
    let mut order: Vec<usize> = (0..ks.len()).collect();
    order.sort_by_key(|&i| ks[i]);
    let mut out: Vec<Option<VertexScores>> = vec![None; ks.len()];
    let mut it = HIteration::new(graph);
    let mut done = 0u32;
    let mut stationary = false;
    for i in order {
        while done < ks[i] && !stationary {
            stationary = !it.sweep();
            done += 1;
        }
        let measure = if ks[i] == 0 {
            Measure::Degree
        } else {
            Measure::HIterate(ks[i])
        };
        out[i] = Some(VertexScores::for_graph(graph, it.current.clone(), measure));
    }
    out.into_iter().map(Option::unwrap).collect()
}

/// Coreness as the fixed point of the H iteration, with `k_inf`: the fewest
/// applications after which the iterate equals the fixed point.
pub fn coreness_by_iteration<G: Adjacency + ?Sized>(graph: &G) -> (VertexScores, usize) {
    let mut it = HIteration::new(graph);
    let mut k_inf = 0;
    while it.sweep() {
        k_inf += 1;
    }
    (
        VertexScores::for_graph(graph, it.current, Measure::Coreness),
        k_inf,
    )
}

/// Coreness by bucket peeling (Batagelj–Zaversnik), `O(n + |E|)`.
pub fn coreness_bucket<G: Adjacency + ?Sized>(graph: &G) -> VertexScores {
    let n = graph.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    // bin[d] = first position of degree-d vertices in `vert`.
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    if max_deg > 0 || n > 0 {
        bin[0] = 0;
    }
    for i in 0..n {
        let v = vert[i];
        for u in graph.neighbors(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    let values = deg.into_iter().map(|d| d as u32).collect();
    VertexScores::for_graph(graph, values, Measure::Coreness)
}

/// Coreness from its subgraph definition: for each vertex, the largest
/// minimum degree over induced subgraphs containing it. Exhaustive; test oracle.
pub fn coreness_bruteforce<G: Adjacency + ?Sized>(graph: &G) -> Result<VertexScores> {
    let n = graph.vertex_count();
    if n > BRUTEFORCE_MAX_VERTICES {
        return Err(DepthError::input(format!(
            "brute-force coreness is limited to {BRUTEFORCE_MAX_VERTICES} vertices, got {n}"
        )));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| graph.neighbors(v).fold(0u32, |m, w| m | (1 << w)))
        .collect();
    let mut best = vec![0u32; n];
    for mask in 1u32..(1u32 << n) {
        let mut min_deg = u32::MAX;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            min_deg = min_deg.min((adj[v] & mask).count_ones());
        }
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            best[v] = best[v].max(min_deg);
        }
    }
    Ok(VertexScores::for_graph(graph, best, Measure::Coreness))
}

/// What to evaluate at an out-of-sample query point.
#[derive(Clone, Copy, Debug)]
pub enum DepthQuery<'a> {
    Degree,
    /// `H^k` at the query from the sample's `H^(k-1)` scores.
    HIterate {
        k: u32,
        previous: &'a VertexScores,
    },
    /// The coreness rule applied to the sample's coreness.
    Coreness(&'a VertexScores),
}

impl DepthQuery<'_> {
    fn validate(&self, index: &GridIndex) -> Result<()> {
        let scores = match self {
            DepthQuery::Degree => return Ok(()),
            DepthQuery::HIterate { k, previous } => {
                let expect = if *k <= 1 {
                    Measure::Degree
                } else {
                    Measure::HIterate(k - 1)
                };
                if *k == 0 || previous.measure() != expect {
                    return Err(DepthError::input(format!(
                        "H^{k} at a query point needs {expect} scores, got {}",
                        previous.measure()
                    )));
                }
                previous
            }
            DepthQuery::Coreness(scores) => {
                if scores.measure() != Measure::Coreness {
                    return Err(DepthError::input("coreness query needs coreness scores"));
                }
                scores
            }
        };
        if scores.radius() != Some(index.radius()) {
            return Err(DepthError::input(format!(
                "scores computed at radius {:?}, index has radius {}",
                scores.radius(),
                index.radius()
            )));
        }
        if scores.len() != index.len() {
            return Err(DepthError::input(
                "scores and index cover different samples",
            ));
        }
        Ok(())
    }
}

/// Normalized centrality of a query point `x` inserted into the sample graph.
///
/// The query's neighbors are the sample points within `r`; its own score is
/// not fed back into theirs, which moves coreness by at most one unit before
/// normalization.
pub fn point_depth(
    cloud: &PointCloud,
    index: &GridIndex,
    x: &[f64],
    query: DepthQuery<'_>,
) -> Result<f64> {
    query.validate(index)?;
    let n_norm = normalization(cloud.len().max(1), index.radius(), cloud.dim())?;
    let mut buf = Vec::new();
    Ok(raw_point_score(cloud, index, x, query, &mut buf)? as f64 / n_norm)
}

/// [`point_depth`] at many query points (row-major `queries`), in parallel.
pub fn point_depths(
    cloud: &PointCloud,
    index: &GridIndex,
    queries: &[f64],
    query: DepthQuery<'_>,
) -> Result<Vec<f64>> {
    query.validate(index)?;
    let d = cloud.dim();
    if queries.len() % d != 0 {
        return Err(DepthError::input(
            "query coordinates do not form whole points",
        ));
    }
    let n_norm = normalization(cloud.len().max(1), index.radius(), d)?;
    queries
        .par_chunks(d)
        .map_init(Vec::new, |buf, x| {
            Ok(raw_point_score(cloud, index, x, query, buf)? as f64 / n_norm)
        })
        .collect()
}

fn raw_point_score(
    cloud: &PointCloud,
    index: &GridIndex,
    x: &[f64],
    query: DepthQuery<'_>,
    buf: &mut Vec<u32>,
) -> Result<u32> {
    let ids = index.neighbors_of_point(cloud, x)?;
    let scores = match query {
        DepthQuery::Degree => return Ok(ids.len() as u32),
        DepthQuery::HIterate { previous, .. } => previous.values(),
        DepthQuery::Coreness(s) => s.values(),
    };
    Ok(h_index_capped(
        ids.iter().map(|&i| scores[i as usize]),
        ids.len() as u32,
        buf,
    ))
}

/// Iteration count and the bounds it is compared against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmaxBounds {
    pub k_inf: usize,
    /// `1 + sum_v |deg(v) - C(v)|`.
    pub montresor_sum: u64,
    pub n_vertices: usize,
    /// Largest hop diameter over connected components.
    pub diameter: usize,
    pub max_degree: usize,
    /// `diameter * max_degree`.
    pub conjecture: u64,
}

impl KmaxBounds {
    /// `k_inf <= montresor_sum` and `k_inf <= |V|`.
    pub fn proven_bounds_hold(&self) -> bool {
        self.k_inf as u64 <= self.montresor_sum && self.k_inf <= self.n_vertices
    }

    pub fn conjecture_holds(&self) -> bool {
        self.k_inf as u64 <= self.conjecture
    }

    /// `conjecture / k_inf`; `None` when `k_inf = 0`.
    pub fn ratio(&self) -> Option<f64> {
        (self.k_inf > 0).then(|| self.conjecture as f64 / self.k_inf as f64)
    }
}

/// Computes `k_inf` with the proven and conjectured bounds.
///
/// The conjectured bound maximizes the diameter over connected components
/// rather than over all connected subgraphs.
pub fn kmax_bounds<G: Adjacency + ?Sized>(graph: &G) -> KmaxBounds {
    let (core, k_inf) = coreness_by_iteration(graph);
    kmax_bounds_from(graph, &core, k_inf)
}

/// [`kmax_bounds`] when the coreness and `k_inf` are already known.
pub fn kmax_bounds_from<G: Adjacency + ?Sized>(
    graph: &G,
    core: &VertexScores,
    k_inf: usize,
) -> KmaxBounds {
    let n = graph.vertex_count();
    let montresor_sum = 1
        + (0..n)
            .map(|v| (graph.degree(v) as u64).abs_diff(core.values()[v] as u64))
            .sum::<u64>();
    let diameter = graph_diameter(graph);
    let max_degree = graph.max_degree();
    KmaxBounds {
        k_inf,
        montresor_sum,
        n_vertices: n,
        diameter,
        max_degree,
        conjecture: diameter as u64 * max_degree as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CsrGraph, NeighborhoodGraph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn star(leaves: usize) -> CsrGraph {
        let edges: Vec<(usize, usize)> = (1..=leaves).map(|i| (0, i)).collect();
        CsrGraph::from_edges(leaves + 1, &edges).unwrap()
    }

    fn triangle_with_pendant() -> CsrGraph {
        CsrGraph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap()
    }

    fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> CsrGraph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((a, b));
                }
            }
        }
        CsrGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn degree_examples() {
        let cloud = Arc::new(PointCloud::new(1, vec![0.0, 0.05, 0.2]).unwrap());
        let g = NeighborhoodGraph::build(cloud, 0.1).unwrap();
        assert_eq!(degree_scores(&g).values(), &[1, 1, 0]);
        assert_eq!(degree_scores(&CsrGraph::complete(5)).values(), &[4; 5]);
    }

    #[test]
    fn h_transform_examples() {
        let g = star(6);
        let h = h_transform_graph(&g, &degree_scores(&g)).unwrap();
        assert_eq!(h.values(), &[1; 7]);
        assert_eq!(h.measure(), Measure::HIterate(1));
        let k4 = CsrGraph::complete(4);
        assert_eq!(
            h_transform_graph(&k4, &degree_scores(&k4))
                .unwrap()
                .values(),
            &[3; 4]
        );
        let isolated = CsrGraph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(
            h_transform_graph(&isolated, &degree_scores(&isolated))
                .unwrap()
                .values(),
            &[1, 1, 0]
        );
    }

    #[test]
    fn h_transform_matches_exhaustive_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..20 {
            let g = random_graph(50, 0.2, &mut rng);
            let raw: Vec<u32> = (0..50).map(|_| rng.random_range(0..30)).collect();
            let scores = VertexScores::custom(&g, raw.clone(), Measure::HIterate(3)).unwrap();
            let out = h_transform_graph(&g, &scores).unwrap();
            for v in 0..50 {
                let max_score = raw.iter().copied().max().unwrap();
                let expect = (0..=max_score)
                    .filter(|&h| g.neighbors(v).filter(|&w| raw[w] >= h).count() >= h as usize)
                    .max()
                    .unwrap();
                assert_eq!(out.values()[v], expect);
            }
        }
    }

    #[test]
    fn fingerprint_mismatch_is_rejected() {
        let a = CsrGraph::path(4);
        let b = CsrGraph::complete(4);
        let err = h_transform_graph(&b, &degree_scores(&a)).unwrap_err();
        assert!(matches!(err, DepthError::Fingerprint(_)));
    }

    #[test]
    fn iterated_h_is_monotone_and_reaches_coreness() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let g = random_graph(80, 0.08, &mut rng);
            assert_eq!(iterated_h(&g, 0), degree_scores(&g));
            let (core, k_inf) = coreness_by_iteration(&g);
            let mut prev = degree_scores(&g);
            for k in 1..=(k_inf as u32 + 2) {
                let plain = h_transform_graph(&g, &prev).unwrap();
                let cur = iterated_h(&g, k);
                assert_eq!(
                    cur.values(),
                    plain.values(),
                    "incremental sweep diverged at k = {k}"
                );
                assert!(cur.values().iter().zip(prev.values()).all(|(a, b)| a <= b));
                prev = cur;
            }
            assert_eq!(iterated_h(&g, k_inf as u32).values(), core.values());
            if k_inf > 0 {
                assert_ne!(iterated_h(&g, k_inf as u32 - 1).values(), core.values());
            }
            assert_eq!(core.values(), coreness_bucket(&g).values());
        }
    }

    #[test]
    fn iterated_many_matches_single_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = random_graph(120, 0.06, &mut rng);
        let ks = [5, 0, 1, 20, 3];
        let many = iterated_h_many(&g, &ks);
        for (s, &k) in many.iter().zip(&ks) {
            assert_eq!(s, &iterated_h(&g, k));
        }
    }

    #[test]
    fn coreness_examples() {
        let p5 = CsrGraph::path(5);
        let (core, k_inf) = coreness_by_iteration(&p5);
        assert_eq!(core.values(), &[1; 5]);
        assert!(k_inf <= 3);
        let (core, k_inf) = coreness_by_iteration(&CsrGraph::complete(6));
        assert_eq!(core.values(), &[5; 6]);
        assert_eq!(k_inf, 0);
        let tp = triangle_with_pendant();
        assert_eq!(coreness_by_iteration(&tp).0.values(), &[2, 2, 2, 1]);
        assert_eq!(coreness_bucket(&tp).values(), &[2, 2, 2, 1]);
        assert_eq!(coreness_bruteforce(&tp).unwrap().values(), &[2, 2, 2, 1]);
        assert_eq!(
            coreness_bucket(&CsrGraph::from_edges(4, &[]).unwrap()).values(),
            &[0; 4]
        );
        assert_eq!(
            coreness_bucket(&CsrGraph::from_edges(0, &[]).unwrap()).values(),
            &[] as &[u32]
        );
        assert_eq!(
            coreness_bruteforce(&CsrGraph::complete(3))
                .unwrap()
                .values(),
            &[2; 3]
        );
        assert_eq!(
            coreness_bruteforce(&CsrGraph::path(3)).unwrap().values(),
            &[1; 3]
        );
    }

    #[test]
    fn bruteforce_guard() {
        assert!(coreness_bruteforce(&CsrGraph::path(17)).is_err());
    }

    #[test]
    fn small_random_graphs_agree_with_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        for _ in 0..100 {
            let p = rng.random::<f64>();
            let g = random_graph(8, p, &mut rng);
            let brute = coreness_bruteforce(&g).unwrap();
            assert_eq!(coreness_bucket(&g).values(), brute.values());
            assert_eq!(coreness_by_iteration(&g).0.values(), brute.values());
        }
    }

    #[test]
    fn kmax_examples() {
        let k5 = kmax_bounds(&CsrGraph::complete(5));
        assert_eq!((k5.k_inf, k5.montresor_sum, k5.conjecture), (0, 1, 4));
        assert!(k5.proven_bounds_hold() && k5.conjecture_holds());
        assert_eq!(k5.ratio(), None);
        let p10 = kmax_bounds(&CsrGraph::path(10));
        assert_eq!(p10.conjecture, 18);
        assert!(p10.conjecture_holds());
        assert!(p10.proven_bounds_hold());
    }

    #[test]
    fn point_depth_examples() {
        let cloud = Arc::new(PointCloud::new(1, vec![0.0, 0.05, 0.2, 0.22]).unwrap());
        let g = NeighborhoodGraph::build(cloud.clone(), 0.1).unwrap();
        let index = GridIndex::new(&cloud, 0.1).unwrap();
        let deg = degree_scores(&g);
        let (core, _) = coreness_by_iteration(&g);
        let n_norm = normalization(4, 0.1, 1).unwrap();
        // Isolated query.
        for q in [
            DepthQuery::Degree,
            DepthQuery::HIterate {
                k: 1,
                previous: &deg,
            },
            DepthQuery::Coreness(&core),
        ] {
            assert_eq!(point_depth(&cloud, &index, &[3.0], q).unwrap(), 0.0);
        }
        // Query at a sample point counts the point itself.
        let at = point_depth(&cloud, &index, &[0.05], DepthQuery::Degree).unwrap();
        assert!((at - (deg.values()[1] as f64 + 1.0) / n_norm).abs() < 1e-15);
        // Radius mismatch.
        let other = GridIndex::new(&cloud, 0.2).unwrap();
        assert!(point_depth(&cloud, &other, &[0.0], DepthQuery::Coreness(&core)).is_err());
        // Wrong predecessor.
        assert!(point_depth(
            &cloud,
            &index,
            &[0.0],
            DepthQuery::HIterate {
                k: 2,
                previous: &deg
            }
        )
        .is_err());
    }
}
