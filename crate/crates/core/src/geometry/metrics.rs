use std::collections::VecDeque;

use super::Adjacency;

const UNREACHED: u32 = u32::MAX;

/// Hop distances from `source`; unreachable vertices get `u32::MAX`.
pub fn bfs_distances<G: Adjacency + ?Sized>(graph: &G, source: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHED; graph.vertex_count()];
    let mut queue = VecDeque::new();
    bfs_into(graph, source, &mut dist, &mut queue);
    dist
}

fn bfs_into<G: Adjacency + ?Sized>(
    graph: &G,
    source: usize,
    dist: &mut [u32],
    queue: &mut VecDeque<usize>,
) -> u32 {
    queue.clear();
    dist[source] = 0;
    queue.push_back(source);
    let mut ecc = 0;
    while let Some(v) = queue.pop_front() {
        let dv = dist[v];
        ecc = dv;
        for w in graph.neighbors(v) {
            if dist[w] == UNREACHED {
                dist[w] = dv + 1;
                queue.push_back(w);
            }
        }
    }
    ecc
}

/// Component label per vertex: the smallest vertex id of its component.
pub fn connected_components<G: Adjacency + ?Sized>(graph: &G) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut label = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = s;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for w in graph.neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = s;
                    queue.push_back(w);
                }
            }
        }
    }
    label
}

/// Largest hop diameter over the connected components; 0 for edgeless graphs.
///
/// Exact. Each component is handled with eccentricity bounds: every BFS from
/// `v` with eccentricity `e` yields `max(d, e - d) <= ecc(w) <= e + d` for all
/// `w` at distance `d`, and sources alternate between the largest upper bound
/// and the smallest lower bound until the best lower bound on the diameter
/// meets the largest upper bound.
pub fn graph_diameter<G: Adjacency + ?Sized>(graph: &G) -> usize {
    let n = graph.vertex_count();
    let labels = connected_components(graph);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, &l) in labels.iter().enumerate() {
        members[l].push(v);
    }
    let mut dist = vec![UNREACHED; n];
    let mut queue = VecDeque::new();
    let mut best = 0usize;
    // Largest components first: their diameter tends to dominate and lets
    // smaller ones exit early once their size rules them out.
    let mut comps: Vec<&Vec<usize>> = members.iter().filter(|m| m.len() > 1).collect();
    comps.sort_by_key(|m| std::cmp::Reverse(m.len()));
    for comp in comps {
        if comp.len() - 1 <= best {
            continue;
        }
        best = best.max(component_diameter(graph, comp, &mut dist, &mut queue));
    }
    best
}

/// BFS runs before switching to 64-source batches.
const SINGLE_SOURCE_RUNS: usize = 4;

/// Batches only pay off when every BFS is shallow.
const BATCH_MAX_DEPTH: u32 = 24;

fn component_diameter<G: Adjacency + ?Sized>(
    graph: &G,
    comp: &[usize],
    dist: &mut [u32],
    queue: &mut VecDeque<usize>,
) -> usize {
    let m = comp.len();
    let mut lower = vec![0u32; m];
    let mut upper = vec![u32::MAX; m];
    let mut active: Vec<usize> = (0..m).collect();
    let mut diam_lo = 0u32;
    let mut diam_hi = u32::MAX;
    let mut pick_upper = true;
    let mut runs = 0usize;
    // Position of each vertex within `comp`, for batched runs.
    let mut slot: Vec<u32> = Vec::new();
    while diam_lo < diam_hi && !active.is_empty() {
        let sources: Vec<usize> =
            if runs < SINGLE_SOURCE_RUNS || diam_hi > BATCH_MAX_DEPTH || active.len() < 2 {
                // Ties go to the higher degree, then the lower id.
                let pos = if pick_upper {
                    select(&active, |i| (upper[i], graph.degree(comp[i])))
                } else {
                    select(&active, |i| (u32::MAX - lower[i], graph.degree(comp[i])))
                };
                pick_upper = !pick_upper;
                vec![active[pos]]
            } else {
                batch_sources(&active, &lower, &upper)
            };
        runs += sources.len();
        if sources.len() == 1 {
            for &v in comp {
                dist[v] = UNREACHED;
            }
            let ecc = bfs_into(graph, comp[sources[0]], dist, queue);
            for i in 0..m {
                let d = dist[comp[i]];
                lower[i] = lower[i].max(d.max(ecc - d));
                upper[i] = upper[i].min(ecc + d);
            }
        } else {
            if slot.is_empty() {
                slot = vec![u32::MAX; graph.vertex_count()];
                for (i, &v) in comp.iter().enumerate() {
                    slot[v] = i as u32;
                }
            }
            let levels = batched_bfs(graph, comp, &slot, &sources);
            for (b, _) in sources.iter().enumerate() {
                let ecc = levels.iter().map(|l| l[b]).max().unwrap_or(0);
                for i in 0..m {
                    let d = levels[i][b];
                    lower[i] = lower[i].max(d.max(ecc - d));
                    upper[i] = upper[i].min(ecc + d);
                }
            }
        }
        diam_lo = diam_lo.max(lower.iter().copied().max().unwrap_or(0));
        diam_hi = upper.iter().copied().max().unwrap_or(0);
        let (lo, hi) = (diam_lo, diam_hi);
        active.retain(|&i| lower[i] != upper[i] && !(upper[i] <= lo && 2 * lower[i] >= hi));
    }
    diam_lo as usize
}

/// Up to 64 active positions: half by largest upper bound, half by smallest lower bound.
fn batch_sources(active: &[usize], lower: &[u32], upper: &[u32]) -> Vec<usize> {
    let mut by_upper = active.to_vec();
    by_upper.sort_by_key(|&i| (std::cmp::Reverse(upper[i]), i));
    let mut by_lower = active.to_vec();
    by_lower.sort_by_key(|&i| (lower[i], i));
    let mut out = Vec::with_capacity(64);
    for (a, b) in by_upper.iter().zip(&by_lower) {
        for &i in [a, b] {
            if out.len() < 64 && !out.contains(&i) {
                out.push(i);
            }
        }
        if out.len() == 64 {
            break;
        }
    }
    out
}

/// Distances from up to 64 sources at once, one bit per source; returns
/// `levels[i][b]`, the distance from source `b` to `comp[i]`.
fn batched_bfs<G: Adjacency + ?Sized>(
    graph: &G,
    comp: &[usize],
    slot: &[u32],
    sources: &[usize],
) -> Vec<Vec<u32>> {
    let m = comp.len();
    let full = if sources.len() == 64 {
        u64::MAX
    } else {
        (1u64 << sources.len()) - 1
    };
    let mut seen = vec![0u64; m];
    let mut frontier = vec![0u64; m];
    let mut levels = vec![vec![0u32; sources.len()]; m];
    for (b, &i) in sources.iter().enumerate() {
        seen[i] |= 1 << b;
        frontier[i] |= 1 << b;
    }
    let mut depth = 0u32;
    let mut next = vec![0u64; m];
    loop {
        depth += 1;
        let mut any = false;
        for i in 0..m {
            if seen[i] == full {
                next[i] = 0;
                continue;
            }
            let mut reach = 0u64;
            for w in graph.neighbors(comp[i]) {
                reach |= frontier[slot[w] as usize];
            }
            let fresh = reach & !seen[i];
            next[i] = fresh;
            if fresh != 0 {
                any = true;
                let mut bits = fresh;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    levels[i][b] = depth;
                }
            }
        }
        if !any {
            break;
        }
        for i in 0..m {
            seen[i] |= next[i];
        }
        std::mem::swap(&mut frontier, &mut next);
    }
    levels
}

fn select(active: &[usize], key: impl Fn(usize) -> (u32, usize)) -> usize {
    let mut best = 0;
    for p in 1..active.len() {
        if key(active[p]) > key(active[best]) {
            best = p;
        }
    }
    best
}
