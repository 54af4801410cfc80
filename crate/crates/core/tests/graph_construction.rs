use std::sync::Arc;

use depthcore::geometry::{
    connected_components, Adjacency, GridIndex, IntervalGraph, NeighborhoodGraph, PointCloud,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn brute_rows(cloud: &PointCloud, r: f64) -> Vec<Vec<usize>> {
    (0..cloud.len())
        .map(|i| {
            (0..cloud.len())
                .filter(|&j| j != i && dist(cloud.point(i), cloud.point(j)) <= r)
                .collect()
        })
        .collect()
}

fn rows<G: Adjacency>(g: &G) -> Vec<Vec<usize>> {
    (0..g.vertex_count())
        .map(|v| {
            let mut row: Vec<usize> = g.neighbors(v).collect();
            row.sort_unstable();
            row
        })
        .collect()
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointCloud {
    PointCloud::new(d, (0..n * d).map(|_| rng.random::<f64>()).collect()).unwrap()
}

#[test]
fn matches_pairwise_comparator_in_each_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in 1..=3 {
        for trial in 0..100 {
            let n = rng.random_range(1..=500);
            let cloud = Arc::new(random_cloud(&mut rng, n, d));
            let r = 0.005 * d as f64 * 10f64.powf(rng.random::<f64>() * 2.0);
            let g = NeighborhoodGraph::build(cloud.clone(), r).unwrap();
            let expect = brute_rows(&cloud, r);
            assert_eq!(rows(&g), expect, "d={d} trial={trial}");
            for v in 0..n {
                assert!(
                    g.row(v).windows(2).all(|w| w[0] < w[1]),
                    "rows must be sorted"
                );
            }
            if d == 1 {
                assert_eq!(
                    rows(&IntervalGraph::build(&cloud, r).unwrap()),
                    expect,
                    "interval d=1 trial={trial}"
                );
            }
        }
    }
}

#[test]
fn dense_square_matches_comparator() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cloud = Arc::new(random_cloud(&mut rng, 2000, 2));
    let g = NeighborhoodGraph::build(cloud.clone(), 0.05).unwrap();
    assert_eq!(rows(&g), brute_rows(&cloud, 0.05));
}

#[test]
fn closed_ball_and_forced_cases() {
    let cloud = Arc::new(PointCloud::new(1, vec![0.0, 0.05, 0.2]).unwrap());
    let g = NeighborhoodGraph::build(cloud, 0.1).unwrap();
    assert_eq!(rows(&g), vec![vec![1], vec![0], vec![]]);
    // Exactly representable distance 0.25 at r = 0.25.
    let cloud = Arc::new(PointCloud::new(1, vec![0.0, 0.25, 0.5]).unwrap());
    let g = NeighborhoodGraph::build(cloud.clone(), 0.25).unwrap();
    assert_eq!(rows(&g), vec![vec![1], vec![0, 2], vec![1]]);
    let ig = IntervalGraph::build(&cloud, 0.25).unwrap();
    assert_eq!(rows(&ig), rows(&g));
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cloud = Arc::new(random_cloud(&mut rng, 40, 2));
    let g = NeighborhoodGraph::build(cloud, 2.0).unwrap();
    assert!((0..40).all(|v| g.degree(v) == 39));
}

#[test]
fn query_neighbors_match_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for d in 1..=3 {
        let cloud = random_cloud(&mut rng, 500, d);
        let r = 0.12;
        let index = GridIndex::new(&cloud, r).unwrap();
        for _ in 0..200 {
            let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 1.4 - 0.2).collect();
            let expect: Vec<u32> = (0..cloud.len())
                .filter(|&i| dist(&x, cloud.point(i)) <= r)
                .map(|i| i as u32)
                .collect();
            assert_eq!(index.neighbors_of_point(&cloud, &x).unwrap(), expect);
            assert_eq!(index.count_within(&cloud, &x).unwrap(), expect.len());
        }
        assert!(index
            .neighbors_of_point(&cloud, cloud.point(7))
            .unwrap()
            .contains(&7));
        assert!(index
            .neighbors_of_point(&cloud, &vec![50.0; d])
            .unwrap()
            .is_empty());
        assert!(index.neighbors_of_point(&cloud, &vec![0.0; d + 1]).is_err());
    }
}

/// Random rotation from the QR of a Gaussian matrix, by Gram-Schmidt.
fn random_rotation(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<f64>> {
    use rand_distr::StandardNormal;
    let mut q: Vec<Vec<f64>> = Vec::new();
    while q.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for u in &q {
            let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            q.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    q
}

#[test]
fn rigid_motions_preserve_the_edge_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut checked = 0;
    for trial in 0..60 {
        let d = 1 + trial % 3;
        let cloud = Arc::new(random_cloud(&mut rng, 300, d));
        let r = 0.1 + 0.1 * rng.random::<f64>();
        let near_tie = (0..cloud.len())
            .any(|i| (0..i).any(|j| (dist(cloud.point(i), cloud.point(j)) - r).abs() < 1e-9));
        if near_tie {
            continue;
        }
        let rot = random_rotation(&mut rng, d);
        let shift: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect();
        let moved = Arc::new(
            cloud
                .map_points(|p| {
                    (0..d)
                        .map(|a| rot[a].iter().zip(p).map(|(m, x)| m * x).sum::<f64>() + shift[a])
                        .collect()
                })
                .unwrap(),
        );
        let g = NeighborhoodGraph::build(cloud, r).unwrap();
        let h = NeighborhoodGraph::build(moved, r).unwrap();
        assert_eq!(rows(&g), rows(&h), "trial {trial}");
        checked += 1;
    }
    assert!(checked >= 50);
}

#[test]
fn component_labels() {
    let cloud = Arc::new(
        PointCloud::new(2, vec![0.0, 0.0, 0.05, 0.0, 3.0, 3.0, 3.0, 3.05, 9.0, 9.0]).unwrap(),
    );
    let g = NeighborhoodGraph::build(cloud, 0.1).unwrap();
    assert_eq!(connected_components(&g), vec![0, 0, 2, 2, 4]);
}

#[test]
fn edge_cap_is_a_sizing_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let cloud = Arc::new(random_cloud(&mut rng, 200, 2));
    let err = NeighborhoodGraph::build_with_cap(cloud, 5.0, 1000).unwrap_err();
    assert!(matches!(err, depthcore::DepthError::Sizing { .. }));
}
