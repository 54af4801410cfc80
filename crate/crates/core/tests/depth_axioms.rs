use std::sync::Arc;

use depthcore::centrality::{coreness_bucket, degree_scores, iterated_h};
use depthcore::continuum::{
    ball_average, c0_variational_1d, continuum_coreness_extrapolate, continuum_r_coreness,
    iterate_h,
};
use depthcore::{DensityModel, GridSpec, NeighborhoodGraph, ScalarField};

/// Every field family for a model on a grid, at radius `r`.
fn fields(model: &DensityModel, grid: &GridSpec, r: f64) -> Vec<(&'static str, ScalarField)> {
    let f = ScalarField::discretize_density(model, grid).unwrap();
    vec![
        ("f_r", ball_average(&f, r).unwrap()),
        ("h1", iterate_h(&f, r, 1).unwrap()),
        ("h4", iterate_h(&f, r, 4).unwrap()),
        ("C_r", continuum_r_coreness(&f, r).unwrap().field),
        ("f", f),
    ]
}

#[test]
fn fields_co_translate_bit_exactly() {
    // Dyadic means, spacing and shift keep every node coordinate exact.
    let r = 0.5;
    let h = 1.0 / 32.0;
    let model = DensityModel::gaussian(vec![0.25, -0.5], 0.5).unwrap();
    let shift = [0.75, 0.375];
    let moved = model.translated(&shift).unwrap();
    let grid = GridSpec::covering(&model.support_box().expanded(1.0), h).unwrap();
    let moved_grid = grid.translated(&shift).unwrap();
    for ((name, a), (_, b)) in
        fields(&model, &grid, r)
            .into_iter()
            .zip(fields(&moved, &moved_grid, r))
    {
        assert_eq!(a.values(), b.values(), "{name}");
    }
    let ea = continuum_coreness_extrapolate(&model, &grid, &[1.0, r]).unwrap();
    let eb = continuum_coreness_extrapolate(&moved, &moved_grid, &[1.0, r]).unwrap();
    assert_eq!(ea.estimate.values(), eb.estimate.values());

    let model = DensityModel::gaussian(vec![-0.5], 0.5).unwrap();
    let moved = model.translated(&[1.25]).unwrap();
    let grid = GridSpec::covering(&model.support_box().expanded(r), h).unwrap();
    let moved_grid = grid.translated(&[1.25]).unwrap();
    for ((name, a), (_, b)) in
        fields(&model, &grid, r)
            .into_iter()
            .zip(fields(&moved, &moved_grid, r))
    {
        assert_eq!(a.values(), b.values(), "1-D {name}");
    }
    let ca = c0_variational_1d(&ScalarField::discretize_density(&model, &grid).unwrap()).unwrap();
    let cb =
        c0_variational_1d(&ScalarField::discretize_density(&moved, &moved_grid).unwrap()).unwrap();
    assert_eq!(ca.values(), cb.values());
}

fn assert_non_increasing(name: &str, values: &[f64]) {
    for (i, w) in values.windows(2).enumerate() {
        assert!(
            w[1] <= w[0] + 1e-9,
            "{name}: rises at step {i}: {} -> {}",
            w[0],
            w[1]
        );
    }
}

#[test]
fn fields_decrease_along_rays_from_the_mode() {
    let r = 0.4;
    let model = DensityModel::gaussian(vec![0.0, 0.0], 1.0).unwrap();
    let grid = GridSpec::covering(&model.support_box().expanded(0.8), 0.04).unwrap();
    let centre = grid.counts()[0] / 2;
    assert!(grid
        .node(grid.index(&[centre, centre]))
        .iter()
        .all(|c| c.abs() < 1e-12));
    let mut all = fields(&model, &grid, r);
    let c0 = continuum_coreness_extrapolate(&model, &grid, &[0.8, r])
        .unwrap()
        .estimate;
    all.push(("C0", c0));
    let rays: [(isize, isize); 8] = [
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (-1, 1),
        (1, -1),
        (-1, -1),
    ];
    let last = grid.counts()[0] as isize - 1;
    for (name, field) in &all {
        for (di, dj) in rays {
            let mut line = Vec::new();
            let (mut i, mut j) = (centre as isize, centre as isize);
            while (0..=last).contains(&i) && (0..=last).contains(&j) {
                line.push(field.values()[grid.index(&[i as usize, j as usize])]);
                i += di;
                j += dj;
            }
            assert_non_increasing(&format!("{name} along ({di},{dj})"), &line);
        }
    }
}

#[test]
fn one_dimensional_fields_decrease_away_from_the_mode() {
    let r = 0.2;
    let model = DensityModel::gaussian(vec![0.0], 1.0).unwrap();
    let grid = GridSpec::covering(&model.support_box().expanded(r), r / 40.0).unwrap();
    let centre = grid.counts()[0] / 2;
    assert!(grid.node(centre)[0].abs() < 1e-12);
    let mut all = fields(&model, &grid, r);
    let f = ScalarField::discretize_density(&model, &grid).unwrap();
    all.push(("C0", c0_variational_1d(&f).unwrap()));
    for (name, field) in &all {
        let v = field.values();
        assert_non_increasing(&format!("{name} right"), &v[centre..]);
        let left: Vec<f64> = v[..=centre].iter().rev().copied().collect();
        assert_non_increasing(&format!("{name} left"), &left);
    }
}

#[test]
fn discrete_scores_survive_rigid_motion() {
    let model = DensityModel::gaussian(vec![0.0, 0.0], 1.0).unwrap();
    let cloud = model.sample(800, 5);
    let r = 0.3;
    let near_tie = (0..cloud.len()).any(|i| {
        (0..i).any(|j| {
            let d: f64 = cloud
                .point(i)
                .iter()
                .zip(cloud.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            (d - r).abs() < 1e-9
        })
    });
    assert!(!near_tie);
    let (c, s) = (0.6f64, 0.8f64);
    let moved = cloud
        .map_points(|p| vec![c * p[0] - s * p[1] + 3.0, s * p[0] + c * p[1] - 7.0])
        .unwrap();
    let g = NeighborhoodGraph::build(Arc::new(cloud), r).unwrap();
    let h = NeighborhoodGraph::build(Arc::new(moved), r).unwrap();
    assert_eq!(degree_scores(&g).values(), degree_scores(&h).values());
    assert_eq!(iterated_h(&g, 3).values(), iterated_h(&h, 3).values());
    assert_eq!(coreness_bucket(&g).values(), coreness_bucket(&h).values());
}
