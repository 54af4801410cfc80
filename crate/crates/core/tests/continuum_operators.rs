use depthcore::continuum::{
    ball_average, continuum_coreness_extrapolate, continuum_r_coreness, field_h_transform,
    iterate_h_many,
};
use depthcore::density::{PRESET_CRATER, PRESET_MIXTURE6};
use depthcore::{DensityModel, FieldTag, GridSpec, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(grid: &GridSpec, rng: &mut ChaCha8Rng, scale: f64) -> ScalarField {
    let values = (0..grid.len())
        .map(|_| rng.random::<f64>() * scale)
        .collect();
    ScalarField::new(grid.clone(), values, FieldTag::Custom).unwrap()
}

fn grids() -> Vec<(GridSpec, f64)> {
    vec![
        (GridSpec::new(&[0.0], &[4.0], 0.01).unwrap(), 0.15),
        (
            GridSpec::new(&[0.0, 0.0], &[1.5, 1.5], 0.025).unwrap(),
            0.25,
        ),
    ]
}

#[test]
fn h_transform_is_monotone_and_one_lipschitz() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for (grid, r) in grids() {
        for trial in 0..6 {
            let f = random_field(&grid, &mut rng, 2.0);
            let phi = random_field(&grid, &mut rng, 1.0);
            let bump: Vec<f64> = (0..grid.len()).map(|_| rng.random::<f64>() * 0.3).collect();
            let psi_vals: Vec<f64> = phi.values().iter().zip(&bump).map(|(a, b)| a + b).collect();
            let psi = ScalarField::new(grid.clone(), psi_vals, FieldTag::Custom).unwrap();
            let h_phi = field_h_transform(&f, &phi, r).unwrap();
            let h_psi = field_h_transform(&f, &psi, r).unwrap();
            assert!(
                h_phi
                    .values()
                    .iter()
                    .zip(h_psi.values())
                    .all(|(a, b)| a <= b),
                "monotonicity, dim {} trial {trial}",
                grid.dim()
            );
            let input_gap = phi.sup_distance(&psi).unwrap();
            let output_gap = h_phi.sup_distance(&h_psi).unwrap();
            assert!(
                output_gap <= input_gap + 1e-12,
                "{output_gap} > {input_gap}"
            );
            // An unrelated pair, not ordered.
            let chi = random_field(&grid, &mut rng, 1.5);
            let h_chi = field_h_transform(&f, &chi, r).unwrap();
            assert!(h_phi.sup_distance(&h_chi).unwrap() <= phi.sup_distance(&chi).unwrap() + 1e-12);
        }
    }
}

fn preset_field(name: &str, r: f64, h: f64) -> (DensityModel, ScalarField) {
    let model = DensityModel::preset(name).unwrap();
    let grid = GridSpec::covering(&model.support_box().expanded(r), h).unwrap();
    let f = ScalarField::discretize_density(&model, &grid).unwrap();
    (model, f)
}

/// Largest difference between axis neighbors divided by the spacing.
fn grid_modulus(field: &ScalarField) -> f64 {
    let g = field.grid();
    let h = g.spacing();
    let v = field.values();
    let counts = g.counts();
    let mut worst = 0.0f64;
    if counts.len() == 1 {
        for i in 1..counts[0] {
            worst = worst.max((v[i] - v[i - 1]).abs());
        }
    } else {
        for i in 0..counts[0] {
            for j in 0..counts[1] {
                let here = v[g.index(&[i, j])];
                if i > 0 {
                    worst = worst.max((here - v[g.index(&[i - 1, j])]).abs());
                }
                if j > 0 {
                    worst = worst.max((here - v[g.index(&[i, j - 1])]).abs());
                }
            }
        }
    }
    worst / h
}

#[test]
fn iterates_on_the_1d_preset() {
    let r = 0.2;
    let (model, f) = preset_field(PRESET_MIXTURE6, r, r / 40.0);
    let max_f = f.max();
    let ks: Vec<u32> = (0..=20).collect();
    let iterates = iterate_h_many(&f, r, &ks).unwrap();
    let fr = &iterates[0];
    assert_eq!(fr.values(), ball_average(&f, r).unwrap().values());
    let slack = 0.02 * max_f;
    for k in 1..=20usize {
        let hk = &iterates[k];
        let prev = &iterates[k - 1];
        assert!(
            hk.values().iter().zip(fr.values()).all(|(a, b)| a <= b),
            "H^{k} f_r <= f_r"
        );
        assert!(
            hk.values().iter().zip(prev.values()).all(|(a, b)| a <= b),
            "non-increasing at k={k}"
        );
        let err = hk.sup_distance(&f).unwrap();
        let bound = k as f64 * model.lipschitz_bound() * r + slack;
        assert!(err <= bound, "k={k}: {err} > {bound}");
    }
    let m1 = grid_modulus(&iterates[1]);
    let limit = grid_modulus(fr).min(grid_modulus(&f)) + slack / f.grid().spacing();
    assert!(m1 <= limit, "{m1} > {limit}");
}

#[test]
fn crater_iterates_stay_below_the_ball_average() {
    let r = 0.3;
    let (model, f) = preset_field(PRESET_CRATER, r, r / 10.0);
    let iterates = iterate_h_many(&f, r, &[0, 1, 2, 5]).unwrap();
    let fr = &iterates[0];
    for w in iterates.windows(2) {
        assert!(w[1].values().iter().zip(w[0].values()).all(|(a, b)| a <= b));
    }
    let err = iterates[3].sup_distance(&f).unwrap();
    assert!(err <= 5.0 * model.lipschitz_bound() * r + 0.02 * f.max());
    assert!(iterates[1]
        .values()
        .iter()
        .zip(fr.values())
        .all(|(a, b)| a <= b));
}

#[test]
fn coreness_fixed_point_and_bounds() {
    let r = 0.1;
    let (_, f) = preset_field(PRESET_MIXTURE6, r, r / 40.0);
    let cr = continuum_r_coreness(&f, r).unwrap();
    assert!(cr.converged);
    let eps = 1e-9 * f.max();
    let again = field_h_transform(&f, &cr.field, r).unwrap();
    assert!(again.sup_distance(&cr.field).unwrap() <= 10.0 * eps);
    let fr = ball_average(&f, r).unwrap();
    assert!(cr
        .field
        .values()
        .iter()
        .zip(fr.values())
        .all(|(c, a)| c <= a));
}

#[test]
fn extrapolated_coreness_is_sandwiched() {
    let model = DensityModel::preset(PRESET_MIXTURE6).unwrap();
    let radii = [0.2, 0.1, 0.05];
    let grid = GridSpec::covering(&model.support_box().expanded(radii[0]), 0.005).unwrap();
    let ex = continuum_coreness_extrapolate(&model, &grid, &radii).unwrap();
    let f = ScalarField::discretize_density(&model, &grid).unwrap();
    let slack = 0.03 * f.max();
    for ((c, fv), e) in ex
        .estimate
        .values()
        .iter()
        .zip(f.values())
        .zip(ex.error.values())
    {
        assert!(*c >= fv / 2.0 - slack && *c <= fv + slack);
        assert!(*e >= 0.0);
    }
    assert_eq!(ex.estimate.tag(), FieldTag::Coreness0);
}
