//! Empirical deviation of the sample from the model over radius-r balls.

use depthcore::continuum::ball_average;
use depthcore::geometry::unit_ball_volume;
use depthcore::{DensityModel, GridIndex, GridSpec, PointCloud, ScalarField};

use crate::error::{HarnessError, Result};
use crate::experiments::continuum_spacing;

/// `max_c |P_n(B(c, r)) - P(B(c, r))| / (omega r^d)` over the row-major `centers`.
///
/// The model ball masses come from grid quadrature. An empty cloud gives the
/// largest model ball mass.
pub fn estimate_deviation(
    cloud: &PointCloud,
    model: &DensityModel,
    r: f64,
    centers: &[f64],
) -> Result<f64> {
    let d = model.dim();
    if cloud.dim() != d || centers.len() % d != 0 {
        return Err(HarnessError::Input(
            "cloud, model and centers must share a dimension".into(),
        ));
    }
    let grid = GridSpec::covering(&model.support_box().expanded(r), continuum_spacing(d, r))?;
    let fr = ball_average(&ScalarField::discretize_density(model, &grid)?, r)?;
    let expected: Vec<f64> = centers.chunks(d).map(|c| fr.sample_at(c)).collect();
    if cloud.is_empty() {
        return Ok(expected.into_iter().fold(0.0, f64::max));
    }
    let index = GridIndex::new(cloud, r)?;
    deviation_against(cloud, &index, &expected, centers)
}

/// [`estimate_deviation`] with the model ball averages already evaluated at the centers.
pub fn deviation_against(
    cloud: &PointCloud,
    index: &GridIndex,
    expected: &[f64],
    centers: &[f64],
) -> Result<f64> {
    let d = cloud.dim();
    let scale = cloud.len() as f64 * unit_ball_volume(d)? * index.radius().powi(d as i32);
    let mut worst = 0.0f64;
    for (c, e) in centers.chunks(d).zip(expected) {
        let count = index.count_within(cloud, c)? as f64;
        worst = worst.max((count / scale - e).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_cloud_gives_max_ball_average() {
        let model = DensityModel::gaussian(vec![0.0], 1.0).unwrap();
        let empty = PointCloud::new(1, vec![]).unwrap();
        let centers: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.1).collect();
        let eta = estimate_deviation(&empty, &model, 0.2, &centers).unwrap();
        // f_r(0) for a standard Gaussian at r = 0.2.
        let expect = 0.398_942_280 * (1.0 - 0.2f64.powi(2) / 6.0);
        assert!((eta - expect).abs() < 1e-3 * expect, "{eta} vs {expect}");
    }

    #[test]
    fn shrinks_with_sample_size() {
        let model = DensityModel::gaussian(vec![0.0], 1.0).unwrap();
        let centers: Vec<f64> = (-30..=30).map(|i| i as f64 * 0.1).collect();
        let eta = |n: usize| {
            let mut v: Vec<f64> = (0..7)
                .map(|s| estimate_deviation(&model.sample(n, s), &model, 0.2, &centers).unwrap())
                .collect();
            v.sort_by(f64::total_cmp);
            v[3]
        };
        assert!(eta(20_000) < eta(1_000));
    }
}
