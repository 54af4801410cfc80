use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::sq_dist;
use crate::error::{DepthError, Result};

/// Volume of the unit Euclidean ball, `pi^(d/2) / Gamma(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(DepthError::input("dimension must be >= 1"));
    }
    // V_d = V_{d-2} * 2 pi / d with V_0 = 1, V_1 = 2.
    let mut v = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    Ok(v)
}

/// Expected ball population under a unit density, `N = n * omega * r^d`.
pub fn normalization(n: usize, r: f64, d: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(DepthError::input(format!("radius must be > 0, got {r}")));
    }
    Ok(n as f64 * unit_ball_volume(d)? * r.powi(d as i32))
}

/// Monte-Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
}

/// Estimates `|B(y, r) ∩ B(x, alpha)|` from `m` uniform draws in `B(y, r)`.
///
/// Only the regime `r <= alpha`, `|y - x| <= alpha` is accepted.
pub fn ball_intersection_volume_mc(
    y: &[f64],
    r: f64,
    x: &[f64],
    alpha: f64,
    m: usize,
    seed: u64,
) -> Result<McEstimate> {
    let d = y.len();
    if d == 0 || x.len() != d {
        return Err(DepthError::input("centres must share a positive dimension"));
    }
    if !(r > 0.0 && r <= alpha) {
        return Err(DepthError::input(format!(
            "need 0 < r <= alpha, got r = {r}, alpha = {alpha}"
        )));
    }
    if sq_dist(x, y).sqrt() > alpha {
        return Err(DepthError::input("need |y - x| <= alpha"));
    }
    if m == 0 {
        return Err(DepthError::input("sample count must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha_sq = alpha * alpha;
    let mut z = vec![0.0; d];
    let mut hits = 0usize;
    for _ in 0..m {
        let mut norm_sq = 0.0f64;
        for c in z.iter_mut() {
            *c = rng.sample(StandardNormal);
            norm_sq += *c * *c;
        }
        let radius = r * rng.random::<f64>().powf(1.0 / d as f64) / norm_sq.sqrt();
        let mut d2 = 0.0;
        for a in 0..d {
            let p = y[a] + radius * z[a];
            d2 += (p - x[a]) * (p - x[a]);
        }
        if d2 <= alpha_sq {
            hits += 1;
        }
    }
    let vol = unit_ball_volume(d)? * r.powi(d as i32);
    let p = hits as f64 / m as f64;
    Ok(McEstimate {
        value: vol * p,
        std_err: vol * (p * (1.0 - p) / m as f64).sqrt(),
    })
}
