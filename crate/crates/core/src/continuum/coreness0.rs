use super::grid::{FieldTag, GridSpec, ScalarField};
use super::stencil::Stencil;
use super::transform::continuum_r_coreness;
use crate::density::DensityModel;
use crate::error::{DepthError, Result};

/// Continuum coreness of a 1-D field from its interval characterization:
/// the best of `f(x)/2` and, over grid intervals `[a, b]` containing `x`,
/// `min(min_[a,b] f, f(a)/2, f(b)/2)`.
///
/// Splitting at `x` gives `C0 = min(L, R)` with
/// `L(x) = max(f(x)/2, min(L(x-1), f(x)))` and `R` the mirror scan, so the
/// whole field costs two passes.
pub fn c0_variational_1d(f: &ScalarField) -> Result<ScalarField> {
    if f.grid().dim() != 1 {
        return Err(DepthError::input(
            "the interval characterization needs a 1-D field",
        ));
    }
    let v = f.values();
    let n = v.len();
    let mut left = vec![0.0; n];
    let mut prev = 0.0f64;
    for i in 0..n {
        prev = (v[i] / 2.0).max(prev.min(v[i]));
        left[i] = prev;
    }
    let mut out = vec![0.0; n];
    let mut prev = 0.0f64;
    for i in (0..n).rev() {
        prev = (v[i] / 2.0).max(prev.min(v[i]));
        out[i] = left[i].min(prev);
    }
    Ok(f.derived(out, FieldTag::Coreness0))
}

/// `C0` estimate from a decreasing radius sequence.
#[derive(Clone, Debug)]
pub struct Extrapolation {
    /// `C_r` at the smallest radius.
    pub estimate: ScalarField,
    /// `|C_{r_min} - C_{r'}|` with `r'` the next larger radius.
    pub error: ScalarField,
    pub radii: Vec<f64>,
    /// Fixpoint sweeps per radius.
    pub iterations: Vec<usize>,
}

/// Estimates `C0` by the r-coreness at the smallest radius of `radii`; the
/// error field compares it with the next larger radius, which is computed on
/// the coarsest sub-grid its accuracy rule allows and interpolated back.
///
/// No acceleration is applied: the rate in `r` is unknown. Every radius must
/// satisfy the grid accuracy rule and `radii` must be strictly decreasing with
/// at least two entries.
pub fn continuum_coreness_extrapolate(
    model: &DensityModel,
    grid: &GridSpec,
    radii: &[f64],
) -> Result<Extrapolation> {
    if radii.len() < 2 {
        return Err(DepthError::input("need at least two radii"));
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(DepthError::input("radii must be strictly decreasing"));
    }
    let h = grid.spacing();
    let f = ScalarField::discretize_density(model, grid)?;
    let n = radii.len();
    let mut iterations = Vec::with_capacity(n);
    let mut last_two = Vec::with_capacity(2);
    for (i, &r) in radii.iter().enumerate() {
        Stencil::new(grid, r)?;
        if !grid.covers(&model.support_box().expanded(r)) {
            return Err(DepthError::input(format!(
                "grid box does not contain the model support expanded by r = {r}"
            )));
        }
        if i < n - 2 {
            iterations.push(0);
            continue;
        }
        if i == n - 1 {
            let cr = continuum_r_coreness(&f, r)?;
            iterations.push(cr.iterations);
            last_two.push(cr.field);
            continue;
        }
        // The comparison radius runs on the coarsest grid its accuracy rule
        // allows, then is interpolated back.
        let stride = ((r / (10.0 * h)) * (1.0 + 1e-9)).floor().max(1.0);
        let coarse_grid = GridSpec::covering(&model.support_box().expanded(r), stride * h)?;
        let coarse_f = ScalarField::discretize_density(model, &coarse_grid)?;
        let cr = continuum_r_coreness(&coarse_f, r)?;
        iterations.push(cr.iterations);
        last_two.push(cr.field.resampled(grid)?);
    }
    let coarse = &last_two[0];
    let fine = &last_two[1];
    let err: Vec<f64> = fine
        .values()
        .iter()
        .zip(coarse.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(Extrapolation {
        estimate: fine.derived(fine.values().to_vec(), FieldTag::Coreness0),
        error: fine.derived(err, FieldTag::ErrorEstimate),
        radii: radii.to_vec(),
        iterations,
    })
}
