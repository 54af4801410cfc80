//! Grid realizations of the continuum objects in one and two dimensions.
//!
//! Fields live on uniform grids. Ball averages and the `H_r` transform use a
//! shared stencil of node offsets within distance `r`, normalized by the
//! stencil's own volume so that constants are reproduced exactly.

mod coreness0;
mod grid;
mod stencil;
mod transform;

pub use coreness0::{c0_variational_1d, continuum_coreness_extrapolate, Extrapolation};
pub use grid::{FieldTag, GridSpec, ScalarField, DEFAULT_NODE_CAP};
pub use stencil::Stencil;
pub use transform::{
    ball_average, continuum_r_coreness, field_h_transform, iterate_h, iterate_h_many, RCoreness,
    EPS_FIX_REL, MAX_FIX_ITERATIONS,
};

use crate::density::DensityModel;
use crate::error::Result;

/// `model` evaluated at every node of `grid`.
pub fn discretize_density(model: &DensityModel, grid: &GridSpec) -> Result<ScalarField> {
    ScalarField::discretize_density(model, grid)
}
