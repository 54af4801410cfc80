//! Data depth for Euclidean point clouds through graph centrality.
//!
//! A sample is turned into its r-neighborhood graph, on which the degree, the
//! iterated H-index and the coreness are computed. The [`continuum`] module
//! holds the grid realizations of their large-sample limits: the ball average
//! `f_r`, the `H_r` transform and its iterates, the continuum r-coreness and
//! the continuum coreness `C_0`.

pub mod centrality;
pub mod continuum;
pub mod density;
pub mod error;
pub mod geometry;
pub mod io;

pub use centrality::{Measure, VertexScores};
pub use continuum::{FieldTag, GridSpec, ScalarField};
pub use density::DensityModel;
pub use error::{DepthError, Result};
pub use geometry::{Adjacency, CsrGraph, GridIndex, IntervalGraph, NeighborhoodGraph, PointCloud};
