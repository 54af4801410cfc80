use crate::error::{DepthError, Result};

/// Where a sampled cloud came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub model: String,
    pub seed: u64,
}

/// `n` points in `R^d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    provenance: Option<Provenance>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(DepthError::input("point cloud dimension must be >= 1"));
        }
        if coords.len() % dim != 0 {
            return Err(DepthError::input(format!(
                "{} coordinates do not form rows of length {dim}",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|v| !v.is_finite()) {
            return Err(DepthError::input(format!(
                "non-finite coordinate in row {}",
                i / dim
            )));
        }
        Ok(PointCloud {
            dim,
            coords,
            provenance: None,
        })
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(DepthError::input(format!(
                "row of length {} in a {dim}-d cloud",
                r.len()
            )));
        }
        PointCloud::new(dim, rows.concat())
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Applies `map` to every point; used for rigid motions in tests.
    pub fn map_points(&self, mut map: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.points() {
            let q = map(p);
            if q.len() != self.dim {
                return Err(DepthError::input("mapped point has the wrong dimension"));
            }
            coords.extend(q);
        }
        PointCloud::new(self.dim, coords)
    }
}
