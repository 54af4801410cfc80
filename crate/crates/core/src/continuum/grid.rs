use crate::density::{BoxBounds, DensityModel};
use crate::error::{DepthError, Result};

/// Default cap on the number of grid nodes.
pub const DEFAULT_NODE_CAP: usize = 40_000_000;

const MULTIPLE_TOL: f64 = 1e-9;

/// Uniform grid in one or two dimensions.
///
/// Nodes sit at `lo + i * h` on each axis, `i = 0..counts[axis]`. Node index
/// is row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    lo: Vec<f64>,
    h: f64,
    counts: Vec<usize>,
}

impl GridSpec {
    pub fn new(lo: &[f64], hi: &[f64], h: f64) -> Result<Self> {
        Self::with_cap(lo, hi, h, DEFAULT_NODE_CAP)
    }

    pub fn with_cap(lo: &[f64], hi: &[f64], h: f64, cap: usize) -> Result<Self> {
        let dim = lo.len();
        if !(1..=2).contains(&dim) || hi.len() != dim {
            return Err(DepthError::input(format!(
                "grids are 1-D or 2-D, got lo/hi of lengths {dim}/{}",
                hi.len()
            )));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(DepthError::input(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        let mut counts = Vec::with_capacity(dim);
        for a in 0..dim {
            if !(lo[a].is_finite() && hi[a].is_finite() && hi[a] > lo[a]) {
                return Err(DepthError::input(format!(
                    "axis {a}: need lo < hi, got [{}, {}]",
                    lo[a], hi[a]
                )));
            }
            let q = (hi[a] - lo[a]) / h;
            let steps = q.round();
            if (q - steps).abs() > MULTIPLE_TOL * steps.max(1.0) {
                return Err(DepthError::input(format!(
                    "axis {a}: side {} is not a multiple of spacing {h}",
                    hi[a] - lo[a]
                )));
            }
            counts.push(steps as usize + 1);
        }
        let total = counts
            .iter()
            .try_fold(1u64, |acc, &c| acc.checked_mul(c as u64))
            .unwrap_or(u64::MAX);
        if total > cap as u64 {
            return Err(DepthError::Sizing {
                what: "grid nodes",
                needed: total,
                cap: cap as u64,
            });
        }
        Ok(GridSpec {
            lo: lo.to_vec(),
            h,
            counts,
        })
    }

    /// Smallest grid with nodes on multiples of `h` that contains `bounds`.
    pub fn covering(bounds: &BoxBounds, h: f64) -> Result<Self> {
        Self::covering_with_cap(bounds, h, DEFAULT_NODE_CAP)
    }

    pub fn covering_with_cap(bounds: &BoxBounds, h: f64, cap: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(DepthError::input(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        let lo: Vec<f64> = bounds.lo.iter().map(|v| (v / h).floor() * h).collect();
        let hi: Vec<f64> = bounds.hi.iter().map(|v| (v / h).ceil() * h).collect();
        Self::with_cap(&lo, &hi, h, cap)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.counts)
            .map(|(l, &c)| l + (c - 1) as f64 * self.h)
            .collect()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(rows, cols)`: a 1-D grid is a single row.
    pub(crate) fn shape(&self) -> (usize, usize) {
        match self.counts.as_slice() {
            [n] => (1, *n),
            [r, c] => (*r, *c),
            _ => unreachable!(),
        }
    }

    /// Coordinates of node `idx`, written into `out` (length `dim`).
    pub fn node_into(&self, idx: usize, out: &mut [f64]) {
        let (_, cols) = self.shape();
        match self.dim() {
            1 => out[0] = self.lo[0] + idx as f64 * self.h,
            _ => {
                out[0] = self.lo[0] + (idx / cols) as f64 * self.h;
                out[1] = self.lo[1] + (idx % cols) as f64 * self.h;
            }
        }
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.node_into(idx, &mut out);
        out
    }

    /// Index of the node with per-axis indices `ix`.
    pub fn index(&self, ix: &[usize]) -> usize {
        match ix {
            [i] => *i,
            [i, j] => i * self.counts[1] + j,
            _ => panic!("index arity must match grid dimension"),
        }
    }

    /// All node coordinates, row-major.
    pub fn coords(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; self.len() * d];
        for (idx, chunk) in out.chunks_mut(d).enumerate() {
            self.node_into(idx, chunk);
        }
        out
    }

    pub fn bounds(&self) -> BoxBounds {
        BoxBounds {
            lo: self.lo.clone(),
            hi: self.hi(),
        }
    }

    /// Whether the grid box contains `bounds`.
    pub fn covers(&self, bounds: &BoxBounds) -> bool {
        let hi = self.hi();
        let slack = MULTIPLE_TOL * self.h;
        (0..self.dim()).all(|a| self.lo[a] <= bounds.lo[a] + slack && bounds.hi[a] <= hi[a] + slack)
    }

    /// Same grid shifted by `v`.
    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim() {
            return Err(DepthError::input(
                "translation dimension does not match grid",
            ));
        }
        Ok(GridSpec {
            lo: self.lo.iter().zip(v).map(|(a, b)| a + b).collect(),
            h: self.h,
            counts: self.counts.clone(),
        })
    }

    /// Every `stride`-th node on each axis, starting at the first.
    pub fn subsampled(&self, stride: usize) -> Result<(GridSpec, Vec<usize>)> {
        if stride == 0 {
            return Err(DepthError::input("stride must be positive"));
        }
        let counts: Vec<usize> = self.counts.iter().map(|&c| (c - 1) / stride + 1).collect();
        let sub = GridSpec {
            lo: self.lo.clone(),
            h: self.h * stride as f64,
            counts: counts.clone(),
        };
        let ids = match counts.as_slice() {
            [n] => (0..*n).map(|i| i * stride).collect(),
            [r, c] => (0..*r)
                .flat_map(|i| (0..*c).map(move |j| (i * stride, j * stride)))
                .map(|(i, j)| self.index(&[i, j]))
                .collect(),
            _ => unreachable!(),
        };
        Ok((sub, ids))
    }
}

/// What a field represents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldTag {
    Density,
    BallAverage {
        r: f64,
    },
    HIterate {
        k: u32,
        r: f64,
    },
    RCoreness {
        r: f64,
    },
    Coreness0,
    /// Per-node error estimate attached to a `Coreness0` field.
    ErrorEstimate,
    /// Any other nonnegative function on the grid.
    Custom,
}

impl FieldTag {
    pub fn name(&self) -> &'static str {
        match self {
            FieldTag::Density => "f",
            FieldTag::BallAverage { .. } => "f_r",
            FieldTag::HIterate { .. } => "h_iterate",
            FieldTag::RCoreness { .. } => "C_r",
            FieldTag::Coreness0 => "C0",
            FieldTag::ErrorEstimate => "C0_error",
            FieldTag::Custom => "custom",
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            FieldTag::BallAverage { r }
            | FieldTag::HIterate { r, .. }
            | FieldTag::RCoreness { r } => Some(r),
            _ => None,
        }
    }

    pub fn iterations(&self) -> Option<u32> {
        match *self {
            FieldTag::HIterate { k, .. } => Some(k),
            _ => None,
        }
    }
}

/// Nonnegative values on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
    tag: FieldTag,
    model_id: Option<String>,
    /// Region outside of which the underlying density vanishes, when known.
    support: Option<BoxBounds>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>, tag: FieldTag) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(DepthError::input(format!(
                "{} values for {} grid nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(DepthError::input(format!(
                "field value {} at node {i} is not finite and nonnegative",
                values[i]
            )));
        }
        Ok(ScalarField {
            grid,
            values,
            tag,
            model_id: None,
            support: None,
        })
    }

    /// `f` evaluated at every node of `grid`.
    pub fn discretize_density(model: &DensityModel, grid: &GridSpec) -> Result<Self> {
        if model.dim() != grid.dim() {
            return Err(DepthError::input(format!(
                "model dimension {} does not match grid dimension {}",
                model.dim(),
                grid.dim()
            )));
        }
        let d = grid.dim();
        let mut x = vec![0.0; d];
        let values = (0..grid.len())
            .map(|i| {
                grid.node_into(i, &mut x);
                model.value_at(&x)
            })
            .collect();
        Ok(ScalarField {
            grid: grid.clone(),
            values,
            tag: FieldTag::Density,
            model_id: Some(model.id().to_string()),
            support: Some(model.support_box().clone()),
        })
    }

    pub(crate) fn derived(&self, values: Vec<f64>, tag: FieldTag) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values,
            tag,
            model_id: self.model_id.clone(),
            support: self.support.clone(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn model_id(&self) -> Option<&str> {
        self.model_id.as_deref()
    }

    pub fn support(&self) -> Option<&BoxBounds> {
        self.support.as_ref()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `max_i |self_i - other_i|`; grids must match.
    pub fn sup_distance(&self, other: &ScalarField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(DepthError::input("fields live on different grids"));
        }
        Ok(())
    }

    /// Multilinear interpolation at `x`; zero outside the grid box.
    pub fn sample_at(&self, x: &[f64]) -> f64 {
        let g = &self.grid;
        let d = g.dim();
        let mut base = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for a in 0..d {
            let t = (x[a] - g.lo[a]) / g.h;
            let n = g.counts[a];
            if !(t >= -1e-9 && t <= (n - 1) as f64 + 1e-9) {
                return 0.0;
            }
            let i = (t.floor().max(0.0) as usize).min(n.saturating_sub(2));
            base[a] = i;
            frac[a] = (t - i as f64).clamp(0.0, 1.0);
        }
        let v = &self.values;
        match d {
            1 => {
                if g.counts[0] == 1 {
                    return v[0];
                }
                v[base[0]] * (1.0 - frac[0]) + v[base[0] + 1] * frac[0]
            }
            _ => {
                let cols = g.counts[1];
                let at = |i: usize, j: usize| v[i.min(g.counts[0] - 1) * cols + j.min(cols - 1)];
                let (i, j) = (base[0], base[1]);
                let (u, w) = (frac[0], frac[1]);
                (at(i, j) * (1.0 - w) + at(i, j + 1) * w) * (1.0 - u)
                    + (at(i + 1, j) * (1.0 - w) + at(i + 1, j + 1) * w) * u
            }
        }
    }

    /// This field interpolated onto the nodes of `grid`.
    pub fn resampled(&self, grid: &GridSpec) -> Result<Self> {
        if grid.dim() != self.grid.dim() {
            return Err(DepthError::input("cannot resample across dimensions"));
        }
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|i| {
                grid.node_into(i, &mut x);
                self.sample_at(&x).max(0.0)
            })
            .collect();
        Ok(ScalarField {
            grid: grid.clone(),
            values,
            tag: self.tag,
            model_id: self.model_id.clone(),
            support: self.support.clone(),
        })
    }

    /// Values at the given node indices, on a grid of their own.
    pub fn restricted(&self, grid: GridSpec, ids: &[usize]) -> Result<Self> {
        let values = ids.iter().map(|&i| self.values[i]).collect();
        let mut out = ScalarField::new(grid, values, self.tag)?;
        out.model_id = self.model_id.clone();
        out.support = self.support.clone();
        Ok(out)
    }
}
