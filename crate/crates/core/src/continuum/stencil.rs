use super::grid::GridSpec;
use crate::error::{DepthError, Result};

/// Node offsets within distance `r`, stored as rows `(di, w)` covering
/// columns `-w..=w` at row offset `di`. 1-D stencils have the single row `(0, m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    rows: Vec<(isize, usize)>,
    count: usize,
}

impl Stencil {
    pub fn new(grid: &GridSpec, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(DepthError::input(format!(
                "radius must be positive, got {r}"
            )));
        }
        let h = grid.spacing();
        if h > r / 10.0 * (1.0 + 1e-9) {
            return Err(DepthError::Accuracy {
                spacing: h,
                radius: r,
            });
        }
        let q = r / h;
        let m = (q + 1e-9).floor() as isize;
        let rows: Vec<(isize, usize)> = match grid.dim() {
            1 => vec![(0, m as usize)],
            _ => (-m..=m)
                .map(|di| {
                    let rest = (q * q - (di * di) as f64).max(0.0);
                    (di, (rest.sqrt() + 1e-9).floor() as usize)
                })
                .collect(),
        };
        let count = rows.iter().map(|&(_, w)| 2 * w + 1).sum();
        Ok(Stencil { rows, count })
    }

    pub fn rows(&self) -> &[(isize, usize)] {
        &self.rows
    }

    /// Number of offsets, the origin included.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Visits the in-grid nodes of the ball around `idx` as contiguous index
    /// ranges `lo..=hi`.
    #[inline]
    pub(crate) fn for_each_range(
        &self,
        shape: (usize, usize),
        idx: usize,
        mut visit: impl FnMut(usize, usize),
    ) {
        let (rows, cols) = shape;
        let (r0, c0) = (idx / cols, idx % cols);
        for &(di, w) in &self.rows {
            let r = r0 as isize + di;
            if r < 0 || r >= rows as isize {
                continue;
            }
            let base = r as usize * cols;
            let lo = c0.saturating_sub(w);
            let hi = (c0 + w).min(cols - 1);
            visit(base + lo, base + hi);
        }
    }

    /// Sum over the ball at every node, exact in integer arithmetic.
    pub(crate) fn ball_sums(&self, grid: &GridSpec, values: &[u64]) -> Vec<u128> {
        let (rows, cols) = grid.shape();
        let mut prefix = vec![0u128; rows * (cols + 1)];
        for r in 0..rows {
            let p = &mut prefix[r * (cols + 1)..(r + 1) * (cols + 1)];
            for c in 0..cols {
                p[c + 1] = p[c] + values[r * cols + c] as u128;
            }
        }
        let shape = (rows, cols);
        let mut out = vec![0u128; rows * cols];
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(idx, slot)| {
            let mut s = 0u128;
            self.for_each_range(shape, idx, |lo, hi| {
                let r = lo / cols;
                let (a, b) = (lo % cols, hi % cols);
                let p = &prefix[r * (cols + 1)..];
                s += p[b + 1] - p[a];
            });
            *slot = s;
        });
        out
    }
}

/// A nonnegative field converted to integer weights so that every partial sum
/// over a ball is exact and independent of summation order. The ball mass of
/// an index set `S` is `sum_{S} q * unit`.
#[derive(Clone, Debug)]
pub(crate) struct Weights {
    pub q: Vec<u64>,
    pub unit: f64,
}

impl Weights {
    pub fn new(values: &[f64], stencil: &Stencil) -> Self {
        let max = values.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return Weights {
                q: vec![0; values.len()],
                unit: 0.0,
            };
        }
        // Sums of up to `count` weights must fit in 63 bits.
        let head = 64 - (stencil.count() as u64).leading_zeros();
        let bits = (62 - head as i32).min(52);
        let scale = (bits as f64).exp2();
        let q = values
            .iter()
            .map(|&v| (v / max * scale).round() as u64)
            .collect();
        Weights {
            q,
            unit: max / scale / stencil.count() as f64,
        }
    }

    #[inline]
    pub fn mass(&self, total: u64) -> f64 {
        total as f64 * self.unit
    }
}
