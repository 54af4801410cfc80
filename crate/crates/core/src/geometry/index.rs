use std::collections::HashMap;

use super::{within, PointCloud};
use crate::error::{DepthError, Result};

/// Uniform bucket grid with cell side `r` for exact closed-ball queries.
#[derive(Clone, Debug)]
pub struct GridIndex {
    dim: usize,
    radius: f64,
    r_sq: f64,
    /// Point ids grouped by cell; ids ascend within a cell.
    order: Vec<u32>,
    cells: HashMap<Vec<i64>, (u32, u32)>,
}

impl GridIndex {
    pub fn new(cloud: &PointCloud, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DepthError::input(format!(
                "radius must be finite and > 0, got {radius}"
            )));
        }
        if cloud.len() > u32::MAX as usize {
            return Err(DepthError::input(
                "point clouds are limited to u32::MAX points",
            ));
        }
        let dim = cloud.dim();
        let keys: Vec<Vec<i64>> = cloud.points().map(|p| cell_of(p, radius)).collect();
        let mut order: Vec<u32> = (0..cloud.len() as u32).collect();
        order.sort_by(|&a, &b| keys[a as usize].cmp(&keys[b as usize]).then(a.cmp(&b)));
        let mut cells = HashMap::new();
        let mut start = 0usize;
        while start < order.len() {
            let key = &keys[order[start] as usize];
            let mut end = start + 1;
            while end < order.len() && keys[order[end] as usize] == *key {
                end += 1;
            }
            cells.insert(key.clone(), (start as u32, end as u32));
            start = end;
        }
        Ok(GridIndex {
            dim,
            radius,
            r_sq: radius * radius,
            order,
            cells,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of indexed points.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Sorted ids of the sample points with `|x - X_i| <= r`.
    pub fn neighbors_of_point(&self, cloud: &PointCloud, x: &[f64]) -> Result<Vec<u32>> {
        self.check(cloud, x)?;
        let mut out = Vec::new();
        self.for_each_within(cloud, x, |i| out.push(i));
        out.sort_unstable();
        Ok(out)
    }

    /// Number of sample points with `|x - X_i| <= r`.
    pub fn count_within(&self, cloud: &PointCloud, x: &[f64]) -> Result<usize> {
        self.check(cloud, x)?;
        let mut count = 0;
        self.for_each_within(cloud, x, |_| count += 1);
        Ok(count)
    }

    fn check(&self, cloud: &PointCloud, x: &[f64]) -> Result<()> {
        if x.len() != self.dim || cloud.dim() != self.dim {
            return Err(DepthError::input(format!(
                "query of dimension {} against a {}-d index",
                x.len(),
                self.dim
            )));
        }
        if cloud.len() != self.order.len() {
            return Err(DepthError::input("cloud does not match the index"));
        }
        Ok(())
    }

    /// Visits every indexed point within `r` of `x`, in no particular order.
    pub(crate) fn for_each_within(
        &self,
        cloud: &PointCloud,
        x: &[f64],
        mut visit: impl FnMut(u32),
    ) {
        let r = self.radius;
        // A small margin in cell units absorbs rounding in the divisions.
        let lo: Vec<i64> = x
            .iter()
            .map(|v| ((v - r) / r - 1e-9).floor() as i64)
            .collect();
        let hi: Vec<i64> = x
            .iter()
            .map(|v| ((v + r) / r + 1e-9).floor() as i64)
            .collect();
        let mut key = lo.clone();
        loop {
            if let Some(&(s, e)) = self.cells.get(&key) {
                for &j in &self.order[s as usize..e as usize] {
                    if within(x, cloud.point(j as usize), r, self.r_sq) {
                        visit(j);
                    }
                }
            }
            let mut a = 0;
            loop {
                if a == self.dim {
                    return;
                }
                key[a] += 1;
                if key[a] <= hi[a] {
                    break;
                }
                key[a] = lo[a];
                a += 1;
            }
        }
    }
}

fn cell_of(p: &[f64], side: f64) -> Vec<i64> {
    p.iter().map(|v| (v / side).floor() as i64).collect()
}
