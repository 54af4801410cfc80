use rayon::prelude::*;

use super::grid::{FieldTag, GridSpec, ScalarField};
use super::stencil::{Stencil, Weights};
use crate::error::{DepthError, Result};

/// Fixpoint tolerance relative to `max f`.
pub const EPS_FIX_REL: f64 = 1e-9;
pub const MAX_FIX_ITERATIONS: usize = 10_000;

/// `f` quantized on the stencil of radius `r`; evaluates `f_r` and `H_r`.
struct Operator<'a> {
    grid: &'a GridSpec,
    stencil: Stencil,
    weights: Weights,
}

impl<'a> Operator<'a> {
    fn new(f: &'a ScalarField, r: f64) -> Result<Self> {
        let grid = f.grid();
        let stencil = Stencil::new(grid, r)?;
        if let Some(support) = f.support() {
            if !grid.covers(&support.expanded(r)) {
                return Err(DepthError::input(format!(
                    "grid box does not contain the model support expanded by r = {r}"
                )));
            }
        }
        let weights = Weights::new(f.values(), &stencil);
        Ok(Operator {
            grid,
            stencil,
            weights,
        })
    }

    fn ball_average(&self) -> Vec<f64> {
        self.stencil
            .ball_sums(self.grid, &self.weights.q)
            .into_iter()
            .map(|s| self.weights.mass(s as u64))
            .collect()
    }

    /// `H_r phi` at node `idx`, given that the answer is at most `cap`.
    ///
    /// With ball nodes sorted by decreasing `phi` and cumulative masses `W_j`,
    /// the value is `max_j min(phi_(j), W_j)`. Nodes with `phi >= cap` only
    /// enter through their total mass: if that mass reaches `cap`, the answer
    /// is `cap`.
    fn node(&self, idx: usize, phi: &[f64], cap: f64, buf: &mut Vec<(f64, u64)>) -> f64 {
        buf.clear();
        let q = &self.weights.q;
        let mut above = 0u64;
        self.stencil
            .for_each_range(self.grid.shape(), idx, |lo, hi| {
                for j in lo..=hi {
                    let (p, w) = (phi[j], q[j]);
                    if w == 0 || p <= 0.0 {
                        continue;
                    }
                    if p >= cap {
                        above += w;
                    } else {
                        buf.push((p, w));
                    }
                }
            });
        let base = self.weights.mass(above);
        if base >= cap {
            return cap;
        }
        // Scan in decreasing `phi` until the cumulative mass crosses `phi`.
        // Iterates move little per sweep, so the crossing is usually near
        // `cap`: sort bands below it one at a time instead of the whole ball.
        let mut rest: &mut [(f64, u64)] = buf;
        let mut total = above;
        let mut best = base;
        let mut width = 1.0 / 64.0;
        while !rest.is_empty() {
            let lo = if cap.is_finite() && width < 1.0 {
                cap * (1.0 - width)
            } else {
                0.0
            };
            let split = partition_at_least(rest, lo);
            let (band, bottom) = std::mem::take(&mut rest).split_at_mut(split);
            band.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
            for &(p, w) in band.iter() {
                total += w;
                let mass = self.weights.mass(total);
                if mass >= p {
                    return best.max(p);
                }
                best = best.max(mass);
            }
            rest = bottom;
            width *= 4.0;
        }
        best
    }

    fn apply(&self, phi: &[f64]) -> Vec<f64> {
        (0..self.grid.len())
            .into_par_iter()
            .map_init(Vec::new, |buf, idx| self.node(idx, phi, f64::INFINITY, buf))
            .collect()
    }
}

/// Moves entries with `phi >= lo` to the front; returns their count.
fn partition_at_least(items: &mut [(f64, u64)], lo: f64) -> usize {
    let mut k = 0;
    for i in 0..items.len() {
        if items[i].0 >= lo {
            items.swap(i, k);
            k += 1;
        }
    }
    k
}

/// Iterates `H_r` from `f_r`, recomputing only nodes whose ball saw a change.
///
/// The iterates are non-increasing, so each node's previous value caps its
/// next one.
struct Iteration<'a> {
    op: Operator<'a>,
    current: Vec<f64>,
    changed: Vec<usize>,
    sweeps: u32,
}

impl<'a> Iteration<'a> {
    fn new(op: Operator<'a>) -> Self {
        let current = op.ball_average();
        Iteration {
            op,
            current,
            changed: Vec::new(),
            sweeps: 0,
        }
    }

    fn candidates(&self) -> Vec<usize> {
        let n = self.current.len();
        if self.sweeps == 0 {
            return (0..n).filter(|&i| self.current[i] > 0.0).collect();
        }
        let shape = self.op.grid.shape();
        let mut mark = vec![false; n];
        if self.changed.len().saturating_mul(self.op.stencil.count()) < n {
            for &c in &self.changed {
                self.op
                    .stencil
                    .for_each_range(shape, c, |lo, hi| mark[lo..=hi].fill(true));
            }
        } else {
            let mut ind = vec![0u64; n];
            for &c in &self.changed {
                ind[c] = 1;
            }
            for (m, s) in mark
                .iter_mut()
                .zip(self.op.stencil.ball_sums(self.op.grid, &ind))
            {
                *m = s > 0;
            }
        }
        (0..n)
            .filter(|&i| mark[i] && self.current[i] > 0.0)
            .collect()
    }

    /// One application; returns the largest decrease.
    fn sweep(&mut self) -> f64 {
        let cand = self.candidates();
        let cur = &self.current;
        let op = &self.op;
        let updates: Vec<(usize, f64)> = cand
            .par_iter()
            .map_init(Vec::new, |buf, &i| (i, op.node(i, cur, cur[i], buf)))
            .filter(|&(i, v)| v != cur[i])
            .collect();
        let mut delta = 0.0f64;
        self.changed.clear();
        for (i, v) in updates {
            delta = delta.max(self.current[i] - v);
            self.current[i] = v;
            self.changed.push(i);
        }
        self.sweeps += 1;
        delta
    }
}

/// Ball average `f_r`: the mean of `f` over the stencil nodes within `r`.
/// Nodes outside the grid count as zero.
pub fn ball_average(f: &ScalarField, r: f64) -> Result<ScalarField> {
    let op = Operator::new(f, r)?;
    Ok(f.derived(op.ball_average(), FieldTag::BallAverage { r }))
}

/// One application of `H_r` with density `f` to `phi`.
pub fn field_h_transform(f: &ScalarField, phi: &ScalarField, r: f64) -> Result<ScalarField> {
    f.check_same_grid(phi)?;
    let op = Operator::new(f, r)?;
    let tag = match phi.tag() {
        FieldTag::BallAverage { r: rr } if rr == r => FieldTag::HIterate { k: 1, r },
        FieldTag::HIterate { k, r: rr } if rr == r => FieldTag::HIterate { k: k + 1, r },
        FieldTag::RCoreness { r: rr } if rr == r => FieldTag::RCoreness { r },
        _ => FieldTag::Custom,
    };
    Ok(f.derived(op.apply(phi.values()), tag))
}

/// `H_r^k f_r`; `k = 0` gives `f_r`.
pub fn iterate_h(f: &ScalarField, r: f64, k: u32) -> Result<ScalarField> {
    Ok(iterate_h_many(f, r, &[k])?.pop().unwrap())
}

/// `H_r^k f_r` for each requested `k`, from one pass. Output follows `ks`.
pub fn iterate_h_many(f: &ScalarField, r: f64, ks: &[u32]) -> Result<Vec<ScalarField>> {
    let mut it = Iteration::new(Operator::new(f, r)?);
    let mut order: Vec<usize> = (0..ks.len()).collect();
    order.sort_by_key(|&i| ks[i]);
    let mut out = vec![None; ks.len()];
    let mut stationary = false;
    for i in order {
        while it.sweeps < ks[i] && !stationary {
            stationary = it.sweep() == 0.0;
        }
        let tag = if ks[i] == 0 {
            FieldTag::BallAverage { r }
        } else {
            FieldTag::HIterate { k: ks[i], r }
        };
        out[i] = Some(f.derived(it.current.clone(), tag));
    }
    Ok(out.into_iter().map(Option::unwrap).collect())
}

/// Outcome of the `C_r` fixpoint iteration.
#[derive(Clone, Debug)]
pub struct RCoreness {
    pub field: ScalarField,
    /// Applications of `H_r` performed.
    pub iterations: usize,
    /// Sup-norm change made by the last application.
    pub last_delta: f64,
    pub converged: bool,
}

/// Continuum r-coreness: `H_r` iterated from `f_r` until a sweep changes no
/// node by more than `1e-9 * max f`, or the iteration cap is hit.
pub fn continuum_r_coreness(f: &ScalarField, r: f64) -> Result<RCoreness> {
    let eps = EPS_FIX_REL * f.max();
    let mut it = Iteration::new(Operator::new(f, r)?);
    let mut last_delta = f64::INFINITY;
    while (it.sweeps as usize) < MAX_FIX_ITERATIONS {
        last_delta = it.sweep();
        if last_delta <= eps {
            break;
        }
    }
    let converged = last_delta <= eps;
    if !converged {
        log::warn!(
            "r-coreness at r = {r} not converged after {} sweeps (last change {last_delta:e})",
            it.sweeps
        );
    }
    let iterations = it.sweeps as usize;
    Ok(RCoreness {
        field: f.derived(it.current, FieldTag::RCoreness { r }),
        iterations,
        last_delta,
        converged,
    })
}
