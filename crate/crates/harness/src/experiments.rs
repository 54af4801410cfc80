//! Convergence, rate and max-iteration experiments.
//!
//! Each `(n, r, seed)` cell is an independent job. Rows are sorted before
//! writing, so output bytes do not depend on the worker count.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use depthcore::centrality::{
    coreness_bucket, coreness_by_iteration, iterated_h_many, kmax_bounds_from, point_depth,
    point_depths, DepthQuery, KmaxBounds,
};
use depthcore::continuum::{
    ball_average, c0_variational_1d, continuum_coreness_extrapolate, continuum_r_coreness,
    iterate_h_many,
};
use depthcore::geometry::{Adjacency, Neighbors};
use depthcore::{
    DensityModel, GridIndex, GridSpec, IntervalGraph, NeighborhoodGraph, PointCloud, ScalarField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Target};
use crate::deviation::deviation_against;
use crate::error::{HarnessError, Result};
use crate::report::{fmt_value, Table};

/// Estimated adjacency entries above which `--allow-long` is required.
pub const WORK_BUDGET: f64 = 2e10;

/// Spacing of the 1-D `C0` reference grid.
const C0_SPACING_1D: f64 = 0.001;

const PROBES: usize = 10;

/// The r-neighborhood graph, implicit in 1-D.
pub enum SampleGraph {
    Interval(IntervalGraph),
    General(NeighborhoodGraph),
}

impl SampleGraph {
    pub fn build(cloud: &Arc<PointCloud>, r: f64) -> Result<Self> {
        Ok(if cloud.dim() == 1 {
            SampleGraph::Interval(IntervalGraph::build(cloud, r)?)
        } else {
            SampleGraph::General(NeighborhoodGraph::build(cloud.clone(), r)?)
        })
    }

    fn inner(&self) -> &dyn Adjacency {
        match self {
            SampleGraph::Interval(g) => g,
            SampleGraph::General(g) => g,
        }
    }
}

impl Adjacency for SampleGraph {
    fn vertex_count(&self) -> usize {
        self.inner().vertex_count()
    }

    fn degree(&self, v: usize) -> usize {
        self.inner().degree(v)
    }

    fn neighbors(&self, v: usize) -> Neighbors<'_> {
        self.inner().neighbors(v)
    }

    fn radius(&self) -> Option<f64> {
        self.inner().radius()
    }

    fn entry_count(&self) -> u64 {
        self.inner().entry_count()
    }

    fn max_degree(&self) -> usize {
        self.inner().max_degree()
    }
}

/// Refuses configs whose estimated work exceeds [`WORK_BUDGET`].
pub fn check_budget(cfg: &ExperimentConfig, allow_long: bool) -> Result<()> {
    let work = cfg.work_estimate()?;
    if work > WORK_BUDGET && !allow_long {
        return Err(HarnessError::Budget(format!(
            "config `{}` needs about {work:.2e} adjacency entries (budget {WORK_BUDGET:.0e}); pass --allow-long to run it",
            cfg.name
        )));
    }
    Ok(())
}

fn require_low_dim(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.dim() > 2 {
        return Err(HarnessError::Input(format!(
            "continuum references need d <= 2, config has d = {}",
            cfg.dim()
        )));
    }
    Ok(())
}

/// Nodes at which sup errors are taken: spacing `fraction * r` over the support box.
pub fn eval_grid(model: &DensityModel, r: f64, fraction: f64) -> Result<GridSpec> {
    Ok(GridSpec::covering(model.support_box(), r * fraction)?)
}

/// Spacing used for fixed-radius continuum fields.
pub fn continuum_spacing(d: usize, r: f64) -> f64 {
    if d == 1 {
        r / 40.0
    } else {
        r / 10.0
    }
}

/// `f_r` on a grid covering the support expanded by `r`.
fn ball_average_field(model: &DensityModel, r: f64) -> Result<ScalarField> {
    let grid = GridSpec::covering(
        &model.support_box().expanded(r),
        continuum_spacing(model.dim(), r),
    )?;
    let f = ScalarField::discretize_density(model, &grid)?;
    Ok(ball_average(&f, r)?)
}

/// `C0` of the model: the interval characterization in 1-D, the smallest of
/// `radii` in 2-D.
pub fn coreness0_field(model: &DensityModel, radii: &[f64]) -> Result<ScalarField> {
    if model.dim() == 1 {
        let grid = GridSpec::covering(model.support_box(), C0_SPACING_1D)?;
        let f = ScalarField::discretize_density(model, &grid)?;
        return Ok(c0_variational_1d(&f)?);
    }
    let r_max = radii[0];
    let r_min = *radii.last().unwrap();
    let grid = GridSpec::covering(&model.support_box().expanded(r_max), r_min / 10.0)?;
    Ok(continuum_coreness_extrapolate(model, &grid, radii)?.estimate)
}

/// Reference values at the eval nodes for one radius.
struct References {
    nodes: Vec<f64>,
    /// Limit of the normalized degree.
    degree: Vec<f64>,
    /// Limits of `H^k`, one per finite `k >= 1` in the config.
    h: Vec<Vec<f64>>,
    coreness: Vec<f64>,
    /// `f_r`, for the deviation estimate.
    ball_average: Vec<f64>,
}

fn sample_field(field: &ScalarField, nodes: &[f64], d: usize) -> Vec<f64> {
    nodes.chunks(d).map(|x| field.sample_at(x)).collect()
}

fn references(
    cfg: &ExperimentConfig,
    r: f64,
    hks: &[u32],
    target: Target,
    c0: Option<&ScalarField>,
) -> Result<References> {
    let model = &cfg.density;
    let d = cfg.dim();
    let nodes = eval_grid(model, r, cfg.eval_fraction)?.coords();
    let fr = ball_average_field(model, r)?;
    let ball = sample_field(&fr, &nodes, d);
    let refs = match target {
        Target::Vanishing => {
            let f: Vec<f64> = nodes.chunks(d).map(|x| model.value_at(x)).collect();
            let core = match c0 {
                Some(c0) => sample_field(c0, &nodes, d),
                None => Vec::new(),
            };
            References {
                degree: f.clone(),
                h: vec![f; hks.len()],
                coreness: core,
                ball_average: ball,
                nodes,
            }
        }
        Target::Fixed => {
            let f = ScalarField::discretize_density(model, fr.grid())?;
            let h = iterate_h_many(&f, r, hks)?
                .iter()
                .map(|fk| sample_field(fk, &nodes, d))
                .collect();
            let cr = continuum_r_coreness(&f, r)?;
            if !cr.converged {
                log::warn!("continuum r-coreness at r = {r} stopped before converging");
            }
            References {
                degree: ball.clone(),
                h,
                coreness: sample_field(&cr.field, &nodes, d),
                ball_average: ball,
                nodes,
            }
        }
    };
    Ok(refs)
}

fn sup_error(values: &[f64], reference: &[f64]) -> f64 {
    values
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// One sample with its graph and radius index.
struct Run {
    cloud: Arc<PointCloud>,
    index: GridIndex,
    graph: SampleGraph,
}

impl Run {
    fn new(model: &DensityModel, n: usize, r: f64, seed: u64) -> Result<Self> {
        let cloud = Arc::new(model.sample(n, seed));
        let index = GridIndex::new(&cloud, r)?;
        let graph = SampleGraph::build(&cloud, r)?;
        Ok(Run {
            cloud,
            index,
            graph,
        })
    }

    fn depths(&self, nodes: &[f64], query: DepthQuery<'_>) -> Result<Vec<f64>> {
        Ok(point_depths(&self.cloud, &self.index, nodes, query)?)
    }

    /// Sup error over all nodes, checked against single-node errors at random probes.
    fn checked_sup(
        &self,
        nodes: &[f64],
        reference: &[f64],
        query: DepthQuery<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<f64> {
        let values = self.depths(nodes, query)?;
        let sup = sup_error(&values, reference);
        let d = self.cloud.dim();
        for _ in 0..PROBES.min(reference.len()) {
            let i = rng.random_range(0..reference.len());
            let single = point_depth(&self.cloud, &self.index, &nodes[i * d..(i + 1) * d], query)?;
            let err = (single - reference[i]).abs();
            if err > sup {
                return Err(HarnessError::ProvenBound(format!(
                    "probe error {err} at eval node {i} exceeds the grid sup {sup}"
                )));
            }
        }
        Ok(sup)
    }
}

/// Rows of a convergence run, keyed by `(n, r, seed)`.
struct Row {
    n: usize,
    r: f64,
    seed: u64,
    cells: Vec<String>,
}

fn sorted_rows(mut rows: Vec<Row>) -> Vec<Row> {
    rows.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.r.total_cmp(&b.r))
            .then(a.seed.cmp(&b.seed))
    });
    rows
}

fn finite_hks(cfg: &ExperimentConfig) -> Vec<u32> {
    let mut ks: Vec<u32> = cfg
        .k_values
        .iter()
        .flatten()
        .copied()
        .filter(|&k| k >= 1)
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// Reference tables keyed by the radius bits.
fn reference_tables(
    cfg: &ExperimentConfig,
    hks: &[u32],
    target: Target,
) -> Result<BTreeMap<u64, References>> {
    let c0 = match target {
        Target::Vanishing => Some(coreness0_field(&cfg.density, &cfg.c0_radii)?),
        Target::Fixed => None,
    };
    let mut tables = BTreeMap::new();
    for (_, r, _) in cfg.jobs() {
        if !tables.contains_key(&r.to_bits()) {
            tables.insert(r.to_bits(), references(cfg, r, hks, target, c0.as_ref())?);
        }
    }
    Ok(tables)
}

/// Per-run sup errors of every requested centrality against its limit.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Table> {
    require_low_dim(cfg)?;
    let hks = finite_hks(cfg);
    let tables = reference_tables(cfg, &hks, cfg.target)?;
    let target = match cfg.target {
        Target::Vanishing => "vanishing_r",
        Target::Fixed => "fixed_r",
    };
    let rows: Vec<Row> = cfg
        .jobs()
        .into_par_iter()
        .map(|(n, r, seed)| {
            let started = Instant::now();
            let refs = &tables[&r.to_bits()];
            let run = Run::new(&cfg.density, n, r, seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_9e0b5);
            let mut cells = vec![
                n.to_string(),
                fmt_value(r),
                seed.to_string(),
                target.to_string(),
            ];
            cells.push(fmt_value(run.checked_sup(
                &refs.nodes,
                &refs.degree,
                DepthQuery::Degree,
                &mut rng,
            )?));
            let previous: Vec<u32> = hks.iter().map(|k| k - 1).collect();
            let iterates = iterated_h_many(&run.graph, &previous);
            for ((k, prev), reference) in hks.iter().zip(&iterates).zip(&refs.h) {
                let query = DepthQuery::HIterate {
                    k: *k,
                    previous: prev,
                };
                cells.push(fmt_value(run.checked_sup(
                    &refs.nodes,
                    reference,
                    query,
                    &mut rng,
                )?));
            }
            let core = coreness_bucket(&run.graph);
            cells.push(fmt_value(run.checked_sup(
                &refs.nodes,
                &refs.coreness,
                DepthQuery::Coreness(&core),
                &mut rng,
            )?));
            let eta = deviation_against(&run.cloud, &run.index, &refs.ball_average, &refs.nodes)?;
            cells.push(fmt_value(eta));
            log::info!(
                "converge n={n} r={r} seed={seed}: {:.2?}",
                started.elapsed()
            );
            Ok(Row { n, r, seed, cells })
        })
        .collect::<Result<_>>()?;
    let mut header: Vec<String> = ["n", "r", "seed", "target", "sup_error_degree"]
        .map(String::from)
        .to_vec();
    header.extend(hks.iter().map(|k| format!("sup_error_h{k}")));
    header.push("sup_error_coreness".into());
    header.push("eta".into());
    let mut table = Table::new(header);
    for row in sorted_rows(rows) {
        table.push(row.cells);
    }
    Ok(table)
}

/// Sup errors of the degree against `f` and of the coreness against `C0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub n: usize,
    pub r: f64,
    pub seed: u64,
    pub sup_error_degree: f64,
    pub sup_error_coreness: f64,
}

/// Pearson correlation and least-squares slope of coreness error on degree error.
pub fn rate_summary(points: &[RatePoint]) -> (f64, f64) {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.sup_error_degree).sum::<f64>() / m;
    let my = points.iter().map(|p| p.sup_error_coreness).sum::<f64>() / m;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.sup_error_degree - mx, p.sup_error_coreness - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    (sxy / (sxx * syy).sqrt(), sxy / sxx)
}

pub fn rate_points(cfg: &ExperimentConfig) -> Result<Vec<RatePoint>> {
    require_low_dim(cfg)?;
    let tables = reference_tables(cfg, &[], Target::Vanishing)?;
    let mut points: Vec<RatePoint> = cfg
        .jobs()
        .into_par_iter()
        .map(|(n, r, seed)| {
            let started = Instant::now();
            let refs = &tables[&r.to_bits()];
            let run = Run::new(&cfg.density, n, r, seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_9e0b5);
            let sup_error_degree =
                run.checked_sup(&refs.nodes, &refs.degree, DepthQuery::Degree, &mut rng)?;
            let core = coreness_bucket(&run.graph);
            let sup_error_coreness = run.checked_sup(
                &refs.nodes,
                &refs.coreness,
                DepthQuery::Coreness(&core),
                &mut rng,
            )?;
            log::info!("rate n={n} r={r} seed={seed}: {:.2?}", started.elapsed());
            Ok(RatePoint {
                n,
                r,
                seed,
                sup_error_degree,
                sup_error_coreness,
            })
        })
        .collect::<Result<_>>()?;
    points.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.r.total_cmp(&b.r))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(points)
}

/// The rate sweep as a table with `#summary` footer rows.
pub fn run_rate_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let points = rate_points(cfg)?;
    let mut table = Table::new(
        ["n", "r", "seed", "sup_error_degree", "sup_error_coreness"]
            .map(String::from)
            .to_vec(),
    );
    for p in &points {
        table.push(vec![
            p.n.to_string(),
            fmt_value(p.r),
            p.seed.to_string(),
            fmt_value(p.sup_error_degree),
            fmt_value(p.sup_error_coreness),
        ]);
    }
    let (pearson, slope) = rate_summary(&points);
    table.footer(vec![
        "#summary".into(),
        "pearson".into(),
        fmt_value(pearson),
    ]);
    table.footer(vec!["#summary".into(), "slope".into(), fmt_value(slope)]);
    Ok(table)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KmaxRecord {
    pub n: usize,
    pub r: f64,
    pub seed: u64,
    pub bounds: KmaxBounds,
}

pub fn kmax_records(cfg: &ExperimentConfig) -> Result<Vec<KmaxRecord>> {
    let mut records: Vec<KmaxRecord> = cfg
        .jobs()
        .into_par_iter()
        .map(|(n, r, seed)| {
            let started = Instant::now();
            let cloud = Arc::new(cfg.density.sample(n, seed));
            let graph = SampleGraph::build(&cloud, r)?;
            let (core, k_inf) = coreness_by_iteration(&graph);
            let bounds = kmax_bounds_from(&graph, &core, k_inf);
            log::info!("kmax n={n} r={r} seed={seed}: {:.2?}", started.elapsed());
            Ok(KmaxRecord { n, r, seed, bounds })
        })
        .collect::<Result<_>>()?;
    records.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.r.total_cmp(&b.r))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(records)
}

pub const KMAX_HEADER: [&str; 9] = [
    "n",
    "r",
    "seed",
    "k_inf",
    "diameter",
    "max_degree",
    "montresor_sum",
    "n_vertices",
    "ratio",
];

/// Max-iteration records as a table; conjecture violations are flagged with
/// comment rows. Proven-bound failures are returned separately so the table
/// can still be written.
pub fn kmax_table(records: &[KmaxRecord]) -> (Table, Vec<String>) {
    let mut table = Table::new(KMAX_HEADER.map(String::from).to_vec());
    let mut failures = Vec::new();
    for rec in records {
        let b = &rec.bounds;
        let ratio = match b.ratio() {
            Some(x) => fmt_value(x),
            None => "inf".to_string(),
        };
        table.push(vec![
            rec.n.to_string(),
            fmt_value(rec.r),
            rec.seed.to_string(),
            b.k_inf.to_string(),
            b.diameter.to_string(),
            b.max_degree.to_string(),
            b.montresor_sum.to_string(),
            b.n_vertices.to_string(),
            ratio,
        ]);
        if !b.conjecture_holds() {
            table.comment(format!(
                "# CONJECTURE-VIOLATION n={} r={} seed={} k_inf={} diameter*max_degree={}",
                rec.n,
                fmt_value(rec.r),
                rec.seed,
                b.k_inf,
                b.conjecture
            ));
        }
        if !b.proven_bounds_hold() {
            failures.push(format!(
                "n={} r={} seed={}: k_inf={} montresor_sum={} n_vertices={}",
                rec.n,
                fmt_value(rec.r),
                rec.seed,
                b.k_inf,
                b.montresor_sum,
                b.n_vertices
            ));
        }
    }
    (table, failures)
}

/// Median of a nonempty slice.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Sidecar describing how the rows were produced.
pub fn metadata(cfg: &ExperimentConfig, experiment: &str) -> Value {
    json!({
        "experiment": experiment,
        "config": cfg.name,
        "density": cfg.density.to_config(),
        "n_values": cfg.n_values,
        "radii": cfg.jobs().iter().map(|j| j.1).fold(Vec::<f64>::new(), |mut acc, r| {
            if !acc.contains(&r) { acc.push(r); }
            acc
        }),
        "seed_base": cfg.seed_base,
        "eval_grid": {
            "box": "support_box",
            "spacing": format!("{} * r", cfg.eval_fraction),
        },
        "references": match cfg.target {
            Target::Vanishing => json!({
                "degree": "f",
                "h_iterates": "f",
                "coreness": if cfg.dim() == 1 {
                    json!({"method": "interval characterization", "spacing": C0_SPACING_1D})
                } else {
                    json!({"method": "r-coreness at the smallest radius", "radii": cfg.c0_radii})
                },
            }),
            Target::Fixed => json!({
                "degree": "f_r",
                "h_iterates": "H_r^k f_r",
                "coreness": "C_r",
                "spacing": if cfg.dim() == 1 { "r / 40" } else { "r / 10" },
            }),
        },
        "version": env!("CARGO_PKG_VERSION"),
    })
}
