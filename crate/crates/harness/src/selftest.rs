//! Small worked examples with known answers, run by `depthcore selftest`.

use std::io::Write;
use std::sync::Arc;

use depthcore::centrality::{
    coreness_bruteforce, coreness_bucket, coreness_by_iteration, degree_scores, h_transform_graph,
    iterated_h, kmax_bounds,
};
use depthcore::continuum::{
    ball_average, c0_variational_1d, continuum_r_coreness, field_h_transform,
};
use depthcore::geometry::{normalization, unit_ball_volume};
use depthcore::{
    CsrGraph, DensityModel, FieldTag, GridSpec, NeighborhoodGraph, PointCloud, ScalarField,
};

use crate::config::{load_config, NAMED_CONFIGS};
use crate::deviation::estimate_deviation;
use crate::error::Result;
use crate::experiments::{kmax_table, KmaxRecord, KMAX_HEADER};

type Check = (&'static str, fn() -> Result<bool>);

const CHECKS: [Check; 14] = [
    ("unit ball volumes", unit_balls),
    ("normalization N = n omega r^d", normalizer),
    ("complete graph scores", complete_graph),
    ("star graph H-index", star_graph),
    ("path coreness and k_inf", path_graph),
    ("coreness three ways on a geometric graph", coreness_agree),
    ("closed-ball edge at distance exactly r", closed_ball),
    ("kmax guard when k_inf = 0", kmax_guard),
    ("interval characterization of a unimodal field", c0_unimodal),
    ("ball average of a constant interior", constant_average),
    ("H transform of an indicator", indicator_h),
    ("r-coreness below the ball average", coreness_below_average),
    ("deviation of an empty sample", empty_deviation),
    ("named configs parse", configs_parse),
];

/// Runs every check, writing one `PASS`/`FAIL` line each; true when all pass.
pub fn run_selftest<W: Write>(w: &mut W) -> Result<bool> {
    let mut all = true;
    for (name, check) in CHECKS {
        let ok = match check() {
            Ok(ok) => ok,
            Err(e) => {
                writeln!(w, "ERROR {name}: {e}")?;
                false
            }
        };
        writeln!(w, "{} {name}", if ok { "PASS" } else { "FAIL" })?;
        all &= ok;
    }
    Ok(all)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn unit_balls() -> Result<bool> {
    Ok(unit_ball_volume(1)? == 2.0
        && close(unit_ball_volume(2)?, std::f64::consts::PI, 1e-15)
        && close(
            unit_ball_volume(3)?,
            4.0 * std::f64::consts::PI / 3.0,
            1e-14,
        ))
}

fn normalizer() -> Result<bool> {
    Ok(close(
        normalization(1000, 0.1, 2)?,
        1000.0 * std::f64::consts::PI * 0.01,
        1e-12,
    ))
}

fn complete_graph() -> Result<bool> {
    let g = CsrGraph::complete(5);
    let core = coreness_bucket(&g);
    let h = iterated_h(&g, 3);
    Ok(degree_scores(&g).values() == [4; 5] && core.values() == [4; 5] && h.values() == [4; 5])
}

fn star_graph() -> Result<bool> {
    let edges: Vec<(usize, usize)> = (1..6).map(|i| (0, i)).collect();
    let g = CsrGraph::from_edges(6, &edges)?;
    let h = h_transform_graph(&g, &degree_scores(&g))?;
    Ok(h.values() == [1, 1, 1, 1, 1, 1])
}

fn path_graph() -> Result<bool> {
    let g = CsrGraph::path(10);
    let (core, k_inf) = coreness_by_iteration(&g);
    let b = kmax_bounds(&g);
    Ok(core.values() == [1; 10]
        && k_inf == 4
        && b.diameter == 9
        && b.conjecture == 18
        && b.proven_bounds_hold())
}

fn coreness_agree() -> Result<bool> {
    let model = DensityModel::gaussian(vec![0.0, 0.0], 1.0)?;
    let cloud = Arc::new(model.sample(14, 3));
    let g = NeighborhoodGraph::build(cloud, 0.9)?;
    let a = coreness_by_iteration(&g).0;
    let b = coreness_bucket(&g);
    let c = coreness_bruteforce(&g)?;
    Ok(a.values() == b.values() && b.values() == c.values())
}

fn closed_ball() -> Result<bool> {
    let cloud = Arc::new(PointCloud::new(1, vec![0.0, 0.25, 1.0])?);
    let g = NeighborhoodGraph::build(cloud, 0.75)?;
    Ok(degree_scores(&g).values() == [1, 2, 1])
}

fn kmax_guard() -> Result<bool> {
    let bounds = kmax_bounds(&CsrGraph::complete(5));
    let rec = KmaxRecord {
        n: 5,
        r: 1.0,
        seed: 0,
        bounds,
    };
    let (table, failures) = kmax_table(&[rec]);
    let csv = table.to_csv_string();
    Ok(failures.is_empty()
        && csv.starts_with(&(KMAX_HEADER.join(",") + "\n"))
        && csv.lines().nth(1).is_some_and(|l| l.ends_with(",inf")))
}

fn grid_1d(n: usize, h: f64) -> Result<GridSpec> {
    Ok(GridSpec::new(&[0.0], &[(n - 1) as f64 * h], h)?)
}

fn c0_unimodal() -> Result<bool> {
    let v: Vec<f64> = (0..201)
        .map(|i| (-((i as f64 - 100.0) / 30.0).powi(2)).exp())
        .collect();
    let f = ScalarField::new(grid_1d(201, 1.0)?, v.clone(), FieldTag::Custom)?;
    let c0 = c0_variational_1d(&f)?;
    Ok(c0.values().iter().zip(&v).all(|(c, f)| *c == f / 2.0))
}

fn constant_average() -> Result<bool> {
    let mut v = vec![0.0; 401];
    v[50..351].iter_mut().for_each(|x| *x = 2.0);
    let f = ScalarField::new(grid_1d(401, 0.01)?, v, FieldTag::Custom)?;
    let fr = ball_average(&f, 0.2)?;
    Ok(close(fr.values()[200], 2.0, 1e-12))
}

fn indicator_h() -> Result<bool> {
    // Indicator of [1, 3]; with r = 0.5 the H transform of f by itself is 1/2 at the center.
    let h = 0.01;
    let v: Vec<f64> = (0..401)
        .map(|i| if (100..=300).contains(&i) { 1.0 } else { 0.0 })
        .collect();
    let f = ScalarField::new(grid_1d(401, h)?, v, FieldTag::Custom)?;
    let fr = ball_average(&f, 0.5)?;
    let hf = field_h_transform(&f, &fr, 0.5)?;
    Ok(close(hf.values()[200], 1.0, 1e-9)
        && hf.values().iter().zip(fr.values()).all(|(a, b)| a <= b))
}

fn coreness_below_average() -> Result<bool> {
    let model = DensityModel::gaussian(vec![0.0], 1.0)?;
    let grid = GridSpec::covering(&model.support_box().expanded(0.4), 0.01)?;
    let f = ScalarField::discretize_density(&model, &grid)?;
    let fr = ball_average(&f, 0.4)?;
    let cr = continuum_r_coreness(&f, 0.4)?;
    Ok(cr.converged
        && cr
            .field
            .values()
            .iter()
            .zip(fr.values())
            .all(|(c, a)| c <= a))
}

fn empty_deviation() -> Result<bool> {
    let model = DensityModel::gaussian(vec![0.0], 1.0)?;
    let eta = estimate_deviation(&PointCloud::new(1, vec![])?, &model, 0.2, &[0.0])?;
    Ok(close(eta, 0.398_942_28 * (1.0 - 0.04 / 6.0), 1e-3))
}

fn configs_parse() -> Result<bool> {
    for name in NAMED_CONFIGS {
        load_config(name)?;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        let mut out = Vec::new();
        let ok = super::run_selftest(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(ok, "{text}");
        assert_eq!(text.lines().count(), super::CHECKS.len());
    }
}
