//! CSV readers and writers. Reals are written with 17 significant digits.

use std::io::{BufRead, Write};

use serde_json::{json, Value};

use crate::centrality::VertexScores;
use crate::continuum::ScalarField;
use crate::error::{DepthError, Result};
use crate::geometry::{Adjacency, PointCloud};

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header `x0,...,x{d-1}`, one point per row.
pub fn write_points_csv<W: Write>(mut w: W, cloud: &PointCloud) -> Result<()> {
    let header: Vec<String> = (0..cloud.dim()).map(|a| format!("x{a}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|&v| fmt_real(v)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_points_csv<R: BufRead>(r: R) -> Result<PointCloud> {
    let mut lines = r.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(DepthError::Csv {
                line: 1,
                message: "missing header".into(),
            })
        }
    };
    let names: Vec<&str> = header
        .trim_end_matches('\r')
        .split(',')
        .map(str::trim)
        .collect();
    for (a, name) in names.iter().enumerate() {
        if *name != format!("x{a}") {
            return Err(DepthError::Csv {
                line: 1,
                message: format!("expected column x{a}, found `{name}`"),
            });
        }
    }
    let dim = names.len();
    let mut coords = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim {
            return Err(DepthError::Csv {
                line: i + 2,
                message: format!("expected {dim} fields, found {}", fields.len()),
            });
        }
        for f in fields {
            let v: f64 = f.trim().parse().map_err(|_| DepthError::Csv {
                line: i + 2,
                message: format!("`{}` is not a number", f.trim()),
            })?;
            coords.push(v);
        }
    }
    PointCloud::new(dim, coords)
}

/// Header `src,dst`, each undirected edge once with `src < dst`.
pub fn write_edges_csv<W: Write, G: Adjacency + ?Sized>(mut w: W, graph: &G) -> Result<()> {
    writeln!(w, "src,dst")?;
    for v in 0..graph.vertex_count() {
        for u in graph.neighbors(v) {
            if v < u {
                writeln!(w, "{v},{u}")?;
            }
        }
    }
    Ok(())
}

/// `vertex,score` with raw integers, or `vertex,score_norm` with each score
/// divided by `normalizer`.
pub fn write_scores_csv<W: Write>(
    mut w: W,
    scores: &VertexScores,
    normalizer: Option<f64>,
) -> Result<()> {
    match normalizer {
        None => {
            writeln!(w, "vertex,score")?;
            for (i, s) in scores.values().iter().enumerate() {
                writeln!(w, "{i},{s}")?;
            }
        }
        Some(n) => {
            writeln!(w, "vertex,score_norm")?;
            for (i, s) in scores.values().iter().enumerate() {
                writeln!(w, "{i},{}", fmt_real(*s as f64 / n))?;
            }
        }
    }
    Ok(())
}

/// Header `x0[,x1],value`, nodes in index order.
pub fn write_field_csv<W: Write>(mut w: W, field: &ScalarField) -> Result<()> {
    let grid = field.grid();
    let d = grid.dim();
    let mut header: Vec<String> = (0..d).map(|a| format!("x{a}")).collect();
    header.push("value".into());
    writeln!(w, "{}", header.join(","))?;
    let mut x = vec![0.0; d];
    for (i, v) in field.values().iter().enumerate() {
        grid.node_into(i, &mut x);
        let mut row: Vec<String> = x.iter().map(|&c| fmt_real(c)).collect();
        row.push(fmt_real(*v));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Sidecar metadata for a field: tag, radius, iteration count, grid, model.
pub fn field_metadata(field: &ScalarField) -> Value {
    let grid = field.grid();
    json!({
        "tag": field.tag().name(),
        "r": field.tag().radius(),
        "k": field.tag().iterations(),
        "grid": {
            "lo": grid.lo(),
            "hi": grid.hi(),
            "spacing": grid.spacing(),
            "counts": grid.counts(),
        },
        "model": field.model_id(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::degree_scores;
    use crate::continuum::{FieldTag, GridSpec};
    use crate::geometry::CsrGraph;

    #[test]
    fn points_round_trip_bitwise() {
        let cloud = PointCloud::new(2, vec![0.1, -3.0e-17, 1.0 / 3.0, 12345.678]).unwrap();
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &cloud).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x0,x1\n"));
        let back = read_points_csv(buf.as_slice()).unwrap();
        assert_eq!(back.coords(), cloud.coords());
    }

    #[test]
    fn malformed_points() {
        assert!(matches!(
            read_points_csv("".as_bytes()),
            Err(DepthError::Csv { line: 1, .. })
        ));
        assert!(matches!(
            read_points_csv("y0\n1\n".as_bytes()),
            Err(DepthError::Csv { line: 1, .. })
        ));
        assert!(matches!(
            read_points_csv("x0,x1\n1,2\n3\n".as_bytes()),
            Err(DepthError::Csv { line: 3, .. })
        ));
        assert!(matches!(
            read_points_csv("x0\nabc\n".as_bytes()),
            Err(DepthError::Csv { line: 2, .. })
        ));
    }

    #[test]
    fn edges_and_scores() {
        let g = CsrGraph::path(3);
        let mut buf = Vec::new();
        write_edges_csv(&mut buf, &g).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "src,dst\n0,1\n1,2\n");
        let s = degree_scores(&g);
        let mut buf = Vec::new();
        write_scores_csv(&mut buf, &s, None).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "vertex,score\n0,1\n1,2\n2,1\n"
        );
        let mut buf = Vec::new();
        write_scores_csv(&mut buf, &s, Some(2.0)).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("vertex,score_norm\n0,5.0000000000000000e-1\n"));
    }

    #[test]
    fn field_csv_and_metadata() {
        let g = GridSpec::new(&[0.0, 0.0], &[0.5, 0.5], 0.5).unwrap();
        let f =
            ScalarField::new(g, vec![1.0, 2.0, 3.0, 4.0], FieldTag::RCoreness { r: 0.25 }).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x0,x1,value");
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("0.0000000000000000e0,5.0000000000000000e-1,"));
        let meta = field_metadata(&f);
        assert_eq!(meta["tag"], "C_r");
        assert_eq!(meta["r"], 0.25);
        assert_eq!(meta["grid"]["counts"], json!([2, 2]));
    }
}
