//! Experiment configuration: JSON documents and the named built-ins.

use std::path::Path;

use depthcore::density::{density_from_value, PRESET_CRATER, PRESET_MIXTURE6};
use depthcore::{DensityModel, DepthError};
use serde_json::{json, Value};

use crate::error::{HarnessError, Result};

/// Names accepted by `--config` in place of a path.
pub const NAMED_CONFIGS: [&str; 5] = ["default", "fig1d", "fig2d", "fig4", "fig5"];

const MIN_N: usize = 50;

/// How radii are chosen per sample size.
#[derive(Clone, Debug, PartialEq)]
pub enum RRule {
    /// The same list for every `n`.
    Values(Vec<f64>),
    /// `r = c * n^(-1/(d+2))`.
    Scaled(f64),
}

/// Which limit the sample centralities are compared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// `r -> 0`: degree and H-iterates against `f`, coreness against `C0`.
    Vanishing,
    /// Fixed `r`: degree against `f_r`, `H^k` against `H_r^k f_r`, coreness against `C_r`.
    Fixed,
}

/// An H-iterate count; `None` stands for the coreness.
pub type KValue = Option<u32>;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub name: String,
    pub density: DensityModel,
    pub n_values: Vec<usize>,
    pub r_rule: RRule,
    pub k_values: Vec<KValue>,
    /// `None`: 20 repetitions for `n <= 1000`, 10 above.
    pub repetitions: Option<usize>,
    pub seed_base: u64,
    pub target: Target,
    /// Eval-grid spacing as a fraction of `r`; at most 1/5.
    pub eval_fraction: f64,
    /// Radii for the 2-D `C0` reference, decreasing.
    pub c0_radii: Vec<f64>,
    /// Output CSV path, overridden by `--out`.
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn repetitions_for(&self, n: usize) -> usize {
        self.repetitions.unwrap_or(if n <= 1000 { 20 } else { 10 })
    }

    pub fn radii_for(&self, n: usize) -> Vec<f64> {
        match &self.r_rule {
            RRule::Values(v) => v.clone(),
            RRule::Scaled(c) => vec![c * (n as f64).powf(-1.0 / (self.dim() as f64 + 2.0))],
        }
    }

    /// `(n, r, seed)` for every run, sorted.
    pub fn jobs(&self) -> Vec<(usize, f64, u64)> {
        let mut jobs = Vec::new();
        for &n in &self.n_values {
            for r in self.radii_for(n) {
                for rep in 0..self.repetitions_for(n) {
                    jobs.push((n, r, self.seed_base + rep as u64));
                }
            }
        }
        jobs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
        jobs
    }

    /// Upper bound on adjacency entries over all runs, from `sup f`.
    pub fn work_estimate(&self) -> Result<f64> {
        let d = self.dim();
        let omega = depthcore::geometry::unit_ball_volume(d)?;
        let sup = self.density.sup_bound();
        Ok(self
            .jobs()
            .iter()
            .map(|&(n, r, _)| (n as f64).powi(2) * (omega * r.powi(d as i32) * sup).min(1.0))
            .sum())
    }
}

/// Resolves `arg` as a named config or a JSON file.
pub fn load_config(arg: &str) -> Result<ExperimentConfig> {
    if let Some(doc) = named_config(arg) {
        return parse_config_value(&doc, arg);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| {
        HarnessError::Input(format!(
            "--config: cannot read `{arg}` ({e}); named configs are {}",
            NAMED_CONFIGS.join(", ")
        ))
    })?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| {
        HarnessError::Depth(DepthError::Config {
            path: "$".into(),
            message: format!("malformed JSON: {e}"),
        })
    })?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("config");
    parse_config_value(&doc, name)
}

/// Nine log-spaced sample sizes in `[100, 10000]`.
pub fn sweep_sizes() -> Vec<usize> {
    (0..9)
        .map(|i| (100.0 * 10f64.powf(i as f64 / 4.0)).round() as usize)
        .collect()
}

/// Eight geometric radii in `[lo, hi]`.
pub fn sweep_radii(lo: f64, hi: f64) -> Vec<f64> {
    (0..8)
        .map(|i| lo * (hi / lo).powf(i as f64 / 7.0))
        .collect()
}

pub fn named_config(name: &str) -> Option<Value> {
    let sweep_1d = json!({
        "density": PRESET_MIXTURE6,
        "n_values": sweep_sizes(),
        "r_rule": { "values": sweep_radii(0.1, 0.97) },
        "k_values": [0, 1, 5, "inf"],
        "target": "vanishing",
    });
    let doc = match name {
        "default" | "fig1d" => sweep_1d,
        "fig2d" => json!({
            "density": PRESET_CRATER,
            "n_values": sweep_sizes(),
            "r_rule": { "values": sweep_radii(0.27, 1.80) },
            "k_values": [0, 1, 5, "inf"],
            "target": "vanishing",
        }),
        "fig4" => json!({
            "density": PRESET_MIXTURE6,
            "n_values": [10000],
            "r_rule": { "values": [0.13] },
            "k_values": [0, 1, 5, 10, 15, 20, "inf"],
            "repetitions": 10,
            "target": "vanishing",
        }),
        "fig5" => json!({
            "density": PRESET_CRATER,
            "n_values": [20000],
            "r_rule": { "scale": 2.0 },
            "k_values": [0, 1, 5, 10, 15, 20, "inf"],
            "repetitions": 10,
            "target": "vanishing",
        }),
        _ => return None,
    };
    Some(doc)
}

fn cfg_err(path: impl Into<String>, message: impl Into<String>) -> HarnessError {
    HarnessError::Depth(DepthError::Config {
        path: path.into(),
        message: message.into(),
    })
}

pub fn parse_config_value(doc: &Value, name: &str) -> Result<ExperimentConfig> {
    let obj = doc
        .as_object()
        .ok_or_else(|| cfg_err("$", "expected an object"))?;
    for key in obj.keys() {
        const KNOWN: [&str; 10] = [
            "density",
            "n_values",
            "r_rule",
            "k_values",
            "repetitions",
            "seed_base",
            "target",
            "eval_fraction",
            "c0_radii",
            "output",
        ];
        if !KNOWN.contains(&key.as_str()) {
            return Err(cfg_err(key.as_str(), "unknown field"));
        }
    }
    let density = match obj.get("density") {
        Some(Value::String(preset)) => {
            DensityModel::preset(preset).map_err(|e| cfg_err("density", e.to_string()))?
        }
        Some(v @ Value::Object(_)) => density_from_value(v, "density")?,
        _ => return Err(cfg_err("density", "expected a preset name or an object")),
    };
    let n_values: Vec<usize> = obj
        .get("n_values")
        .and_then(Value::as_array)
        .ok_or_else(|| cfg_err("n_values", "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_u64()
                .map(|n| n as usize)
                .filter(|&n| n >= MIN_N)
                .ok_or_else(|| {
                    cfg_err(
                        format!("n_values[{i}]"),
                        format!("expected an integer >= {MIN_N}"),
                    )
                })
        })
        .collect::<Result<_>>()?;
    if n_values.is_empty() {
        return Err(cfg_err("n_values", "must not be empty"));
    }
    let r_rule = parse_r_rule(obj.get("r_rule"))?;
    let k_values = match obj.get("k_values") {
        None => vec![Some(0), None],
        Some(v) => v
            .as_array()
            .ok_or_else(|| cfg_err("k_values", "expected an array"))?
            .iter()
            .enumerate()
            .map(|(i, k)| match k {
                Value::String(s) if s == "inf" => Ok(None),
                _ => k
                    .as_u64()
                    .and_then(|k| u32::try_from(k).ok())
                    .map(Some)
                    .ok_or_else(|| {
                        cfg_err(
                            format!("k_values[{i}]"),
                            "expected a nonnegative integer or \"inf\"",
                        )
                    }),
            })
            .collect::<Result<_>>()?,
    };
    let repetitions = match obj.get("repetitions") {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .filter(|&r| r >= 1)
                .ok_or_else(|| cfg_err("repetitions", "expected an integer >= 1"))?
                as usize,
        ),
    };
    let seed_base = match obj.get("seed_base") {
        None => 0,
        Some(v) => v
            .as_u64()
            .ok_or_else(|| cfg_err("seed_base", "expected a nonnegative integer"))?,
    };
    let target = match obj.get("target").map(|v| v.as_str()) {
        None | Some(Some("vanishing")) => Target::Vanishing,
        Some(Some("fixed")) => Target::Fixed,
        _ => return Err(cfg_err("target", "expected \"vanishing\" or \"fixed\"")),
    };
    let eval_fraction = match obj.get("eval_fraction") {
        None => 0.2,
        Some(v) => v
            .as_f64()
            .filter(|&x| x > 0.0 && x <= 0.2)
            .ok_or_else(|| cfg_err("eval_fraction", "expected a number in (0, 0.2]"))?,
    };
    let c0_radii = match obj.get("c0_radii") {
        None => vec![0.8, 0.2],
        Some(v) => {
            let radii: Vec<f64> = v
                .as_array()
                .ok_or_else(|| cfg_err("c0_radii", "expected an array"))?
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    r.as_f64().filter(|&r| r > 0.0).ok_or_else(|| {
                        cfg_err(format!("c0_radii[{i}]"), "expected a positive number")
                    })
                })
                .collect::<Result<_>>()?;
            if radii.len() < 2 || radii.windows(2).any(|w| w[1] >= w[0]) {
                return Err(cfg_err(
                    "c0_radii",
                    "expected at least two strictly decreasing radii",
                ));
            }
            radii
        }
    };
    let output = match obj.get("output") {
        None => None,
        Some(v) => Some(
            v.as_str()
                .ok_or_else(|| cfg_err("output", "expected a path string"))?
                .to_string(),
        ),
    };
    Ok(ExperimentConfig {
        name: name.to_string(),
        density,
        n_values,
        r_rule,
        k_values,
        repetitions,
        seed_base,
        target,
        eval_fraction,
        c0_radii,
        output,
    })
}

fn parse_r_rule(v: Option<&Value>) -> Result<RRule> {
    let obj = v
        .and_then(Value::as_object)
        .ok_or_else(|| cfg_err("r_rule", "expected {\"values\": [...]} or {\"scale\": c}"))?;
    if let Some(values) = obj.get("values") {
        let radii: Vec<f64> = values
            .as_array()
            .ok_or_else(|| cfg_err("r_rule.values", "expected an array"))?
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.as_f64()
                    .filter(|&r| r > 0.0 && r.is_finite())
                    .ok_or_else(|| {
                        cfg_err(format!("r_rule.values[{i}]"), "expected a positive number")
                    })
            })
            .collect::<Result<_>>()?;
        if radii.is_empty() {
            return Err(cfg_err("r_rule.values", "must not be empty"));
        }
        return Ok(RRule::Values(radii));
    }
    if let Some(c) = obj.get("scale") {
        let c = c
            .as_f64()
            .filter(|&c| c > 0.0)
            .ok_or_else(|| cfg_err("r_rule.scale", "expected a positive number"))?;
        return Ok(RRule::Scaled(c));
    }
    Err(cfg_err("r_rule", "expected `values` or `scale`"))
}
