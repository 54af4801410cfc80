//! Generating densities: isotropic Gaussian mixtures, optionally with
//! rotationally symmetric ring components in the plane.

use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::error::{DepthError, Result};
use crate::geometry::{PointCloud, Provenance};

pub const PRESET_MIXTURE6: &str = "fig1d-mixture6";
pub const PRESET_CRATER: &str = "fig2d-crater";

const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Half-width of the support box in units of a component's scale.
const SUPPORT_SIGMAS: f64 = 6.0;

#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    Gaussian {
        weight: f64,
        mean: Vec<f64>,
        sigma: f64,
    },
    /// Planar ring centred at the origin, `exp(-(|x| - rho0)^2 / 2 sigma^2)` up to normalization.
    Ring { weight: f64, rho0: f64, sigma: f64 },
}

impl Component {
    pub fn weight(&self) -> f64 {
        match *self {
            Component::Gaussian { weight, .. } | Component::Ring { weight, .. } => weight,
        }
    }
}

/// Axis-aligned box, one `(lo, hi)` pair per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxBounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxBounds {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn expanded(&self, margin: f64) -> BoxBounds {
        BoxBounds {
            lo: self.lo.iter().map(|v| v - margin).collect(),
            hi: self.hi.iter().map(|v| v + margin).collect(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }
}

/// A validated density with its derived constants.
#[derive(Clone, Debug)]
pub struct DensityModel {
    dim: usize,
    components: Vec<Component>,
    /// Per component: the value at its mode (Gaussian) or on its crest (ring).
    peaks: Vec<f64>,
    support_box: BoxBounds,
    lipschitz_bound: f64,
    max_value: f64,
    name: Option<String>,
}

impl PartialEq for DensityModel {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.components == other.components
    }
}

impl DensityModel {
    pub fn new(dim: usize, components: Vec<Component>) -> Result<Self> {
        if dim == 0 {
            return Err(DepthError::config("dim", "must be a positive integer"));
        }
        if components.is_empty() {
            return Err(DepthError::config(
                "components",
                "at least one component is required",
            ));
        }
        for (i, c) in components.iter().enumerate() {
            let at = |field: &str| format!("components[{i}].{field}");
            match c {
                Component::Gaussian {
                    weight,
                    mean,
                    sigma,
                } => {
                    check_positive(*weight, &at("weight"))?;
                    check_positive(*sigma, &at("sigma"))?;
                    if mean.len() != dim {
                        return Err(DepthError::config(
                            at("mean"),
                            format!("expected {dim} coordinates, got {}", mean.len()),
                        ));
                    }
                    if mean.iter().any(|m| !m.is_finite()) {
                        return Err(DepthError::config(at("mean"), "coordinates must be finite"));
                    }
                }
                Component::Ring {
                    weight,
                    rho0,
                    sigma,
                } => {
                    if dim != 2 {
                        return Err(DepthError::config(
                            format!("components[{i}].type"),
                            "ring components require dim = 2",
                        ));
                    }
                    check_positive(*weight, &at("weight"))?;
                    check_positive(*rho0, &at("rho0"))?;
                    check_positive(*sigma, &at("sigma"))?;
                }
            }
        }
        let total: f64 = components.iter().map(Component::weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(DepthError::config(
                "components",
                format!("weights must sum to 1 (got {total})"),
            ));
        }

        let mut peaks = Vec::with_capacity(components.len());
        let mut lipschitz = 0.0;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for c in &components {
            match c {
                Component::Gaussian {
                    weight,
                    mean,
                    sigma,
                } => {
                    let peak = weight * (2.0 * PI * sigma * sigma).powf(-(dim as f64) / 2.0);
                    peaks.push(peak);
                    // |grad| = peak * (u / sigma^2) exp(-u^2 / 2 sigma^2), maximal at u = sigma.
                    lipschitz += peak * (-0.5f64).exp() / sigma;
                    for a in 0..dim {
                        lo[a] = lo[a].min(mean[a] - SUPPORT_SIGMAS * sigma);
                        hi[a] = hi[a].max(mean[a] + SUPPORT_SIGMAS * sigma);
                    }
                }
                Component::Ring {
                    weight,
                    rho0,
                    sigma,
                } => {
                    let z = ring_normalizer(*rho0, *sigma);
                    let peak = weight / z;
                    peaks.push(peak);
                    lipschitz += peak * (-0.5f64).exp() / sigma;
                    let reach = rho0 + SUPPORT_SIGMAS * sigma;
                    for a in 0..dim {
                        lo[a] = lo[a].min(-reach);
                        hi[a] = hi[a].max(reach);
                    }
                }
            }
        }

        let mut model = DensityModel {
            dim,
            components,
            peaks,
            support_box: BoxBounds { lo, hi },
            lipschitz_bound: lipschitz,
            max_value: 0.0,
            name: None,
        };
        model.max_value = model.scan_max();
        Ok(model)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let mut model = match name {
            PRESET_MIXTURE6 => {
                let weights = [0.25, 0.2, 0.2, 0.15, 0.1, 0.1];
                let means = [-6.0, -3.4, -1.0, 1.2, 3.2, 5.4];
                let sigmas = [0.6, 0.5, 0.45, 0.5, 0.55, 0.5];
                let components = (0..6)
                    .map(|i| Component::Gaussian {
                        weight: weights[i],
                        mean: vec![means[i]],
                        sigma: sigmas[i],
                    })
                    .collect();
                DensityModel::new(1, components)?
            }
            PRESET_CRATER => DensityModel::new(
                2,
                vec![
                    Component::Gaussian {
                        weight: 0.35,
                        mean: vec![0.0, 0.0],
                        sigma: 0.4,
                    },
                    Component::Ring {
                        weight: 0.65,
                        rho0: 1.5,
                        sigma: 0.25,
                    },
                ],
            )?,
            other => {
                return Err(DepthError::config(
                    "preset",
                    format!(
                    "unknown preset `{other}` (expected `{PRESET_MIXTURE6}` or `{PRESET_CRATER}`)"
                ),
                ))
            }
        };
        model.name = Some(name.to_string());
        Ok(model)
    }

    /// Single isotropic Gaussian.
    pub fn gaussian(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        let dim = mean.len();
        DensityModel::new(
            dim,
            vec![Component::Gaussian {
                weight: 1.0,
                mean,
                sigma,
            }],
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn support_box(&self) -> &BoxBounds {
        &self.support_box
    }

    /// Upper bound on the Lipschitz constant: the sum of the per-component gradient maxima.
    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    /// Rigorous upper bound on `sup f` (sum of component peaks).
    pub fn sup_bound(&self) -> f64 {
        self.peaks.iter().sum()
    }

    /// `max f` located by a dense scan of the support box.
    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    /// Identifier used in provenance records: the preset name, or `"custom"`.
    pub fn id(&self) -> &str {
        self.name.as_deref().unwrap_or("custom")
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(DepthError::input(format!(
                "point has dimension {}, density has dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(self.value_at(x))
    }

    /// Unchecked evaluation; `x.len()` must equal [`Self::dim`].
    pub fn value_at(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut total = 0.0;
        for (c, &peak) in self.components.iter().zip(&self.peaks) {
            match c {
                Component::Gaussian { mean, sigma, .. } => {
                    let d2: f64 = x.iter().zip(mean).map(|(a, m)| (a - m) * (a - m)).sum();
                    total += peak * (-d2 / (2.0 * sigma * sigma)).exp();
                }
                Component::Ring { rho0, sigma, .. } => {
                    let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
                    let u = rho - rho0;
                    total += peak * (-u * u / (2.0 * sigma * sigma)).exp();
                }
            }
        }
        total
    }

    /// Upper bound on the modulus of continuity `omega_f(u)`.
    pub fn modulus_bound(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(DepthError::input(format!(
                "modulus argument must be >= 0, got {u}"
            )));
        }
        Ok((self.lipschitz_bound * u).min(self.sup_bound()))
    }

    /// Draws `n` i.i.d. points.
    ///
    /// The stream is `ChaCha8Rng::seed_from_u64(seed)`. Points are drawn one at a
    /// time: a component index from the weights, then the coordinates (one
    /// standard normal per axis for a Gaussian; for a ring, rejection draws for
    /// the radius followed by one uniform angle).
    pub fn sample(&self, n: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = self.components.iter().map(Component::weight).collect();
        let chooser = WeightedIndex::new(&weights).expect("weights validated at construction");
        let mut coords = Vec::with_capacity(n * self.dim);
        for _ in 0..n {
            match &self.components[chooser.sample(&mut rng)] {
                Component::Gaussian { mean, sigma, .. } => {
                    for m in mean {
                        let z: f64 = rng.sample(StandardNormal);
                        coords.push(m + sigma * z);
                    }
                }
                Component::Ring { rho0, sigma, .. } => {
                    let rho = sample_ring_radius(&mut rng, *rho0, *sigma);
                    let theta = 2.0 * PI * rng.random::<f64>();
                    coords.push(rho * theta.cos());
                    coords.push(rho * theta.sin());
                }
            }
        }
        PointCloud::new(self.dim, coords)
            .expect("sampled coordinates are finite")
            .with_provenance(Provenance {
                model: self.id().to_string(),
                seed,
            })
    }

    /// Translates every Gaussian mean by `v`. Ring components are pinned to the
    /// origin, so models containing one are rejected.
    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(DepthError::input(
                "translation vector has the wrong dimension",
            ));
        }
        let components = self
            .components
            .iter()
            .map(|c| match c {
                Component::Gaussian {
                    weight,
                    mean,
                    sigma,
                } => Ok(Component::Gaussian {
                    weight: *weight,
                    mean: mean.iter().zip(v).map(|(m, t)| m + t).collect(),
                    sigma: *sigma,
                }),
                Component::Ring { .. } => {
                    Err(DepthError::input("ring components cannot be translated"))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = DensityModel::new(self.dim, components)?;
        out.name = self.name.clone();
        Ok(out)
    }

    fn scan_max(&self) -> f64 {
        // Candidate maxima: every component centre plus a dense grid.
        let mut best = 0.0f64;
        for c in &self.components {
            match c {
                Component::Gaussian { mean, .. } => best = best.max(self.value_at(mean)),
                Component::Ring { rho0, .. } => {
                    let mut x = vec![0.0; self.dim];
                    x[0] = *rho0;
                    best = best.max(self.value_at(&x));
                }
            }
        }
        let per_axis = match self.dim {
            1 => 200_001,
            2 => 601,
            3 => 81,
            _ => 11,
        };
        let b = &self.support_box;
        let mut idx = vec![0usize; self.dim];
        let mut x = vec![0.0; self.dim];
        loop {
            for a in 0..self.dim {
                x[a] = b.lo[a] + (b.hi[a] - b.lo[a]) * idx[a] as f64 / (per_axis - 1) as f64;
            }
            best = best.max(self.value_at(&x));
            let mut a = 0;
            loop {
                if a == self.dim {
                    return best;
                }
                idx[a] += 1;
                if idx[a] < per_axis {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }

    /// Serializes to the config schema (never as a preset reference).
    pub fn to_config(&self) -> Value {
        let components: Vec<Value> = self
            .components
            .iter()
            .map(|c| match c {
                Component::Gaussian {
                    weight,
                    mean,
                    sigma,
                } => {
                    json!({"type": "gaussian", "weight": weight, "mean": mean, "sigma": sigma})
                }
                Component::Ring {
                    weight,
                    rho0,
                    sigma,
                } => {
                    json!({"type": "ring", "weight": weight, "rho0": rho0, "sigma": sigma})
                }
            })
            .collect();
        json!({"dim": self.dim, "components": components})
    }
}

fn check_positive(v: f64, path: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(DepthError::config(
            path,
            format!("must be finite and > 0 (got {v})"),
        ))
    }
}

/// `Z = 2 pi int_0^inf rho exp(-(rho - rho0)^2 / 2 sigma^2) d rho`, composite Simpson.
fn ring_normalizer(rho0: f64, sigma: f64) -> f64 {
    let a = (rho0 - 14.0 * sigma).max(0.0);
    let b = rho0 + 14.0 * sigma;
    let intervals = 40_000usize;
    let h = (b - a) / intervals as f64;
    let g = |rho: f64| {
        let u = rho - rho0;
        rho * (-u * u / (2.0 * sigma * sigma)).exp()
    };
    let mut s = g(a) + g(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(a + i as f64 * h);
    }
    2.0 * PI * s * h / 3.0
}

/// Exact draw from the radial law `rho exp(-(rho - rho0)^2 / 2 sigma^2)` on `rho >= 0`.
///
/// Envelope `(rho0 + |rho - rho0|) exp(...)` on the whole line: a mixture of a
/// normal centred at `rho0` and a two-sided Rayleigh offset.
fn sample_ring_radius<R: Rng>(rng: &mut R, rho0: f64, sigma: f64) -> f64 {
    let normal_mass = rho0 * sigma * (2.0 * PI).sqrt();
    let rayleigh_mass = 2.0 * sigma * sigma;
    let p_normal = normal_mass / (normal_mass + rayleigh_mass);
    loop {
        let rho = if rng.random::<f64>() < p_normal {
            let z: f64 = rng.sample(StandardNormal);
            rho0 + sigma * z
        } else {
            let u: f64 = 1.0 - rng.random::<f64>();
            let offset = sigma * (-2.0 * u.ln()).sqrt();
            if rng.random::<bool>() {
                rho0 + offset
            } else {
                rho0 - offset
            }
        };
        if rho <= 0.0 {
            continue;
        }
        let accept = rho / (rho0 + (rho - rho0).abs());
        if rng.random::<f64>() < accept {
            return rho;
        }
    }
}

/// Parses a density config document (JSON text).
pub fn parse_density_config(text: &str) -> Result<DensityModel> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| DepthError::config("$", format!("malformed JSON: {e}")))?;
    density_from_value(&doc, "")
}

/// Validates an already-parsed config value; `path` prefixes reported field paths
/// (empty at the document root).
pub fn density_from_value(doc: &Value, path: &str) -> Result<DensityModel> {
    let join = |field: &str| {
        if path.is_empty() {
            field.to_string()
        } else {
            format!("{path}.{field}")
        }
    };
    let obj = doc.as_object().ok_or_else(|| {
        DepthError::config(
            if path.is_empty() { "$" } else { path },
            "expected an object",
        )
    })?;
    if let Some(p) = obj.get("preset") {
        let name = p
            .as_str()
            .ok_or_else(|| DepthError::config(join("preset"), "expected a string"))?;
        return DensityModel::preset(name).map_err(|e| prefix(e, path));
    }
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| DepthError::config(join("dim"), "expected a positive integer"))?
        as usize;
    let comps = obj
        .get("components")
        .and_then(Value::as_array)
        .ok_or_else(|| DepthError::config(join("components"), "expected an array"))?;
    let mut components = Vec::with_capacity(comps.len());
    for (i, c) in comps.iter().enumerate() {
        let at = join(&format!("components[{i}]"));
        let kind = c.get("type").and_then(Value::as_str).ok_or_else(|| {
            DepthError::config(format!("{at}.type"), "expected \"gaussian\" or \"ring\"")
        })?;
        let num = |field: &str| -> Result<f64> {
            c.get(field)
                .and_then(Value::as_f64)
                .ok_or_else(|| DepthError::config(format!("{at}.{field}"), "expected a number"))
        };
        let component = match kind {
            "gaussian" => {
                let mean = c
                    .get("mean")
                    .and_then(Value::as_array)
                    .ok_or_else(|| DepthError::config(format!("{at}.mean"), "expected an array"))?
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v.as_f64().ok_or_else(|| {
                            DepthError::config(format!("{at}.mean[{j}]"), "expected a number")
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Component::Gaussian {
                    weight: num("weight")?,
                    mean,
                    sigma: num("sigma")?,
                }
            }
            "ring" => Component::Ring {
                weight: num("weight")?,
                rho0: num("rho0")?,
                sigma: num("sigma")?,
            },
            other => {
                return Err(DepthError::config(
                    format!("{at}.type"),
                    format!("unknown component type `{other}`"),
                ))
            }
        };
        components.push(component);
    }
    DensityModel::new(dim, components).map_err(|e| prefix(e, path))
}

fn prefix(e: DepthError, path: &str) -> DepthError {
    match e {
        DepthError::Config { path: p, message } if !path.is_empty() => DepthError::Config {
            path: format!("{path}.{p}"),
            message,
        },
        other => other,
    }
}
