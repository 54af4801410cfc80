//! Command-line dispatch.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use depthcore::centrality::{coreness_bucket, degree_scores, iterated_h};
use depthcore::continuum::{
    ball_average, c0_variational_1d, continuum_coreness_extrapolate, continuum_r_coreness,
    iterate_h,
};
use depthcore::density::parse_density_config;
use depthcore::geometry::normalization;
use depthcore::io::{
    field_metadata, read_points_csv, write_edges_csv, write_field_csv, write_points_csv,
    write_scores_csv,
};
use depthcore::{DensityModel, GridSpec, ScalarField, VertexScores};

use crate::config::load_config;
use crate::error::{HarnessError, Result};
use crate::experiments::{
    check_budget, continuum_spacing, kmax_records, kmax_table, metadata, run_convergence,
    run_rate_sweep, SampleGraph,
};
use crate::report::Table;
use crate::selftest::run_selftest;

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "DEPTHCORE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "depthcore",
    version,
    about = "Graph-centrality data depth: samples, graphs, scores, continuum fields and experiments"
)]
pub struct Cli {
    /// Worker threads (falls back to DEPTHCORE_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw an i.i.d. sample from a density.
    Sample {
        /// Density preset name or JSON file.
        #[arg(long)]
        config: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Edge list of the r-neighborhood graph of a point CSV.
    Graph {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        radius: f64,
    },
    /// Vertex scores of the r-neighborhood graph.
    Centrality {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        radius: f64,
        /// `degree`, `h<k>` or `coreness`.
        #[arg(long, default_value = "coreness")]
        measure: String,
        /// Divide by `N = n omega r^d`.
        #[arg(long)]
        normalized: bool,
    },
    /// A continuum field on a grid covering the density support.
    Continuum(ContinuumArgs),
    /// Experiment suites.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        /// Named config (default, fig1d, fig2d, fig4, fig5) or JSON file.
        #[arg(long)]
        config: String,
        /// Overrides the config's seed base.
        #[arg(long)]
        seed: Option<u64>,
        /// Run configs beyond the runtime budget.
        #[arg(long)]
        allow_long: bool,
    },
    /// Runs the built-in example checks.
    Selftest,
}

#[derive(Debug, Args)]
struct ContinuumArgs {
    /// Density preset name or JSON file.
    #[arg(long)]
    config: String,
    /// `f`, `f_r`, `h<k>`, `C_r`, `C0` or `C0_error`.
    #[arg(long)]
    field: String,
    #[arg(long)]
    radius: Option<f64>,
    /// Grid spacing; defaults to r/40 in 1-D and r/10 in 2-D.
    #[arg(long)]
    spacing: Option<f64>,
    /// Decreasing radii for `C0` in 2-D, comma separated.
    #[arg(long, value_delimiter = ',')]
    radii: Vec<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExperimentKind {
    Rate,
    Kmax,
    Converge,
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 3;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(t) = flag {
        if t == 0 {
            return Err(HarnessError::Input("--threads must be >= 1".into()));
        }
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(Some(t)),
            _ => Err(HarnessError::Input(format!(
                "{THREADS_ENV} must be a positive integer, got `{s}`"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn load_density(arg: &str) -> Result<DensityModel> {
    if let Ok(model) = DensityModel::preset(arg) {
        return Ok(model);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| {
        HarnessError::Input(format!(
            "--config: cannot read `{arg}` ({e}) and it is not a preset"
        ))
    })?;
    Ok(parse_density_config(&text)?)
}

fn load_points(path: &Path) -> Result<depthcore::PointCloud> {
    let file = File::open(path).map_err(|e| {
        HarnessError::Input(format!("--points: cannot read {} ({e})", path.display()))
    })?;
    Ok(read_points_csv(BufReader::new(file))?)
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let Format::Csv = cli.format;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Sample { config, n, seed } => {
            let model = load_density(config)?;
            write_points_csv(output(out)?, &model.sample(*n, *seed))?;
        }
        Command::Graph { points, radius } => {
            let cloud = Arc::new(load_points(points)?);
            let graph = SampleGraph::build(&cloud, *radius)?;
            write_edges_csv(output(out)?, &graph)?;
        }
        Command::Centrality {
            points,
            radius,
            measure,
            normalized,
        } => {
            let cloud = Arc::new(load_points(points)?);
            let graph = SampleGraph::build(&cloud, *radius)?;
            let scores: VertexScores = match measure.as_str() {
                "degree" => degree_scores(&graph),
                "coreness" => coreness_bucket(&graph),
                m => match m.strip_prefix('h').and_then(|k| k.parse::<u32>().ok()) {
                    Some(k) => iterated_h(&graph, k),
                    None => {
                        return Err(HarnessError::Input(format!(
                            "--measure: expected degree, h<k> or coreness, got `{m}`"
                        )))
                    }
                },
            };
            let norm = if *normalized {
                Some(normalization(cloud.len(), *radius, cloud.dim())?)
            } else {
                None
            };
            write_scores_csv(output(out)?, &scores, norm)?;
        }
        Command::Continuum(args) => {
            let field = continuum_field(args)?;
            write_field_csv(output(out)?, &field)?;
            if let Some(p) = out {
                write_sidecar(p, &field_metadata(&field))?;
            }
        }
        Command::Experiment {
            kind,
            config,
            seed,
            allow_long,
        } => {
            let mut cfg = load_config(config)?;
            if let Some(s) = seed {
                cfg.seed_base = *s;
            }
            check_budget(&cfg, *allow_long)?;
            let target = out
                .map(Path::to_path_buf)
                .or_else(|| cfg.output.as_ref().map(PathBuf::from));
            let started = Instant::now();
            let (name, table, failures) = match kind {
                ExperimentKind::Rate => ("rate", run_rate_sweep(&cfg)?, Vec::new()),
                ExperimentKind::Converge => ("converge", run_convergence(&cfg)?, Vec::new()),
                ExperimentKind::Kmax => {
                    let (table, failures) = kmax_table(&kmax_records(&cfg)?);
                    ("kmax", table, failures)
                }
            };
            write_table(&table, target.as_deref())?;
            if let Some(p) = &target {
                write_sidecar(p, &metadata(&cfg, name))?;
            }
            eprintln!(
                "{name}: {} runs in {:.1?}",
                cfg.jobs().len(),
                started.elapsed()
            );
            if !failures.is_empty() {
                return Err(HarnessError::ProvenBound(failures.join("; ")));
            }
        }
        Command::Selftest => {
            let mut w = output(out)?;
            let ok = run_selftest(&mut w)?;
            w.flush()?;
            return Ok(if ok { 0 } else { 2 });
        }
    }
    Ok(0)
}

fn write_table(table: &Table, out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    table.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Writes `<out>.json` next to a CSV.
fn write_sidecar(out: &Path, meta: &serde_json::Value) -> Result<()> {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    let text = serde_json::to_string_pretty(meta).expect("metadata serializes");
    std::fs::write(PathBuf::from(name), text + "\n")?;
    Ok(())
}

fn continuum_field(args: &ContinuumArgs) -> Result<ScalarField> {
    let model = load_density(&args.config)?;
    let d = model.dim();
    let need_r = || {
        args.radius.ok_or_else(|| {
            HarnessError::Input(format!("--radius is required for field `{}`", args.field))
        })
    };
    let spacing = |r: Option<f64>| -> Result<f64> {
        match (args.spacing, r) {
            (Some(h), _) => Ok(h),
            (None, Some(r)) => Ok(continuum_spacing(d, r)),
            (None, None) => Err(HarnessError::Input(
                "--spacing is required without --radius".into(),
            )),
        }
    };
    let density_on = |margin: f64, h: f64| -> Result<ScalarField> {
        let grid = GridSpec::covering(&model.support_box().expanded(margin), h)?;
        Ok(ScalarField::discretize_density(&model, &grid)?)
    };
    let field = match args.field.as_str() {
        "f" => density_on(0.0, spacing(args.radius)?)?,
        "f_r" => {
            let r = need_r()?;
            ball_average(&density_on(r, spacing(Some(r))?)?, r)?
        }
        "C_r" => {
            let r = need_r()?;
            let cr = continuum_r_coreness(&density_on(r, spacing(Some(r))?)?, r)?;
            if !cr.converged {
                log::warn!(
                    "r-coreness stopped after {} sweeps without converging",
                    cr.iterations
                );
            }
            cr.field
        }
        "C0" | "C0_error" if d == 1 && args.field == "C0" => {
            let h = args.spacing.unwrap_or(0.001);
            c0_variational_1d(&density_on(0.0, h)?)?
        }
        "C0" | "C0_error" => {
            let radii = if args.radii.is_empty() {
                vec![0.8, 0.2]
            } else {
                args.radii.clone()
            };
            let r_max = radii[0];
            let r_min = *radii.last().unwrap();
            let h = args.spacing.unwrap_or(r_min / 10.0);
            let grid = GridSpec::covering(&model.support_box().expanded(r_max), h)?;
            let ex = continuum_coreness_extrapolate(&model, &grid, &radii)?;
            if args.field == "C0" {
                ex.estimate
            } else {
                ex.error
            }
        }
        other => match other.strip_prefix('h').and_then(|k| k.parse::<u32>().ok()) {
            Some(k) => {
                let r = need_r()?;
                iterate_h(&density_on(r, spacing(Some(r))?)?, r, k)?
            }
            None => {
                return Err(HarnessError::Input(format!(
                    "--field: expected f, f_r, h<k>, C_r, C0 or C0_error, got `{other}`"
                )))
            }
        },
    };
    Ok(field)
}
