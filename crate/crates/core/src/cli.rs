//! The `pmg` command line: argument parsing, config files, and the
//! subcommands `id`, `curvature`, `holes`, `report` and `sample`.
//!
//! Exit status: 0 success, 1 input or validation error, 2 parameter error,
//! 3 internal error. Failures are reported on stderr as one JSON line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{self, ManifoldKind, ProfileConfig, SampleParams};
use crate::curvature::{self, TangentDim};
use crate::error::{Error, Result};
use crate::intrinsic_dim::{self, Method, DEFAULT_K};
use crate::pointcloud::{knn, load_point_cloud, Format, PointCloud};
use crate::topology::{self, HolesConfig, PersistencePair, Threshold, DEFAULT_MAX_POINTS};

pub const DEFAULT_SEED: u64 = 42;
pub const THREADS_ENV: &str = "PMG_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Which span divides total persistence in `persistence_density`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DensitySpan {
    /// `max death - min birth` over the significant holes.
    #[default]
    Features,
    /// The whole filtration range `[0, epsilon_max]`.
    Filtration,
}

/// Fully merged run configuration (flags over config file over defaults).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k: Option<usize>,
    pub m: TangentDim,
    pub tau: Threshold,
    pub epsilon_max: Threshold,
    pub max_points: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub method: Method,
    pub include_local: bool,
    pub include_pairs: bool,
    pub signed_curvature: bool,
    pub density_span: DensitySpan,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: None,
            m: TangentDim::Auto,
            tau: Threshold::Auto,
            epsilon_max: Threshold::Auto,
            max_points: DEFAULT_MAX_POINTS,
            seed: DEFAULT_SEED,
            output: None,
            format: OutputFormat::Json,
            method: Method::Tle,
            include_local: false,
            include_pairs: false,
            signed_curvature: false,
            density_span: DensitySpan::Features,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == Some(0) {
            return Err(Error::Parameter("--k must be >= 1".into()));
        }
        if self.m == TangentDim::Fixed(0) {
            return Err(Error::Parameter("--m must be >= 1 or auto".into()));
        }
        if let Threshold::Value(t) = self.tau {
            if !(t >= 0.0) {
                return Err(Error::Parameter(format!("--tau must be non-negative (got {t})")));
            }
        }
        if let Threshold::Value(e) = self.epsilon_max {
            if !(e >= 0.0) {
                return Err(Error::Parameter(format!(
                    "--epsilon-max must be non-negative (got {e})"
                )));
            }
        }
        if self.max_points == 0 {
            return Err(Error::Parameter("--max-points must be >= 1".into()));
        }
        Ok(())
    }

    pub fn profile_config(&self) -> ProfileConfig {
        ProfileConfig {
            k: self.k,
            m: self.m,
            tau: self.tau,
            epsilon_max: self.epsilon_max,
            max_points: self.max_points,
            seed: self.seed,
            id_method: self.method,
        }
    }

    fn holes_config(&self) -> HolesConfig {
        HolesConfig {
            tau: self.tau,
            epsilon_max: self.epsilon_max,
            max_points: self.max_points,
            seed: self.seed,
        }
    }

    /// The configuration as echoed into reports.
    pub fn echo(&self) -> serde_json::Value {
        json!({
            "k": self.k,
            "m": self.m.to_string(),
            "tau": self.tau.to_string(),
            "epsilon_max": self.epsilon_max.to_string(),
            "max_points": self.max_points,
            "seed": self.seed,
            "method": self.method,
            "signed_curvature": self.signed_curvature,
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "pmg", version, about = "Geometric complexity of point-cloud manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Intrinsic dimension (MLE or TLE) of one point cloud.
    Id(IdArgs),
    /// Gaussian-curvature profile of one point cloud.
    Curvature(CurvatureArgs),
    /// Persistent-homology hole metrics of one point cloud.
    Holes(HolesArgs),
    /// Per-class complexity vs. accuracy bias report.
    Report(ReportArgs),
    /// Write a seeded sample from a synthetic manifold.
    Sample(SampleArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Key=value config file mirroring the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file [default: stdout].
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format [default: json].
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Seed for all randomness [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct IdArgs {
    /// Point cloud file (CSV or PMG1 binary).
    #[arg(long)]
    pub input: PathBuf,
    /// Neighbor count, clamped to n - 1 [default: 20].
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Estimator [default: tle].
    #[arg(long)]
    pub method: Option<String>,
    /// Include per-point estimates.
    #[arg(long)]
    pub local: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Neighbor count [default: max(20, m^2 + 5)].
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Tangent dimension, integer or "auto" = round(global TLE dimension) [default: auto].
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Include per-point curvatures.
    #[arg(long)]
    pub local: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct HolesArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Persistence threshold, real or "auto" = 0.1 * diameter [default: auto].
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// Filtration cap, real or "auto" = diameter [default: auto].
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon_max: Option<String>,
    /// Subsample clouds larger than this [default: 1000].
    #[arg(long, allow_hyphen_values = true)]
    pub max_points: Option<i64>,
    /// Include the H1 pairs in the output.
    #[arg(long)]
    pub pairs: bool,
    /// Also write the H0/H1 diagram as `dim,birth,death` CSV.
    #[arg(long)]
    pub diagram: Option<PathBuf>,
    /// Denominator of persistence_density [default: features].
    #[arg(long, value_enum)]
    pub density_span: Option<DensitySpan>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory with one embeddings file per class (stem = label).
    #[arg(long)]
    pub embeddings: PathBuf,
    /// CSV `label,accuracy` table.
    #[arg(long)]
    pub accuracy: PathBuf,
    /// Neighbor count [default: 20 for dimension, max(20, m^2 + 5) for curvature].
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Tangent dimension or "auto" [default: auto].
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Persistence threshold or "auto" [default: auto].
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// Filtration cap or "auto" [default: auto].
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon_max: Option<String>,
    /// Subsample cap for holes [default: 1000].
    #[arg(long, allow_hyphen_values = true)]
    pub max_points: Option<i64>,
    /// Intrinsic-dimension estimator [default: tle].
    #[arg(long)]
    pub method: Option<String>,
    /// Correlate signed mean curvature instead of mean absolute curvature.
    #[arg(long)]
    pub signed_curvature: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// circle, sphere, torus, hypercube, gaussian_blob or line.
    #[arg(long)]
    pub kind: String,
    /// Number of points.
    #[arg(long, short = 'n')]
    pub n: usize,
    /// Size parameter (radius, side, std or length) [default: 1].
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub radius: f64,
    /// Torus tube radius [default: 0.3].
    #[arg(long, default_value_t = 0.3)]
    pub minor_radius: f64,
    /// Intrinsic dimension for sphere, hypercube and blob [default: 2].
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Ambient dimension (random orthonormal embedding).
    #[arg(long)]
    pub ambient: Option<usize>,
    /// Isotropic Gaussian noise std [default: 0].
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub noise: f64,
    /// Write the PMG1 binary format instead of CSV.
    #[arg(long)]
    pub binary: bool,
    /// Seed [default: 42].
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file [default: stdout, CSV only].
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses a `key=value` config file. Keys use flag names with `-` or `_`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
            line: idx + 1,
            message: format!("expected key=value, got {line:?}"),
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

const CONFIG_KEYS: &[&str] = &[
    "k",
    "m",
    "tau",
    "epsilon-max",
    "max-points",
    "seed",
    "output",
    "format",
    "method",
    "local",
    "pairs",
    "signed-curvature",
    "density-span",
];

struct Layered {
    file: BTreeMap<String, String>,
}

impl Layered {
    fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            Some(p) => parse_config_file(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?)?,
            None => BTreeMap::new(),
        };
        if let Some(bad) = file.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
            return Err(Error::Parameter(format!("unknown config key {bad:?}")));
        }
        Ok(Self { file })
    }

    fn text(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.file.get(key).cloned())
    }

    fn count(&self, flag: Option<i64>, key: &str) -> Result<Option<usize>> {
        let raw = match flag {
            Some(v) => Some(v.to_string()),
            None => self.file.get(key).cloned(),
        };
        raw.map(|s| {
            s.parse::<i64>()
                .ok()
                .filter(|v| *v >= 1)
                .map(|v| v as usize)
                .ok_or_else(|| Error::Parameter(format!("--{key} must be a positive integer (got {s})")))
        })
        .transpose()
    }

    fn flag(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.file.get(key).map(|s| s.to_ascii_lowercase()) {
            None => Ok(false),
            Some(s) if s == "true" || s == "1" || s == "yes" => Ok(true),
            Some(s) if s == "false" || s == "0" || s == "no" => Ok(false),
            Some(s) => Err(Error::Parameter(format!("--{key} expects a boolean (got {s})"))),
        }
    }

    fn enum_value<T: ValueEnum>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|s| T::from_str(s, true).map_err(|e| Error::Parameter(format!("--{key}: {e}"))))
            .transpose()
    }

    fn common(&self, args: &CommonArgs, cfg: &mut RunConfig) -> Result<()> {
        cfg.output = args
            .output
            .clone()
            .or_else(|| self.file.get("output").map(PathBuf::from));
        cfg.format = self.enum_value(args.format, "format")?.unwrap_or_default();
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        } else if let Some(s) = self.file.get("seed") {
            cfg.seed = s
                .parse()
                .map_err(|_| Error::Parameter(format!("--seed must be a non-negative integer (got {s})")))?;
        }
        Ok(())
    }

    fn topology(
        &self,
        tau: Option<String>,
        eps: Option<String>,
        max_points: Option<i64>,
        cfg: &mut RunConfig,
    ) -> Result<()> {
        if let Some(t) = self.text(tau, "tau") {
            cfg.tau = t.parse()?;
        }
        if let Some(e) = self.text(eps, "epsilon-max") {
            cfg.epsilon_max = e.parse()?;
        }
        if let Some(mp) = self.count(max_points, "max-points")? {
            cfg.max_points = mp;
        }
        Ok(())
    }
}

impl Command {
    /// Merges flags, the optional config file and defaults.
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        match self {
            Command::Id(a) => {
                let l = Layered::load(a.common.config.as_deref())?;
                l.common(&a.common, &mut cfg)?;
                cfg.k = l.count(a.k, "k")?;
                if let Some(m) = l.text(a.method.clone(), "method") {
                    cfg.method = m.parse()?;
                }
                cfg.include_local = l.flag(a.local, "local")?;
            }
            Command::Curvature(a) => {
                let l = Layered::load(a.common.config.as_deref())?;
                l.common(&a.common, &mut cfg)?;
                cfg.k = l.count(a.k, "k")?;
                if let Some(m) = l.text(a.m.clone(), "m") {
                    cfg.m = m.parse()?;
                }
                cfg.include_local = l.flag(a.local, "local")?;
            }
            Command::Holes(a) => {
                let l = Layered::load(a.common.config.as_deref())?;
                l.common(&a.common, &mut cfg)?;
                l.topology(a.tau.clone(), a.epsilon_max.clone(), a.max_points, &mut cfg)?;
                cfg.include_pairs = l.flag(a.pairs, "pairs")?;
                cfg.density_span = l.enum_value(a.density_span, "density-span")?.unwrap_or_default();
            }
            Command::Report(a) => {
                let l = Layered::load(a.common.config.as_deref())?;
                l.common(&a.common, &mut cfg)?;
                cfg.k = l.count(a.k, "k")?;
                if let Some(m) = l.text(a.m.clone(), "m") {
                    cfg.m = m.parse()?;
                }
                l.topology(a.tau.clone(), a.epsilon_max.clone(), a.max_points, &mut cfg)?;
                if let Some(m) = l.text(a.method.clone(), "method") {
                    cfg.method = m.parse()?;
                }
                cfg.signed_curvature = l.flag(a.signed_curvature, "signed-curvature")?;
            }
            Command::Sample(a) => {
                cfg.seed = a.seed;
                cfg.output = a.output.clone();
                cfg.format = OutputFormat::Csv;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdOutput {
    pub method: Method,
    pub k: usize,
    pub global_id: f64,
    pub skipped: usize,
    pub n_points: usize,
    pub p: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local: Option<Vec<f64>>,
    pub warnings: Vec<String>,
}

pub fn run_id(cloud: &PointCloud, cfg: &RunConfig, include_local: bool) -> Result<IdOutput> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    let k = analysis::clamp_k(
        cfg.k.unwrap_or(DEFAULT_K),
        cloud.len(),
        "intrinsic dimension",
        &mut warnings,
    )?;
    let graph = knn(cloud, k)?;
    let local = intrinsic_dim::local_id(cloud, &graph, cfg.method)?;
    if local.skipped > 0 {
        warnings.push(format!(
            "estimate undefined at {} points (imputed with the mean)",
            local.skipped
        ));
    }
    Ok(IdOutput {
        method: cfg.method,
        k,
        global_id: intrinsic_dim::global_id(&local),
        skipped: local.skipped,
        n_points: cloud.len(),
        p: cloud.dim(),
        local: include_local.then(|| local.values.clone()),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureOutput {
    pub m: usize,
    pub k: usize,
    pub mean_curvature: f64,
    pub mean_abs_curvature: f64,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_id: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local: Option<Vec<Option<f64>>>,
    pub warnings: Vec<String>,
}

pub fn run_curvature(cloud: &PointCloud, cfg: &RunConfig, include_local: bool) -> Result<CurvatureOutput> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    let (m, global_id) = match cfg.m {
        TangentDim::Fixed(m) => (m, None),
        TangentDim::Auto => {
            let k = analysis::clamp_k(DEFAULT_K, cloud.len(), "intrinsic dimension", &mut warnings)?;
            let graph = knn(cloud, k)?;
            let id = intrinsic_dim::global_id(&intrinsic_dim::local_id_tle(cloud, &graph)?);
            (curvature::resolve_tangent_dim(id, cloud.dim())?, Some(id))
        }
    };
    let k = analysis::clamp_k(
        cfg.k.unwrap_or_else(|| curvature::default_k(m)),
        cloud.len(),
        "curvature",
        &mut warnings,
    )?;
    let graph = knn(cloud, k)?;
    let est = curvature::curvature_profile(cloud, &graph, m)?;
    warnings.extend(est.warnings.iter().cloned());
    Ok(CurvatureOutput {
        m,
        k,
        mean_curvature: est.mean_curvature,
        mean_abs_curvature: est.mean_abs_curvature,
        skipped: est.skipped,
        global_id,
        local: include_local.then(|| est.values.clone()),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolesOutput {
    pub tau: f64,
    pub n_holes: usize,
    pub total_persistence: f64,
    pub avg_persistence: f64,
    pub persistence_density: f64,
    pub density_span: DensitySpan,
    pub essential_h1: usize,
    pub epsilon_max: f64,
    pub diameter: f64,
    pub n_points: usize,
    pub n_used: usize,
    pub max_points: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<PersistencePair>>,
    #[serde(skip)]
    pub diagrams: Option<topology::Diagrams>,
}

pub fn run_holes(cloud: &PointCloud, cfg: &RunConfig, include_pairs: bool) -> Result<HolesOutput> {
    cfg.validate()?;
    let a = topology::analyze_holes(cloud, &cfg.holes_config())?;
    let density = match cfg.density_span {
        DensitySpan::Features => a.metrics.persistence_density,
        DensitySpan::Filtration => a.persistence_density_filtration,
    };
    Ok(HolesOutput {
        tau: a.metrics.tau,
        n_holes: a.metrics.n_holes,
        total_persistence: a.metrics.total_persistence,
        avg_persistence: a.metrics.avg_persistence,
        persistence_density: density,
        density_span: cfg.density_span,
        essential_h1: a.essential_h1,
        epsilon_max: a.epsilon_max,
        diameter: a.diameter,
        n_points: cloud.len(),
        n_used: a.n_used,
        max_points: cfg.max_points,
        seed: cfg.seed,
        pairs: include_pairs.then(|| a.diagrams.h1.pairs.clone()),
        diagrams: Some(a.diagrams),
    })
}

fn load_input(path: &Path) -> Result<PointCloud> {
    load_point_cloud(path, Format::detect(path)?)
}

/// Renders a flat record as a header line plus one value line.
fn scalar_csv(value: &serde_json::Value) -> String {
    let obj = value.as_object().cloned().unwrap_or_default();
    let mut keys = Vec::new();
    let mut vals = Vec::new();
    for (k, v) in obj {
        if v.is_array() || v.is_object() {
            continue;
        }
        keys.push(k);
        vals.push(match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Null => String::new(),
            other => other.to_string(),
        });
    }
    format!("{}\n{}\n", keys.join(","), vals.join(","))
}

fn render<T: Serialize>(value: &T, format: OutputFormat) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Internal(e.to_string()))?;
    Ok(match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => scalar_csv(&v),
    })
}

fn emit(text: &str, output: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Executes a parsed command, writing the result to `--output` or `stdout`.
pub fn execute(command: &Command, stdout: &mut dyn Write) -> Result<()> {
    let cfg = command.run_config()?;
    let text = match command {
        Command::Id(a) => render(&run_id(&load_input(&a.input)?, &cfg, cfg.include_local)?, cfg.format)?,
        Command::Curvature(a) => render(
            &run_curvature(&load_input(&a.input)?, &cfg, cfg.include_local)?,
            cfg.format,
        )?,
        Command::Holes(a) => {
            let out = run_holes(&load_input(&a.input)?, &cfg, cfg.include_pairs)?;
            if let (Some(path), Some(d)) = (&a.diagram, &out.diagrams) {
                fs::write(path, topology::diagrams_to_csv(d)).map_err(|e| Error::io(path, e))?;
            }
            render(&out, cfg.format)?
        }
        Command::Report(a) => {
            let report = crate::api::bias_report(&a.embeddings, &a.accuracy, &cfg)?;
            match cfg.format {
                OutputFormat::Json => report.to_json() + "\n",
                OutputFormat::Csv => report.to_csv(),
            }
        }
        Command::Sample(a) => {
            let params = SampleParams {
                radius: a.radius,
                minor_radius: a.minor_radius,
                dim: a.dim,
                ambient: a.ambient,
                noise: a.noise,
            };
            let kind: ManifoldKind = a.kind.parse()?;
            let cloud = analysis::sample_manifold(kind, a.n, &params, a.seed)?;
            if a.binary {
                let path = a
                    .output
                    .as_ref()
                    .ok_or_else(|| Error::Parameter("--binary requires --output".into()))?;
                return cloud.save(path, Format::Binary);
            }
            cloud.to_csv()
        }
    };
    emit(&text, cfg.output.as_deref(), stdout)
}

fn diagnostic(err: &Error) -> String {
    json!({
        "error": err.kind(),
        "message": err.to_string(),
        "exit_code": err.exit_code(),
    })
    .to_string()
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        // 0 lets rayon pick; a pool may already exist when embedded.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Full CLI entry: parse `args`, run, report failures; returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let err = Error::Parameter(e.render().to_string().lines().next().unwrap_or("").to_string());
            let _ = writeln!(stderr, "{}", diagnostic(&err));
            return 2;
        }
    };
    configure_threads();
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(err) => {
            log::debug!("{err:?}");
            let _ = writeln!(stderr, "{}", diagnostic(&err));
            err.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let m = parse_config_file("# comment\nk = 12\n--epsilon_max=auto\n\n").unwrap();
        assert_eq!(m["k"], "12");
        assert_eq!(m["epsilon-max"], "auto");
        assert!(parse_config_file("k 12").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.cfg");
        fs::write(&cfg_path, "k=7\nmethod=mle\nseed=9\n").unwrap();
        let cli = Cli::try_parse_from([
            "pmg",
            "id",
            "--input",
            "x.csv",
            "--k",
            "11",
            "--config",
            cfg_path.to_str().unwrap(),
        ])
        .unwrap();
        let cfg = cli.command.run_config().unwrap();
        assert_eq!(cfg.k, Some(11));
        assert_eq!(cfg.method, Method::Mle);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.cfg");
        fs::write(&cfg_path, "neighbours=7\n").unwrap();
        let cli =
            Cli::try_parse_from(["pmg", "holes", "--input", "x", "--config", cfg_path.to_str().unwrap()]).unwrap();
        assert!(matches!(cli.command.run_config(), Err(Error::Parameter(_))));
    }

    #[test]
    fn parameter_validation() {
        for args in [
            vec!["pmg", "id", "--input", "x", "--k", "0"],
            vec!["pmg", "curvature", "--input", "x", "--m", "0"],
            vec!["pmg", "holes", "--input", "x", "--tau", "-1"],
            vec!["pmg", "holes", "--input", "x", "--max-points", "0"],
        ] {
            let cli = Cli::try_parse_from(&args).unwrap();
            let err = cli.command.run_config().unwrap_err();
            assert_eq!(err.exit_code(), 2, "{args:?}");
        }
    }

    #[test]
    fn scalar_csv_skips_nested() {
        let v = json!({"a": 1, "b": "x", "c": [1, 2], "d": null});
        assert_eq!(scalar_csv(&v), "a,b,d\n1,x,\n");
    }
}
