//! Flag parsing and optional JSON config files.
//!
//! Every subcommand accepts `--config <file.json>` whose keys mirror the
//! long flag names (snake_case). Explicit flags always win over config-file
//! values; unknown keys in a config file are rejected.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_CUTOFF: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "shg-sim",
    about = "Quantum and semiclassical dynamics of pump-mode cat formation in second-harmonic generation",
    version
)]
pub struct Cli {
    /// Cap the number of worker threads (results are identical for any value)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Fock-space evolution: photon-number and purity series
    Quantum(QuantumArgs),
    /// Wigner quasiprobability grid, marginals and negativity
    Wigner(WignerArgs),
    /// Classical trajectory ensemble with sampled input fluctuations
    Twigner(TwignerArgs),
    /// Sweep of the first-maximum time over input photon number, with the
    /// power-law fit
    Scaling(ScalingArgs),
    /// Single-mode Kerr propagator table and cat overlap
    Kerr(KerrArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Args)]
pub struct QuantumArgs {
    /// Initial mean pump photon number
    #[arg(long)]
    pub n: Option<f64>,
    /// End of the dimensionless time grid
    #[arg(long = "gt-max")]
    pub gt_max: Option<f64>,
    /// Time grid step
    #[arg(long)]
    pub step: Option<f64>,
    /// Also write the evolved state at this gt as a JSON block list
    #[arg(long)]
    pub snapshot: Option<f64>,
    /// Discarded Poisson tail bound of the input state
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with default values for the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantumFile {
    n: Option<f64>,
    gt_max: Option<f64>,
    step: Option<f64>,
    snapshot: Option<f64>,
    cutoff: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Clone)]
pub struct QuantumConfig {
    pub n: f64,
    pub gt_max: f64,
    pub step: f64,
    pub snapshot: Option<f64>,
    pub cutoff: f64,
    pub out: PathBuf,
    pub format: Format,
}

impl QuantumArgs {
    pub fn resolve(self) -> Result<QuantumConfig> {
        let file: QuantumFile = load_config(self.config.as_deref())?;
        let config = QuantumConfig {
            n: require("n", self.n.or(file.n))?,
            gt_max: self.gt_max.or(file.gt_max).unwrap_or(1.0),
            step: self.step.or(file.step).unwrap_or(1e-3),
            snapshot: self.snapshot.or(file.snapshot),
            cutoff: self.cutoff.or(file.cutoff).unwrap_or(DEFAULT_CUTOFF),
            out: self.out.or(file.out).unwrap_or_else(|| "quantum.csv".into()),
            format: resolve_format(self.format, file.format.as_deref())?,
        };
        ensure_positive("n", config.n, true)?;
        ensure_positive("gt-max", config.gt_max, false)?;
        ensure_positive("step", config.step, false)?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    /// State snapshot written by `quantum --snapshot`
    #[arg(long = "snapshot-file", conflicts_with_all = ["n", "gt"])]
    pub snapshot_file: Option<PathBuf>,
    /// Initial mean pump photon number (evolves in place of a snapshot)
    #[arg(long, requires = "gt")]
    pub n: Option<f64>,
    /// Evolution time when `--n` is given
    #[arg(long, requires = "n")]
    pub gt: Option<f64>,
    /// Points per axis
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
    /// Half-width of the square grid (default √n̄ + 4)
    #[arg(long = "grid-span")]
    pub grid_span: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct WignerFile {
    snapshot_file: Option<PathBuf>,
    n: Option<f64>,
    gt: Option<f64>,
    grid_points: Option<usize>,
    grid_span: Option<f64>,
    cutoff: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Clone)]
pub enum WignerSource {
    Snapshot(PathBuf),
    Evolve { n: f64, gt: f64 },
}

#[derive(Debug, Clone)]
pub struct WignerConfig {
    pub source: WignerSource,
    pub grid_points: usize,
    pub grid_span: Option<f64>,
    pub cutoff: f64,
    pub out: PathBuf,
    pub format: Format,
}

impl WignerArgs {
    pub fn resolve(self) -> Result<WignerConfig> {
        let file: WignerFile = load_config(self.config.as_deref())?;
        let snapshot = self.snapshot_file.or(file.snapshot_file);
        let n = self.n.or(file.n);
        let gt = self.gt.or(file.gt);
        let source = match (snapshot, n, gt) {
            (Some(path), None, None) => WignerSource::Snapshot(path),
            (None, Some(n), Some(gt)) => WignerSource::Evolve { n, gt },
            _ => bail!("give either --snapshot-file or both --n and --gt"),
        };
        let config = WignerConfig {
            source,
            grid_points: self.grid_points.or(file.grid_points).unwrap_or(401),
            grid_span: self.grid_span.or(file.grid_span),
            cutoff: self.cutoff.or(file.cutoff).unwrap_or(DEFAULT_CUTOFF),
            out: self.out.or(file.out).unwrap_or_else(|| "wigner.csv".into()),
            format: resolve_format(self.format, file.format.as_deref())?,
        };
        if config.grid_points < 2 {
            bail!("--grid-points must be at least 2");
        }
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct TwignerArgs {
    /// Initial mean pump photon number
    #[arg(long)]
    pub n: Option<f64>,
    /// Trajectory count
    #[arg(long)]
    pub trajectories: Option<usize>,
    /// End of the time grid
    #[arg(long = "gt-max")]
    pub gt_max: Option<f64>,
    /// Fixed integration step (defaults to a value satisfying the step bound)
    #[arg(long)]
    pub dt: Option<f64>,
    /// RNG seed (echoed into outputs)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the per-trajectory pump amplitudes at this gt
    #[arg(long)]
    pub scatter: Option<f64>,
    /// Approximate number of recorded times
    #[arg(long = "record-points")]
    pub record_points: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwignerFile {
    n: Option<f64>,
    trajectories: Option<usize>,
    gt_max: Option<f64>,
    dt: Option<f64>,
    seed: Option<u64>,
    scatter: Option<f64>,
    record_points: Option<usize>,
    out: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TwignerConfig {
    pub n: f64,
    pub trajectories: usize,
    pub gt_max: f64,
    pub dt: Option<f64>,
    pub seed: u64,
    pub scatter: Option<f64>,
    pub record_points: usize,
    pub out: PathBuf,
    pub format: Format,
}

impl TwignerArgs {
    pub fn resolve(self) -> Result<TwignerConfig> {
        let file: TwignerFile = load_config(self.config.as_deref())?;
        let config = TwignerConfig {
            n: require("n", self.n.or(file.n))?,
            trajectories: self.trajectories.or(file.trajectories).unwrap_or(1000),
            gt_max: self.gt_max.or(file.gt_max).unwrap_or(1.0),
            dt: self.dt.or(file.dt),
            seed: self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            scatter: self.scatter.or(file.scatter),
            record_points: self.record_points.or(file.record_points).unwrap_or(500),
            out: self.out.or(file.out).unwrap_or_else(|| "twigner.csv".into()),
            format: resolve_format(self.format, file.format.as_deref())?,
        };
        ensure_positive("n", config.n, true)?;
        ensure_positive("gt-max", config.gt_max, false)?;
        if config.trajectories == 0 {
            bail!("--trajectories must be at least 1");
        }
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Comma-separated list of initial photon numbers (exponent notation ok)
    #[arg(long = "n-values", value_delimiter = ',')]
    pub n_values: Option<Vec<f64>>,
    #[arg(long)]
    pub trajectories: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalingFile {
    n_values: Option<Vec<f64>>,
    trajectories: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ScalingConfig {
    pub n_values: Vec<f64>,
    pub trajectories: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
}

impl ScalingArgs {
    pub fn resolve(self) -> Result<ScalingConfig> {
        let file: ScalingFile = load_config(self.config.as_deref())?;
        let config = ScalingConfig {
            n_values: require("n-values", self.n_values.or(file.n_values))?,
            trajectories: self.trajectories.or(file.trajectories).unwrap_or(1000),
            seed: self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: self.out.or(file.out).unwrap_or_else(|| "scaling.csv".into()),
            format: resolve_format(self.format, file.format.as_deref())?,
        };
        if config.n_values.is_empty() {
            bail!("--n-values must contain at least one photon number");
        }
        for &n in &config.n_values {
            ensure_positive("n-values entry", n, false)?;
        }
        if config.trajectories == 0 {
            bail!("--trajectories must be at least 1");
        }
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct KerrArgs {
    /// Input coherent amplitude (real)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Accumulated nonlinear phase Φ_NL
    #[arg(long = "phi-nl")]
    pub phi_nl: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct KerrFile {
    alpha: Option<f64>,
    phi_nl: Option<f64>,
    cutoff: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Clone)]
pub struct KerrConfig {
    pub alpha: f64,
    pub phi_nl: f64,
    pub cutoff: f64,
    pub out: PathBuf,
    pub format: Format,
}

impl KerrArgs {
    pub fn resolve(self) -> Result<KerrConfig> {
        let file: KerrFile = load_config(self.config.as_deref())?;
        let config = KerrConfig {
            alpha: require("alpha", self.alpha.or(file.alpha))?,
            phi_nl: require("phi-nl", self.phi_nl.or(file.phi_nl))?,
            cutoff: self.cutoff.or(file.cutoff).unwrap_or(DEFAULT_CUTOFF),
            out: self.out.or(file.out).unwrap_or_else(|| "kerr.csv".into()),
            format: resolve_format(self.format, file.format.as_deref())?,
        };
        if !config.phi_nl.is_finite() {
            bail!("--phi-nl must be finite");
        }
        Ok(config)
    }
}

fn load_config<T: Default + for<'de> Deserialize<'de>>(path: Option<&std::path::Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config file {}", path.display()))
        }
    }
}

fn require<T>(flag: &str, value: Option<T>) -> Result<T> {
    value.ok_or_else(|| anyhow::anyhow!("--{flag} is required (flag or config file)"))
}

fn resolve_format(flag: Option<Format>, file: Option<&str>) -> Result<Format> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match file {
        None => Ok(Format::Csv),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => bail!("unknown format {other:?} in config file (csv or json)"),
    }
}

fn ensure_positive(flag: &str, value: f64, allow_zero: bool) -> Result<()> {
    let ok = value.is_finite() && (value > 0.0 || (allow_zero && value == 0.0));
    if !ok {
        bail!("--{flag} must be {} and finite, got {value}", if allow_zero { "non-negative" } else { "positive" });
    }
    Ok(())
}
