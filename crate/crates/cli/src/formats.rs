//! Output file formats.
//!
//! Every file starts with the fully resolved configuration: CSV files carry
//! `# key = value` comment lines before the single header row, JSON files
//! carry a `config` object. Re-running the echoed configuration reproduces
//! the file bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use shg_core::hilbert::{Block, TwoModeState};

/// Ordered `key = value` pairs describing a resolved run configuration.
#[derive(Debug, Clone, Default)]
pub struct ConfigEcho {
    pairs: Vec<(String, String)>,
}

impl ConfigEcho {
    pub fn new(command: &str) -> Self {
        ConfigEcho { pairs: vec![("command".into(), command.into())] }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.pairs.push((key.into(), value.to_string()));
    }

    pub fn csv_comments(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.pairs {
            writeln!(out, "# {key} = {value}").unwrap();
        }
        out
    }

    pub fn json_value(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (key, value) in &self.pairs {
            map.insert(key.clone(), serde_json::Value::String(value.clone()));
        }
        serde_json::Value::Object(map)
    }
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string(value).context("serializing JSON")?;
    write_text(path, &text)
}

/// Equal-length named columns under a comment header.
pub fn write_csv_columns(
    path: &Path,
    echo: &ConfigEcho,
    columns: &[(&str, &[f64])],
) -> Result<()> {
    let rows = columns.first().map_or(0, |(_, c)| c.len());
    debug_assert!(columns.iter().all(|(_, c)| c.len() == rows));
    let mut out = echo.csv_comments();
    let names: Vec<&str> = columns.iter().map(|(name, _)| *name).collect();
    writeln!(out, "{}", names.join(",")).unwrap();
    for row in 0..rows {
        let mut line = String::new();
        for (i, (_, column)) in columns.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            write!(line, "{}", column[row]).unwrap();
        }
        writeln!(out, "{line}").unwrap();
    }
    write_text(path, &out)
}

/// Derive `stem_suffix.ext` next to an output path.
pub fn sibling(path: &Path, suffix: &str, ext: &str) -> std::path::PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

pub fn complex_pair(z: C64) -> (f64, f64) {
    (z.re, z.im)
}

/// Serialized two-mode state snapshot (`quantum --snapshot`, consumed by
/// `wigner --snapshot-file`).
#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub config: serde_json::Value,
    /// Evolution time of the snapshot.
    pub gt: f64,
    /// Input pump amplitude as `[re, im]`.
    pub alpha0: (f64, f64),
    pub cutoff_epsilon: f64,
    /// Conserved-`N` amplitude blocks; `amps[k]` is the `[re, im]` amplitude
    /// of `|n₁ = n − 2k, n₂ = k⟩`.
    pub blocks: Vec<BlockDto>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BlockDto {
    pub n: usize,
    pub amps: Vec<(f64, f64)>,
}

impl StateFile {
    pub fn from_state(state: &TwoModeState, gt: f64, config: serde_json::Value) -> Self {
        StateFile {
            config,
            gt,
            alpha0: complex_pair(state.alpha0()),
            cutoff_epsilon: state.cutoff_epsilon(),
            blocks: state
                .blocks()
                .iter()
                .map(|b| BlockDto {
                    n: b.n_total,
                    amps: b.amps.iter().map(|&a| complex_pair(a)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_state(&self) -> Result<TwoModeState> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| Block {
                n_total: b.n,
                amps: b.amps.iter().map(|&(re, im)| C64::new(re, im)).collect(),
            })
            .collect();
        TwoModeState::from_blocks(
            blocks,
            self.cutoff_epsilon,
            C64::new(self.alpha0.0, self.alpha0.1),
        )
        .context("snapshot file does not contain a valid state")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading snapshot {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing snapshot {}", path.display()))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QuantumJson {
    pub config: serde_json::Value,
    pub gt: Vec<f64>,
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
    pub purity: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WignerJson {
    pub config: serde_json::Value,
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    /// Row-major `values[i * y_axis.len() + j] = W(x_axis[i], y_axis[j])`.
    pub values: Vec<f64>,
    pub cell_area: f64,
    pub min_value: f64,
    pub negative_volume: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MarginalsJson {
    pub config: serde_json::Value,
    pub x: Vec<f64>,
    pub p_x: Vec<f64>,
    pub y: Vec<f64>,
    pub p_y: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TwignerJson {
    pub config: serde_json::Value,
    pub gt: Vec<f64>,
    /// `mean(|a1|²) − 1/2`, the series comparable to quantum `⟨n₁⟩`.
    pub mean_corrected: Vec<f64>,
    pub mean_raw: Vec<f64>,
    pub max_invariant_drift: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScatterJson {
    pub config: serde_json::Value,
    pub gt: f64,
    pub a1: Vec<(f64, f64)>,
    /// Per-trajectory max relative drift of `|a₁|² + 2|a₂|²`.
    pub invariant_drift: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingRowDto {
    pub n: f64,
    pub gt_min: f64,
    pub gt_max: f64,
    pub n_at_max: f64,
    pub ratio: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScalingJson {
    pub config: serde_json::Value,
    pub rows: Vec<ScalingRowDto>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FitJson {
    pub config: serde_json::Value,
    pub coefficient: f64,
    pub exponent: f64,
    pub coeff_stderr: f64,
    pub exp_stderr: f64,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct KerrJson {
    pub config: serde_json::Value,
    pub mean_n: f64,
    pub phi_nl: f64,
    /// `|⟨ψ_cat|ψ⟩|²` of the state evolved to `Φ_NL = π⟨n̂⟩`.
    pub cat_overlap_at_pi_mean: f64,
    pub coeffs: Vec<(f64, f64)>,
    pub probabilities: Vec<f64>,
}
