//! Command-line flags and the JSON config file share one schema.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Equilibrium,
    Spectrum,
    Energy,
    Limits,
    Dynamics,
    Flow,
    Continuum,
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Equilibrium => "equilibrium",
            Command::Spectrum => "spectrum",
            Command::Energy => "energy",
            Command::Limits => "limits",
            Command::Dynamics => "dynamics",
            Command::Flow => "flow",
            Command::Continuum => "continuum",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantName {
    Circle,
    FixedRight,
    FixedLeft,
    SpringEnds,
    TwoEdge,
}

impl VariantName {
    pub fn as_str(self) -> &'static str {
        match self {
            VariantName::Circle => "circle",
            VariantName::FixedRight => "fixed-right",
            VariantName::FixedLeft => "fixed-left",
            VariantName::SpringEnds => "spring-ends",
            VariantName::TwoEdge => "two-edge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingName {
    None,
    /// Force `f` on the first free particle.
    Point,
    /// `f` on the first particle and `-f` on the last.
    Opposed,
    /// `f` on every free particle.
    Uniform,
    /// `c sin(ωt)` on the last particle.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Sweep values: `start:stop:count` (inclusive, evenly spaced) or a
/// comma-separated list. An empty string is an empty grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Text(#[serde(with = "grid_text")] Vec<f64>),
}

impl Grid {
    pub fn values(&self) -> &[f64] {
        match self {
            Grid::List(v) | Grid::Text(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridError(String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GridError {}

impl FromStr for Grid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_grid(s).map(Grid::Text)
    }
}

fn parse_number(s: &str) -> Result<f64, GridError> {
    s.trim().parse::<f64>().map_err(|_| GridError(format!("`{s}` is not a number")))
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>, GridError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => s.split(',').map(parse_number).collect(),
        [start, stop, count] => {
            let (a, b) = (parse_number(start)?, parse_number(stop)?);
            let n: usize = count.trim().parse().map_err(|_| GridError(format!("`{count}` is not a count")))?;
            Ok(match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
            })
        }
        _ => Err(GridError(format!("grid `{s}` is neither start:stop:count nor a list"))),
    }
}

mod grid_text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_grid(&text).map_err(serde::de::Error::custom)
    }
}

/// Every setting is optional here; commands check what they need.
/// Config-file keys are the long flag names.
#[derive(Debug, Clone, Default, Parser, Serialize, Deserialize)]
#[command(name = "hchain", version, about = "Harmonic particle chains: equilibria, spectra, energies, dynamics", allow_negative_numbers = true)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    /// Command to run (may also come from the config file)
    #[arg(value_enum)]
    pub command: Option<Command>,

    /// JSON config file; flags override its values
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Output file or directory (default: $HCHAIN_OUTPUT_DIR, else stdout)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized initial states
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, value_enum)]
    pub variant: Option<VariantName>,
    #[arg(long, value_enum)]
    pub forcing: Option<ForcingName>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub length: Option<f64>,
    /// Natural spacing
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    /// Drive frequency; spring frequency for the circle
    #[arg(long)]
    pub omega: Option<f64>,
    /// Static force
    #[arg(long)]
    pub f: Option<f64>,
    /// Drive amplitude
    #[arg(long)]
    pub c: Option<f64>,

    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "L1")]
    #[serde(rename = "L1")]
    pub length1: Option<f64>,
    #[arg(long = "L2")]
    #[serde(rename = "L2")]
    pub length2: Option<f64>,
    #[arg(long)]
    pub a0: Option<f64>,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,

    /// Linear damping coefficient
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Record every stride-th integration step
    #[arg(long)]
    pub stride: Option<usize>,
    /// Amplitude of the random perturbation of the initial state
    #[arg(long)]
    pub noise: Option<f64>,
    /// Averaging window for empirical energy means
    #[arg(long)]
    pub window: Option<f64>,

    #[arg(long)]
    pub f1: Option<f64>,
    #[arg(long)]
    pub w1: Option<f64>,
    /// Probe positions for the continuum density, comma separated
    #[arg(long, value_delimiter = ',')]
    pub probes: Option<Vec<f64>>,
    /// Probe window width for the continuum density
    #[arg(long)]
    pub width: Option<f64>,

    /// Parameter varied by `sweep`
    #[arg(long)]
    pub sweep_param: Option<String>,
    /// Sweep grid: start:stop:count or a comma-separated list
    #[arg(long, allow_hyphen_values = true)]
    pub sweep_grid: Option<Grid>,
    /// Command evaluated at each sweep point
    #[arg(long, value_enum)]
    pub sweep_command: Option<Command>,
}
