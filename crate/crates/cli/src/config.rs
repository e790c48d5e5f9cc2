//! Resolution of flags and config file into a [`RunConfig`].

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{CliError, Result};
use crate::settings::{Command, Format, Settings};

/// Where and how results are written.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    /// File, or directory receiving `<command>.<ext>`; `None` means the
    /// default output directory if configured, else standard output.
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: String,
    pub grid: Vec<f64>,
    pub command: Command,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: Settings,
    pub output: OutputSpec,
    pub seed: u64,
    pub sweep: Option<SweepAxis>,
}

pub const OUTPUT_DIR_VAR: &str = "HCHAIN_OUTPUT_DIR";

/// Settings keys a sweep may not vary.
const NON_SWEEPABLE: [&str; 9] =
    ["command", "output", "format", "variant", "forcing", "probes", "sweep-param", "sweep-grid", "sweep-command"];

fn read_config_file(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("malformed config {}: {e}", path.display())))?;
    if !value.is_object() {
        return Err(CliError::config(format!("config {} must be a JSON object", path.display())));
    }
    let checked: Settings = serde_json::from_value(value)
        .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))?;
    to_map(&checked)
}

fn to_map(settings: &Settings) -> Result<Map<String, Value>> {
    match serde_json::to_value(settings).map_err(|e| CliError::config(e.to_string()))? {
        Value::Object(map) => Ok(map),
        _ => unreachable!("settings serialize to an object"),
    }
}

fn from_map(map: Map<String, Value>) -> Result<Settings> {
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::config(e.to_string()))
}

/// Flag values take precedence over file values.
pub fn merge(flags: &Settings) -> Result<Settings> {
    let mut merged = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => Map::new(),
    };
    for (key, value) in to_map(flags)? {
        if !value.is_null() || !merged.contains_key(&key) {
            merged.insert(key, value);
        }
    }
    from_map(merged)
}

/// Copy of `settings` with the numeric parameter `param` set to `value`.
pub fn with_param(settings: &Settings, param: &str, value: f64) -> Result<Settings> {
    let mut map = to_map(settings)?;
    if !map.contains_key(param) || NON_SWEEPABLE.contains(&param) {
        return Err(CliError::config(format!("`{param}` is not a sweepable parameter")));
    }
    let number = match serde_json::Number::from_f64(value) {
        Some(n) => n,
        None => return Err(CliError::config(format!("sweep value {value} is not finite"))),
    };
    let integral = value >= 0.0 && value.fract() == 0.0 && value < 2f64.powi(53);
    map.insert(param.to_string(), Value::Number(if integral { (value as u64).into() } else { number }));
    from_map(map).map_err(|e| CliError::config(format!("sweep value {value} for `{param}`: {e}")))
}

impl RunConfig {
    pub fn resolve(flags: &Settings) -> Result<Self> {
        let params = merge(flags)?;
        let command = params.command.ok_or_else(|| CliError::config("no command given"))?;
        let output = OutputSpec { path: params.output.clone(), format: params.format.unwrap_or(Format::Csv) };
        let seed = params.seed.unwrap_or(0);
        let sweep = if command == Command::Sweep {
            let param = params.sweep_param.clone().ok_or_else(|| CliError::missing("sweep-param"))?;
            let grid = params.sweep_grid.as_ref().ok_or_else(|| CliError::missing("sweep-grid"))?.values().to_vec();
            let inner = params.sweep_command.unwrap_or(Command::Equilibrium);
            if inner == Command::Sweep {
                return Err(CliError::config("sweeps cannot be nested"));
            }
            if !to_map(&params)?.contains_key(&param) || NON_SWEEPABLE.contains(&param.as_str()) {
                return Err(CliError::config(format!("`{param}` is not a sweepable parameter")));
            }
            Some(SweepAxis { param, grid, command: inner })
        } else {
            None
        };
        Ok(Self { command, params, output, seed, sweep })
    }
}
