//! Parallel evaluation of one command over a parameter grid.

use rayon::prelude::*;
use serde_json::Value;

use crate::commands::{self, sweep_fields};
use crate::config::{with_param, RunConfig, SweepAxis};
use crate::emit::{int, num, text, Report};
use crate::error::{CliError, Result};
use crate::settings::Command;

fn point(config: &RunConfig, axis: &SweepAxis, index: usize, value: f64) -> Result<Vec<Value>> {
    let params = with_param(&config.params, &axis.param, value)?;
    let seed = if axis.param == "seed" { params.seed.unwrap_or(0) } else { config.seed.wrapping_add(index as u64) };
    let fields = sweep_fields(axis.command);
    match commands::run(axis.command, &params, seed) {
        Ok(report) => {
            let lookup = |key: &&str| {
                report.summary.get(*key).cloned().or_else(|| {
                    let col = report.columns.iter().position(|c| c == key)?;
                    report.rows.first().map(|row| row[col].clone())
                })
            };
            let mut row = vec![text("ok")];
            row.extend(fields.iter().map(|k| lookup(k).unwrap_or(Value::Null)));
            Ok(row)
        }
        Err(CliError::Core(harmonic_chain::Error::NoEquilibrium(_))) if axis.command == Command::Equilibrium => {
            let mut row = vec![text("ok"), text("NoEquilibrium")];
            row.extend(std::iter::repeat_n(Value::Null, fields.len() - 1));
            Ok(row)
        }
        Err(e @ CliError::Core(_)) => {
            let mut row = vec![text(e.class())];
            row.extend(std::iter::repeat_n(Value::Null, fields.len()));
            Ok(row)
        }
        Err(e) => Err(e),
    }
}

/// One row per grid point, in grid order. Library failures at a point are
/// recorded in the `status` column; configuration errors abort the sweep.
pub fn run(config: &RunConfig) -> Result<Report> {
    let axis = config.sweep.as_ref().ok_or_else(|| CliError::missing("sweep-param"))?;
    let mut columns = vec!["grid_index", axis.param.as_str(), "status"];
    columns.extend_from_slice(sweep_fields(axis.command));
    let mut report = Report::new("sweep", "sweep", &columns);
    let rows: Vec<Result<Vec<Value>>> =
        axis.grid.par_iter().enumerate().map(|(i, &v)| point(config, axis, i, v)).collect();
    for (i, row) in rows.into_iter().enumerate() {
        let mut full = vec![int(i), num(axis.grid[i])];
        full.extend(row?);
        report.push(full);
    }
    report.set("sweep_command", text(axis.command.as_str()));
    report.set("sweep_param", text(&axis.param));
    Ok(report)
}
