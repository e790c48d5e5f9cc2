mod commands;
mod config;
mod emit;
mod error;
mod settings;
mod sweep;

use std::process::ExitCode;

use clap::Parser;

use config::RunConfig;
use error::Result;
use settings::{Command, Settings};

fn run(flags: &Settings) -> Result<()> {
    let config = RunConfig::resolve(flags)?;
    let report = match config.command {
        Command::Sweep => sweep::run(&config)?,
        command => commands::run(command, &config.params, config.seed)?,
    };
    if let Some(path) = emit::write(&report, &config.output)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let flags = Settings::parse();
    match run(&flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hchain: error[{}]: {e}", e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
