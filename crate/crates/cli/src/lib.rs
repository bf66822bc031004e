//! Command-line pipeline: inputs, model, coloring runs, attack replay and reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod model;
pub mod runs;

use std::fs;

use clap::Parser;

pub use config::{Cli, Command, Inputs, RunArgs};
pub use error::{CliError, CliResult};
pub use model::Model;

use commands::{Output, Stamp};

/// Run one parsed invocation: compute, write files, return stdout text.
pub fn run(cli: &Cli) -> CliResult<String> {
    let args = cli.command.args();
    if !(args.threshold > 0.0 && args.threshold < 1.0) {
        return Err(CliError::Input(format!("threshold {} outside (0, 1)", args.threshold)));
    }
    let inputs = Inputs::resolve(args)?;
    let stamp = Stamp { config_hash: config::config_hash(cli.command.name(), args, &inputs), seed: args.seed };
    tracing::info!(command = cli.command.name(), config_hash = %stamp.config_hash, seed = args.seed);

    let output = match &cli.command {
        Command::Impact(a) => commands::cmd_impact(a, &inputs, &stamp)?,
        Command::Color(a) => commands::cmd_color(a, &Model::build(&inputs, a.threshold, a.p_total)?, &stamp)?,
        Command::Attack(a) => commands::cmd_attack(a, &Model::build(&inputs, a.threshold, a.p_total)?, &stamp)?,
        Command::Compare(a) => commands::cmd_compare(a, &Model::build(&inputs, a.threshold, a.p_total)?, &stamp)?,
    };
    write_output(args, &output)?;
    Ok(output.text)
}

fn write_output(args: &RunArgs, output: &Output) -> CliResult<()> {
    let Some(dir) = &args.out else { return Ok(()) };
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.clone(), source })?;
    for (name, bytes) in &output.files {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Write { path, source })?;
    }
    Ok(())
}

/// Parse `argv`, run, print. Returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("gridiv: {e}");
            e.exit_code()
        }
    }
}
