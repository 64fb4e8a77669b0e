//! Argument parsing and dispatch; `main` is a thin wrapper around [`run`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use texrig_core::rig::LiftVariant;
use texrig_core::validate::SuiteSize;

use crate::commands;
use crate::config::RunConfig;
use crate::{CliError, EXIT_OK, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "texrig", version, about = "Texel-space Jacobian fields and Quasi-Phong Gaussian rigging")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the config's lift variant.
    #[arg(long, global = true, value_parser = ["naive", "quasi_phong"])]
    variant: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize the rest UVs, compute face frames and write the dilated field.
    BuildField,
    /// Lift the local maps for every pose and export the Gaussians.
    Rig,
    /// Lift, export and render every camera.
    Render,
    /// Optimize the local maps against target images.
    Fit,
    /// Measure position and covariance gaps across face seams for both lifts.
    CompareSeams,
    /// Run the built-in invariant suites.
    Validate,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config is required for this command".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(v) = &cli.variant {
        cfg.variant = LiftVariant::parse(v).expect("clap restricts values");
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<String, CliError> {
    match cli.command {
        Command::BuildField => commands::build_field(&load(cli)?),
        Command::Rig => commands::rig(&load(cli)?),
        Command::Render => commands::render(&load(cli)?),
        Command::Fit => commands::fit(&load(cli)?, out),
        Command::CompareSeams => commands::compare(&load(cli)?),
        Command::Validate => {
            let seed = match (&cli.config, cli.seed) {
                (_, Some(s)) => s,
                (Some(_), None) => load(cli)?.seed,
                (None, None) => 0,
            };
            commands::validate(seed, SuiteSize::default(), out)
        }
    }
}

/// Parses `args` (program name first), runs the command with progress on
/// `out` and errors on `err`, and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
    };
    match dispatch(&cli, out) {
        Ok(summary) => {
            let _ = writeln!(out, "{summary}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "texrig: {e}");
            e.exit_code()
        }
    }
}
