use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qpredict_cli::commands::{self, CommonOpts, EXIT_CONFIG};
use qpredict_cli::config::Config;
use qpredict_cli::output::Format;

/// Spectral prediction harness: estimate sparse spectra, predict and restore
/// phase-rotation evolution, and run the bundled period-finding and search
/// experiments.
#[derive(Debug, Parser)]
#[command(name = "qpredict", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key=value configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override the config seed.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,

    /// Write rows to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_name = "csv|json", default_value = "csv")]
    format: String,

    /// Extra slack added to every bound check.
    #[arg(long, global = true, value_name = "FLOAT", default_value_t = 0.0)]
    tolerance: f64,

    /// Total-qubit capacity guard (default 22; raising it prints a warning).
    #[arg(long, global = true, value_name = "INT")]
    max_qubits: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the estimation circuit and report window tail masses.
    Wizard,
    /// Predict forward evolution and compare against the exact operator.
    Predict,
    /// Restore past states (negative times) and check the bounds.
    Restore,
    /// Order finding by spectral estimation of modular multiplication.
    Shor {
        /// Number to factor.
        #[arg(long)]
        modulus: Option<u64>,
        /// Base of the modular multiplication.
        #[arg(long)]
        base: Option<u64>,
    },
    /// Diagonalize the search iterate and predict its evolution.
    Grover {
        /// Main register width.
        #[arg(long)]
        n: Option<u32>,
        /// Index of the marked item.
        #[arg(long)]
        marked: Option<usize>,
    },
    /// Cartesian parameter sweep with a trailing speedup summary row.
    Sweep,
}

fn run(cli: Cli) -> Result<(), commands::CmdError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.set("seed", seed.to_string());
    }
    let format: Format = cli
        .format
        .parse()
        .map_err(|e: String| commands::CmdError {
            code: EXIT_CONFIG,
            message: e,
        })?;
    let opts = CommonOpts {
        out: cli.out.clone(),
        format,
        tolerance: cli.tolerance,
        max_qubits: cli.max_qubits.unwrap_or(commands::DEFAULT_MAX_QUBITS),
    };

    match cli.command {
        Command::Wizard => commands::cmd_wizard(&cfg, &opts),
        Command::Predict => commands::cmd_predict(&cfg, &opts),
        Command::Restore => commands::cmd_restore(&cfg, &opts),
        Command::Shor { modulus, base } => {
            if let Some(m) = modulus {
                cfg.set("modulus", m.to_string());
            }
            if let Some(b) = base {
                cfg.set("base", b.to_string());
            }
            commands::cmd_shor(&cfg, &opts)
        }
        Command::Grover { n, marked } => {
            if let Some(n) = n {
                cfg.set("n", n.to_string());
            }
            if let Some(m) = marked {
                cfg.set("marked", m.to_string());
            }
            commands::cmd_grover(&cfg, &opts)
        }
        Command::Sweep => commands::cmd_sweep(&cfg, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
