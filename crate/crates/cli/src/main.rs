use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kljn_cli::{
    check, run, solve, CliError, ConfigFile, RunOptions, EXIT_INSECURE, EXIT_OK, EXIT_USAGE,
};

/// Generalized KLJN key exchange: variance solver, security check and
/// Monte-Carlo eavesdropper analysis.
#[derive(Debug, Parser)]
#[command(name = "kljn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the generator variances from the four resistors and ⟨V_LA²⟩
    Solve {
        /// JSON config file
        config: PathBuf,
        /// Print 17 significant digits instead of rounded values
        #[arg(long)]
        full: bool,
    },
    /// Check the three security conditions for a set of variances
    Check {
        /// JSON config file
        config: PathBuf,
        /// Residual below which a condition counts as satisfied
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Derive the variances from v_la_variance_v2 instead of variances_v2
        #[arg(long)]
        solve: bool,
    },
    /// Run the Monte-Carlo exchange and write CSV artifacts
    Run {
        /// JSON config file
        config: PathBuf,
        /// Output directory (created if missing)
        out_dir: PathBuf,
        /// Number of bits to transfer
        #[arg(long)]
        bits: Option<usize>,
        /// Noise samples per bit
        #[arg(long)]
        samples: Option<usize>,
        /// Master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Histogram bins per indicator
        #[arg(long)]
        bins: Option<usize>,
        /// Worker threads (0 = automatic)
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Solve { config, full } => {
            solve(&ConfigFile::load(&config)?, full, &mut out)?;
            Ok(EXIT_OK)
        }
        Command::Check {
            config,
            tolerance,
            solve,
        } => {
            let pass = check(&ConfigFile::load(&config)?, tolerance, solve, &mut out)?;
            Ok(if pass { EXIT_OK } else { EXIT_INSECURE })
        }
        Command::Run {
            config,
            out_dir,
            bits,
            samples,
            seed,
            bins,
            threads,
        } => {
            let opts = RunOptions {
                bits,
                samples,
                seed,
                bins,
                threads,
            };
            let summary = run(&ConfigFile::load(&config)?, &opts, &out_dir)?;
            for e in &summary.ber {
                writeln!(
                    out,
                    "{:<18} ber {:7.3}%  leak {:6.3}%",
                    e.indicator.name(),
                    e.ber * 100.0,
                    e.leak * 100.0
                )
                .map_err(|e| CliError::io("<stdout>", e))?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
