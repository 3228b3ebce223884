//! `rnajoint`: exact and asymptotic enumeration of RNA-RNA joint structures.

mod commands;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use commands::{Format, Output, ShapeMethod};
use rnajoint::oracle::default_cap;
use rnajoint::{DEFAULT_ORDER, DEFAULT_PRECISION_BITS};

#[derive(Parser, Debug)]
#[command(name = "rnajoint", version, about = "Enumerate sigma-canonical RNA-RNA joint structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output format; each command picks its own default.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficients of the secondary structure generating function.
    Secondary {
        #[arg(long, default_value_t = 1)]
        sigma: u32,
        /// Minimum arc length; defaults to sigma + 2.
        #[arg(long)]
        lambda: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Number of joint structures of each size `s = n + m`.
    Joint {
        #[arg(long, default_value_t = 1)]
        sigma: u32,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Shape counts by interior arcs, exterior arcs and class refinement.
    Shapes {
        /// Largest total arc count `t + h`.
        #[arg(long, default_value_t = 8)]
        order: u32,
        #[arg(long, value_enum, default_value_t = ShapeMethod::Closed)]
        method: ShapeMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Dominant singularity and leading constant of the joint counts.
    Asym {
        #[arg(long, default_value_t = 1)]
        sigma: u32,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
        precision_bits: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Compare brute-force enumeration against the generating function.
    Validate {
        #[arg(long, default_value_t = 1)]
        sigma: u32,
        /// Largest size to enumerate; defaults to the oracle cap for sigma.
        #[arg(long)]
        max_size: Option<usize>,
        /// Override the oracle size cap.
        #[arg(long)]
        oracle_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact counts next to the asymptotic formula, for plotting.
    Plot {
        #[arg(long, default_value_t = 2)]
        sigma: u32,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
        precision_bits: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn check_precision(bits: usize) -> Result<()> {
    if bits < 64 {
        bail!("--precision-bits must be at least 64, got {bits}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(Output, Option<PathBuf>)> {
    let (output, out) = match cli.command {
        Command::Secondary { sigma, lambda, order, common } => {
            (commands::secondary(sigma, lambda, order, common.format.unwrap_or(Format::Csv))?, common.out)
        }
        Command::Joint { sigma, order, common } => {
            (commands::joint(sigma, order, common.format.unwrap_or(Format::Csv))?, common.out)
        }
        Command::Shapes { order, method, common } => {
            (commands::shapes(order, method, common.format.unwrap_or(Format::Csv))?, common.out)
        }
        Command::Asym { sigma, order, precision_bits, common } => {
            check_precision(precision_bits)?;
            (commands::asym(sigma, order, precision_bits, common.format.unwrap_or(Format::Json))?, common.out)
        }
        Command::Validate { sigma, max_size, oracle_cap, common } => {
            let cap = oracle_cap.unwrap_or_else(|| default_cap(sigma));
            let max_size = max_size.unwrap_or(cap);
            (commands::validate(sigma, max_size, cap, common.format.unwrap_or(Format::Json))?, common.out)
        }
        Command::Plot { sigma, order, precision_bits, common } => {
            check_precision(precision_bits)?;
            (commands::plot(sigma, order, precision_bits, common.format.unwrap_or(Format::Csv))?, common.out)
        }
    };
    Ok((output, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (output, out) = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    let written = match &out {
        Some(path) => fs::write(path, &output.text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(output.text.as_bytes()).context("writing stdout"),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if output.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: consistency check failed");
        ExitCode::FAILURE
    }
}
