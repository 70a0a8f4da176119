use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod certfile;
mod commands;
mod json;

/// Exact classification and sum-of-squares tools for surface germs
/// `z² = F(x, y)` over the rationals.
#[derive(Parser, Debug)]
#[command(name = "sumsq", version)]
struct Cli {
    /// Emit JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Working truncation; defaults to max(2·deg + 4, 12).
    #[arg(long, global = true, env = "SUMSQ_TRUNC", value_parser = clap::value_parser!(u32).range(1..))]
    trunc: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Normal form of F and whether every psd element is a sum of squares.
    Classify { f: String },
    /// Sufficient determinacy order of f.
    Determinacy {
        f: String,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
        max_k: u32,
    },
    /// Coordinate change and unit with f ≡ u · g(φ) modulo m^N.
    Witness {
        f: String,
        g: String,
        #[arg(short, long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(short = 'n', long = "order", value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
    },
    /// Weierstrass preparation in the given variable.
    Weierstrass {
        f: String,
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Is a0 + a1 z + a2 z² positive semidefinite?
    PsdCheck { a0: String, a1: String, a2: String },
    /// Sturm sequence and number of distinct real roots.
    Sturm {
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<String>,
    },
    /// Remove the factor h^(2r) from a certificate file.
    EraseDenominators { cert_file: std::path::PathBuf },
    /// Run `classify` or `determinacy` on every line of a file.
    Batch {
        file: std::path::PathBuf,
        #[arg(long, default_value = "classify", value_parser = ["classify", "determinacy"])]
        command: String,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
        max_k: u32,
    },
}

/// Global options shared by every subcommand.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub json: bool,
    pub trunc: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options { json: cli.json, trunc: cli.trunc };
    match commands::run(&cli.command, opts) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("{}", commands::describe_error(&e, opts.json));
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
