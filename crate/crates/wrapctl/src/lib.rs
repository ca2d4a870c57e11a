//! `wrapctl`: run, translate, check, diff and benchmark tree wrappers.
//!
//! The wrapper language comes from the file extension alone: `.rpn`,
//! `.hel`, `.vhel` or `.elog`. Exit codes are [`EXIT_OK`],
//! [`EXIT_WRAPPER`], [`EXIT_DOCUMENT`] and [`EXIT_DIVERGENCE`].

mod commands;
pub mod wrapper;

use std::fmt;
use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use wrapcore::hel::SingleValue;

pub use commands::{bench, BenchReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_WRAPPER: u8 = 1;
pub const EXIT_DOCUMENT: u8 = 2;
pub const EXIT_DIVERGENCE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "wrapctl", version, about = "Run, translate, check and diff tree wrappers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a wrapper on a document.
    Run {
        wrapper: PathBuf,
        document: PathBuf,
        /// Default: json for rpn/hel/vhel, atoms for elog.
        #[arg(long, value_enum)]
        out: Option<OutMode>,
        #[command(flatten)]
        mode: ModeArgs,
        /// Honour `!` cut marks (hel/vhel only).
        #[arg(long)]
        cut: bool,
    },
    /// Print a wrapper in another language.
    Translate {
        wrapper: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Parse and validate a wrapper, and optionally run it on a document.
    Check { wrapper: PathBuf, document: Option<PathBuf> },
    /// Compare two wrappers on a document or on generated documents.
    Diff {
        a: PathBuf,
        b: PathBuf,
        #[arg(required_unless_present = "generate")]
        document: Option<PathBuf>,
        /// Compare on N seeded random documents instead.
        #[arg(long, value_name = "N", conflicts_with = "document")]
        generate: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Time the quadratic-fixpoint family: a chain of m `b` elements above
    /// n `l` leaves.
    Bench {
        #[arg(value_enum, default_value_t = Family::Quadratic)]
        family: Family,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

#[derive(Debug, Clone, Copy, clap::Args)]
pub struct ModeArgs {
    /// Fail when a HEL condition path reaches several nodes (default for
    /// run and check).
    #[arg(long, overrides_with = "lenient")]
    strict: bool,
    /// Accept a condition if any reached node satisfies it (default for
    /// diff).
    #[arg(long, overrides_with = "strict")]
    lenient: bool,
}

impl ModeArgs {
    pub fn single_value(self, default: SingleValue) -> SingleValue {
        match (self.strict, self.lenient) {
            (true, _) => SingleValue::Strict,
            (_, true) => SingleValue::Lenient,
            _ => default,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutMode {
    Json,
    Atoms,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Vhel,
    Elog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Quadratic,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn wrapper(error: impl Into<anyhow::Error>) -> Self {
        CliError { code: EXIT_WRAPPER, error: error.into() }
    }

    pub fn document(error: impl Into<anyhow::Error>) -> Self {
        CliError { code: EXIT_DOCUMENT, error: error.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::wrapper(e)
    }
}

/// ANSI styling: off when `WRAPCTL_COLOR=0`, forced by `WRAPCTL_COLOR=1`,
/// otherwise on for terminals.
#[derive(Clone, Copy, Debug)]
pub struct Style {
    pub color: bool,
}

impl Style {
    pub fn from_env() -> Style {
        let color = match std::env::var("WRAPCTL_COLOR").as_deref() {
            Ok("0") => false,
            Ok("1") => true,
            _ => io::stdout().is_terminal(),
        };
        Style { color }
    }

    pub fn good(self, s: &str) -> String {
        self.paint("32", s)
    }

    pub fn bad(self, s: &str) -> String {
        self.paint("31", s)
    }

    fn paint(self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

/// Runs one command, writing its report to `out`. A divergence found by
/// `diff` is reported on `out` and returned as exit code 3.
pub fn execute(cli: Cli, out: &mut dyn Write, style: Style) -> Result<u8, CliError> {
    match cli.command {
        Command::Run { wrapper, document, out: mode, mode: m, cut } => {
            commands::run(&wrapper, &document, mode, m.single_value(SingleValue::Strict), cut, out)
        }
        Command::Translate { wrapper, to } => commands::translate(&wrapper, to, out),
        Command::Check { wrapper, document } => commands::check(&wrapper, document.as_deref(), out, style),
        Command::Diff { a, b, document, generate, seed, mode } => {
            let source = match (document, generate) {
                (_, Some(n)) => commands::DiffSource::Generate { n, seed },
                (Some(d), None) => commands::DiffSource::Document(d),
                (None, None) => unreachable!("clap requires one of the two"),
            };
            commands::diff(&a, &b, source, mode.single_value(SingleValue::Lenient), out, style)
        }
        Command::Bench { family: Family::Quadratic, m, n } => {
            let r = bench(m as usize, n as usize);
            writeln!(out, "quadratic m={m} n={n}: {} p-atoms in {:.3} ms", r.atoms, r.elapsed.as_secs_f64() * 1e3)?;
            Ok(EXIT_OK)
        }
    }
}
