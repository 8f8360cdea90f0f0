//! The `luce` command-line tool as a library.
//!
//! [`run`] parses arguments, executes one command and returns the document
//! text with an exit code, so the binary and the tests share one code path.

pub mod commands;
pub mod document;
pub mod error;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use document::{Document, Kind, FORMAT_VERSION};
pub use error::{CliError, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(
    name = "luce",
    version,
    about = "Build, check, decompose, simulate and fit random choice rules"
)]
pub struct Cli {
    /// Arithmetic for the command; defaults to that of the inputs.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the output document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    /// Independent Gumbel shocks on the log-weights.
    Gumbel,
    /// Utility order first, Gumbel draw to break its ties.
    Lex,
    /// Bounded independent shocks around the utility.
    Rum,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check axioms on a rule; exits 1 if any requested axiom fails.
    Check {
        rule: PathBuf,
        /// Comma-separated axiom names, or `all`. Defaults to every axiom except
        /// positivity and full-support.
        #[arg(long, value_delimiter = ',')]
        axioms: Vec<String>,
    },
    /// Recover the support correspondence and weights of a rule.
    Decompose { rule: PathBuf },
    /// Build a rule from weights and an optional support or utility.
    Synthesize {
        #[command(flatten)]
        model: ModelInputs,
        #[arg(long, conflicts_with_all = ["utility", "family"])]
        correspondence: Option<PathBuf>,
        /// Noise level of the smoothed logit; requires --utility.
        #[arg(long, requires = "utility")]
        lambda: Option<f64>,
    },
    /// Sample top choices from a random preference model.
    Simulate {
        #[command(flatten)]
        model: ModelInputs,
        #[arg(long = "model", value_enum, default_value_t = ModelArg::Gumbel)]
        kind: ModelArg,
        /// Draws per choice set.
        #[arg(long)]
        draws: u64,
    },
    /// Estimate the support and log-weights from a dataset.
    Fit {
        dataset: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        pseudo_count: f64,
    },
    /// Distances of smoothed logit rules to their zero-noise limit.
    Limit {
        #[command(flatten)]
        model: ModelInputs,
        /// Strictly decreasing noise levels.
        #[arg(long, value_delimiter = ',', required = true)]
        schedule: Vec<f64>,
    },
}

#[derive(Debug, Args)]
pub struct ModelInputs {
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long)]
    pub utility: Option<PathBuf>,
    /// `all`, `pairs`, or a JSON file holding an array of label arrays.
    #[arg(long)]
    pub family: Option<String>,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// Document text, already written to `--out` when that flag is given;
    /// empty on usage errors.
    pub output: String,
    /// Diagnostics for standard error.
    pub message: String,
    pub code: i32,
    /// Whether `output` still needs printing to standard output.
    pub to_stdout: bool,
}

fn write_out(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => Ok(()),
    }
}

/// Runs the tool on `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return Outcome {
                output: if code == EXIT_OK {
                    e.to_string()
                } else {
                    String::new()
                },
                message: if code == EXIT_OK {
                    String::new()
                } else {
                    e.to_string()
                },
                code,
                to_stdout: true,
            };
        }
    };
    let result = commands::execute(&cli).and_then(|(doc, code)| {
        let text = doc.to_json();
        write_out(&cli, &text)?;
        Ok((text, code))
    });
    match result {
        Ok((output, code)) => Outcome {
            output,
            message: String::new(),
            code,
            to_stdout: cli.out.is_none(),
        },
        Err(e) => Outcome {
            output: String::new(),
            message: format!("error ({}): {e}\n", e.kind()),
            code: e.exit_code(),
            to_stdout: false,
        },
    }
}
