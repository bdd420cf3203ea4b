//! `liptrop`: load groups, metrics and functions from JSON, run the monoid
//! operations, and drive the verification suites.

mod commands;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liptrop::group::{OrderCap, ORDER_CAP_ENV};
use liptrop::sample::SampleConfig;

#[derive(Parser)]
#[command(
    name = "liptrop",
    version,
    about = "Inf-convolution monoids over finite metric groups"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Samples per sampled check.
    #[arg(long, global = true, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Largest group order accepted by the exhaustive routines.
    #[arg(long, global = true, env = ORDER_CAP_ENV, default_value_t = OrderCap::DEFAULT.0, value_parser = positive)]
    pub order_cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn cap(&self) -> OrderCap {
        OrderCap(self.order_cap)
    }

    pub fn sampling(&self) -> SampleConfig {
        SampleConfig::new(self.seed, self.samples as usize)
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Group tables: validation, automorphisms, isomorphism.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Operations on functions over a context.
    #[command(name = "fn", subcommand)]
    Function(FnCmd),
    /// Run a verification suite over one or more contexts.
    Verify {
        /// all, monoid, units, banachstone or lemmas.
        suite: String,
        #[arg(required = true)]
        contexts: Vec<PathBuf>,
        /// Word-metric weights applied to every group file given.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum GroupCmd {
    /// Check the group axioms.
    Validate { path: PathBuf },
    /// List all automorphisms.
    Autos { path: PathBuf },
    /// Decide whether two groups are isomorphic.
    Iso { left: PathBuf, right: PathBuf },
    /// Print the table of a builtin family, e.g. `z4`, `s3`, `direct_product(z2,z2)`.
    Builtin { family: String },
}

#[derive(Args, Clone, Debug)]
pub struct ContextArgs {
    /// Group, metric or weights file.
    pub context: PathBuf,
    /// Word-metric weights for a group file.
    #[arg(long)]
    pub weights: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum FnCmd {
    /// `f ⊕ g`.
    Conv {
        #[command(flatten)]
        ctx: ContextArgs,
        f: PathBuf,
        g: PathBuf,
    },
    /// The unit group of a cone.
    Units {
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long, default_value = "lip1plus")]
        cone: String,
    },
    /// `(f − min f, min f)`.
    Tau {
        #[command(flatten)]
        ctx: ContextArgs,
        f: PathBuf,
    },
    /// The cones containing `f`.
    Classify {
        #[command(flatten)]
        ctx: ContextArgs,
        f: PathBuf,
    },
    /// `δ_e ⊕ f`.
    Regularize {
        #[command(flatten)]
        ctx: ContextArgs,
        f: PathBuf,
    },
}

/// What a command produced: both renderings and the exit status.
pub struct Output {
    pub text: String,
    pub json: serde_json::Value,
    pub code: u8,
}

/// A command that could not produce a report.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 1,
            error: error.into(),
        }
    }

    pub fn io(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 2,
            error: error.into(),
        }
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = cli.run;
    let result = match cli.command {
        Command::Group(cmd) => commands::group(cmd, &run),
        Command::Function(cmd) => commands::function(cmd, &run),
        Command::Verify {
            suite,
            contexts,
            weights,
        } => commands::verify(&suite, &contexts, weights.as_deref(), &run),
    };
    let out = match result {
        Ok(out) => out,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            return ExitCode::from(f.code);
        }
    };
    let mut rendered = match run.format {
        Format::Text => out.text,
        Format::Json => serde_json::to_string_pretty(&out.json).expect("reports serialize"),
    };
    if !rendered.ends_with('\n') {
        rendered.push('\n');
    }
    match &run.output {
        None => print!("{rendered}"),
        Some(path) => {
            if let Err(e) = write_atomically(path, rendered.as_bytes()) {
                eprintln!("error: {}: {e:#}", path.display());
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::from(out.code)
}
