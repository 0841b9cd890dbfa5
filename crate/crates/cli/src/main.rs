//! `gradedpi` — exact computations with finite-dimensional graded algebras.
//!
//! Every subcommand reads named objects from `--spec` JSON files, runs one
//! computation, and prints a canonical JSON report (sorted keys, exact
//! numbers as strings) to stdout.  Exit codes: 0 for a clean verdict, 2 when
//! the verdict is negative (identity violated, audit failed, comparison
//! strict), 1 for input errors.  Reports are byte-identical across runs and
//! worker counts.

mod commands;
mod report;
mod workspace;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::Value;

use workspace::{err, CliError};

#[derive(Parser)]
#[command(name = "gradedpi", version, about = "Exact graded-algebra and identity computations")]
struct Cli {
    /// Spec file defining named groups, cocycles, algebras, and polynomials
    /// (repeatable; later files extend the namespace).
    #[arg(long = "spec", global = true, value_name = "FILE")]
    spec: Vec<PathBuf>,
    /// Worker threads (default: the GRADEDPI_WORKERS environment variable,
    /// then all cores).  Reports do not depend on this.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load every spec object, constructing and validating each.
    Validate,
    /// Jacobson radical data: evaluation basis, dimensions, nilpotency index.
    Radical {
        #[arg(long)]
        algebra: String,
    },
    /// Structural parameters: semisimple dimensions and radical nilpotency.
    Gpar {
        #[arg(long)]
        algebra: String,
    },
    /// Decide whether a polynomial is a graded identity of an algebra.
    Check {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        poly: String,
    },
    /// Basis of the multilinear identity layer at the polynomial's profile.
    Kernel {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        poly: String,
    },
    /// Compare the identity ideals of two algebras up to a degree bound.
    Compare {
        #[arg(long = "algebra", required = true)]
        algebras: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Check Capelli identities and non-identities component by component.
    CapelliAudit {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
    },
    /// Kemer-point bounds: one algebra for a lower-bound search, several for
    /// a direct-product consistency check.
    Kemer {
        #[arg(long = "algebra", required = true)]
        algebras: Vec<String>,
        #[arg(long, default_value_t = 1)]
        nu: usize,
        #[arg(long, default_value_t = 0)]
        border_budget: usize,
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
    },
    /// Closed-form full witness for a graded-simple algebra.
    WitnessSimple {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 1)]
        nu: usize,
    },
    /// Sweep alternating monomial consequences through the tilde and
    /// obstruction operators, reporting violations.
    ZrAudit {
        #[arg(long)]
        algebra: String,
        /// Largest alternating-set size to audit.
        #[arg(long = "max-degree", default_value_t = 2)]
        max_n: usize,
    },
    /// Verify trace-twisted evaluations against a sample of integer matrices.
    TheoremJ {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        poly: String,
    },
    /// Check that a non-identity vanishes below the radical threshold.
    PropertyK {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        poly: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Radical { .. } => "radical",
            Command::Gpar { .. } => "gpar",
            Command::Check { .. } => "check",
            Command::Kernel { .. } => "kernel",
            Command::Compare { .. } => "compare",
            Command::CapelliAudit { .. } => "capelli-audit",
            Command::Kemer { .. } => "kemer",
            Command::WitnessSimple { .. } => "witness-simple",
            Command::ZrAudit { .. } => "zr-audit",
            Command::TheoremJ { .. } => "theorem-j",
            Command::PropertyK { .. } => "property-k",
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok((value, separated)) => {
            println!("{}", report::canonical(&value));
            if separated {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: &Cli) -> Result<(Value, bool), CliError> {
    let workers = resolve_workers(cli.workers)?;
    let ws = workspace::load(&cli.spec)?;
    let (body, separated) = with_workers(workers, || dispatch(&ws, &cli.command))?;
    Ok((report::envelope(cli.command.name(), &ws, body), separated))
}

fn dispatch(ws: &workspace::Workspace, cmd: &Command) -> Result<(Value, bool), CliError> {
    match cmd {
        Command::Validate => commands::validate(ws),
        Command::Radical { algebra } => commands::radical(ws, algebra),
        Command::Gpar { algebra } => commands::gpar(ws, algebra),
        Command::Check { algebra, poly } => commands::check(ws, algebra, poly),
        Command::Kernel { algebra, poly } => commands::kernel(ws, algebra, poly),
        Command::Compare { algebras, max_degree } => commands::compare(ws, algebras, *max_degree),
        Command::CapelliAudit { algebra, max_degree } => {
            commands::capelli_audit(ws, algebra, *max_degree)
        }
        Command::Kemer { algebras, nu, border_budget, budget } => {
            commands::kemer(ws, algebras, *nu, *border_budget, *budget)
        }
        Command::WitnessSimple { algebra, nu } => commands::witness_simple(ws, algebra, *nu),
        Command::ZrAudit { algebra, max_n } => commands::zr_audit(ws, algebra, *max_n),
        Command::TheoremJ { algebra, poly } => commands::theorem_j(ws, algebra, poly),
        Command::PropertyK { algebra, poly } => commands::property_k(ws, algebra, poly),
    }
}

/// `--workers` wins, then GRADEDPI_WORKERS; `None` keeps the ambient pool.
fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("GRADEDPI_WORKERS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                err(format!("GRADEDPI_WORKERS must be a positive integer, got {s:?}"))
            })?),
            Err(std::env::VarError::NotPresent) => None,
            Err(e) => return Err(err(e)),
        },
    };
    if n == Some(0) {
        return Err(err("worker count must be positive"));
    }
    Ok(n)
}

#[cfg(feature = "parallel")]
fn with_workers<T: Send>(workers: Option<usize>, body: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => body(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("building a thread pool cannot fail for positive sizes")
            .install(body),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_workers<T>(_workers: Option<usize>, body: impl FnOnce() -> T) -> T {
    body()
}
