//! `gennd`: check, analyze, normalize and fuzz deductions with general
//! introduction and elimination rules.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gennd_core::normalize::Strategy;

#[derive(Parser)]
#[command(
    name = "gennd",
    version,
    about = "Natural deduction with general introduction and elimination rules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub machine: bool,
    /// Reject equality eliminations whose two terms coincide.
    #[arg(long, global = true)]
    pub strict_eq: bool,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a deduction against the rules.
    Check {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Report rank, redexes, branches and the subformula property.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Reduce a deduction to normal form.
    Normalize {
        file: PathBuf,
        /// official, simultaneous or unique.
        #[arg(long, default_value = "official")]
        strategy: Strategy,
        /// Write the reduction trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Step budget (default 10·n² for n nodes).
        #[arg(long)]
        max_steps: Option<usize>,
        /// Write the normal form here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Extract the disjunct or witness of a closed proof.
    Extract {
        file: PathBuf,
        /// Write the extracted proof here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant battery over generated deductions.
    Fuzz {
        /// Number of seeds.
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        max_nodes: usize,
        /// Strategy to normalize with; all three when omitted.
        #[arg(long)]
        strategy: Option<Strategy>,
        /// Where to write the shrunk counterexample.
        #[arg(short, long, default_value = "gennd-witness.ndi")]
        output: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let color = std::env::var("GENND_COLOR")
        .map(|v| v == "1")
        .unwrap_or(false);
    let (outcome, common) = match cli.command {
        Command::Check { file, common } => (commands::check(&file, &common), common),
        Command::Analyze { file, common } => (commands::analyze(&file, &common), common),
        Command::Normalize {
            file,
            strategy,
            trace,
            max_steps,
            output,
            common,
        } => {
            let opts = commands::NormalizeOpts {
                strategy,
                trace,
                max_steps,
                output,
            };
            (commands::normalize(&file, &opts, &common), common)
        }
        Command::Extract {
            file,
            output,
            common,
        } => (commands::extract(&file, output.as_deref(), &common), common),
        Command::Fuzz {
            seeds,
            seed,
            max_nodes,
            strategy,
            output,
            common,
        } => {
            let opts = commands::FuzzOpts {
                seeds,
                first_seed: seed,
                max_nodes,
                strategy,
                output,
            };
            (commands::fuzz(&opts, &common), common)
        }
    };
    let report = &outcome.report;
    let text = if common.machine {
        report.to_json() + "\n"
    } else {
        report.to_text(color)
    };
    match &outcome.stdout {
        Some(deduction) => {
            print!("{deduction}");
            eprint!("{text}");
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.status.exit_code())
}
