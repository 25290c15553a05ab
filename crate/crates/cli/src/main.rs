//! Command-line front end for the mining pipeline: ingest, mine, rules,
//! lattice, dynamics. Identical config and inputs produce byte-identical
//! outputs.
//!
//! Exit codes: 0 success, 2 I/O or validation failure, 3 empty data,
//! 4 brute-force oracle guard, 5 lattice attribute bound.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::dynamics::DynamicsFlags;
use commands::lattice::{LatticeFlags, QueryMode};
use commands::mine::MineFlags;
use commands::rules::RulesFlags;
use config::PipelineConfig;
use trendmine::{Error, Result};

#[derive(Parser)]
#[command(name = "trendmine", version, about = "Pattern mining over timestamped short-text corpora")]
struct Cli {
    /// Pipeline configuration file (JSON)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory, overriding the config's output_dir
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed consumed by the fixture generators in the test kit; the
    /// pipeline subcommands themselves are deterministic
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load the corpus, build the vocabulary and write the transaction set
    Ingest,
    /// Mine frequent itemsets from the ingested transactions
    Mine {
        /// Use the exhaustive brute-force miner instead of Apriori
        #[arg(long)]
        oracle: bool,
        /// Override the config's minimum support (e.g. "4/616" or "0.01")
        #[arg(long, value_name = "RATIONAL")]
        min_support: Option<String>,
        /// Cap mined itemset size
        #[arg(long, value_name = "N")]
        max_length: Option<usize>,
    },
    /// Generate association rules from the mined frequent sets
    Rules {
        /// Override the config's minimum confidence
        #[arg(long, value_name = "RATIONAL")]
        min_confidence: Option<String>,
        /// Restrict consequents to these items (space or comma separated)
        #[arg(long, value_name = "ITEMS")]
        whitelist: Option<String>,
    },
    /// Build the concept lattice; optionally query a concept by intent
    Lattice {
        /// Space-separated item list whose closure to look up
        #[arg(long, value_name = "ITEMS")]
        query: Option<String>,
        /// With --query: also list the order ideal or order filter
        #[arg(long, value_enum)]
        mode: Option<QueryMode>,
        /// Override the lattice attribute bound
        #[arg(long, value_name = "N")]
        max_attributes: Option<usize>,
    },
    /// Time-windowed support/confidence series with marker detection
    Dynamics {
        /// Itemset target for a support series (space-separated items)
        #[arg(long, value_name = "ITEMS")]
        items: Option<String>,
        /// Rule antecedent for a confidence series
        #[arg(long, value_name = "ITEMS")]
        antecedent: Option<String>,
        /// Rule consequent for a confidence series
        #[arg(long, value_name = "ITEMS")]
        consequent: Option<String>,
        /// Threshold for up-crossing markers (e.g. "0.95")
        #[arg(long, value_name = "RATIONAL")]
        threshold: Option<String>,
        /// Override the window length (e.g. "1d", "6h")
        #[arg(long, value_name = "DURATION")]
        window_length: Option<String>,
        /// Override the window step
        #[arg(long, value_name = "DURATION")]
        step: Option<String>,
    },
}

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::EmptyTransactions | Error::NoDefinedPoints => 3,
        Error::OracleGuard { .. } => 4,
        Error::AttributeBound { .. } => 5,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<()> {
    let config_path = cli
        .config
        .ok_or_else(|| Error::invalid_param("--config is required"))?;
    let config = PipelineConfig::load(&config_path)?;
    let out_dir = config.output_dir(cli.out.as_deref());

    match cli.command {
        Command::Ingest => commands::ingest::run(&config, &out_dir),
        Command::Mine {
            oracle,
            min_support,
            max_length,
        } => commands::mine::run(
            &config,
            &out_dir,
            &MineFlags {
                oracle,
                min_support,
                max_length,
            },
        ),
        Command::Rules {
            min_confidence,
            whitelist,
        } => commands::rules::run(
            &config,
            &out_dir,
            &RulesFlags {
                min_confidence,
                whitelist,
            },
        ),
        Command::Lattice {
            query,
            mode,
            max_attributes,
        } => commands::lattice::run(
            &config,
            &out_dir,
            &LatticeFlags {
                query,
                mode,
                max_attributes,
            },
        ),
        Command::Dynamics {
            items,
            antecedent,
            consequent,
            threshold,
            window_length,
            step,
        } => commands::dynamics::run(
            &config,
            &out_dir,
            &DynamicsFlags {
                items,
                antecedent,
                consequent,
                threshold,
                window_length,
                step,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code(&error))
        }
    }
}
