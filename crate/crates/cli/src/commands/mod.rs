//! The five pipeline subcommands. Each one validates the config fully,
//! computes in memory, and only then writes its output files, so a failing
//! run never leaves partial outputs behind.

pub mod dynamics;
pub mod ingest;
pub mod lattice;
pub mod mine;
pub mod rules;

use std::path::{Path, PathBuf};

use trendmine::corpus::{read_transactions_csv, read_vocabulary_json};
use trendmine::{Error, Result, Transaction, Vocabulary};

pub const TRANSACTIONS_FILE: &str = "transactions.csv";
pub const VOCABULARY_FILE: &str = "vocabulary.json";
pub const FREQUENT_FILE: &str = "frequent.csv";
pub const RULES_CSV_FILE: &str = "rules.csv";
pub const RULES_JSON_FILE: &str = "rules.json";
pub const LATTICE_DOT_FILE: &str = "lattice.dot";
pub const CONCEPTS_FILE: &str = "concepts.json";
pub const QUERY_FILE: &str = "query.json";
pub const SERIES_FILE: &str = "series.csv";
pub const MARKERS_FILE: &str = "markers.json";

/// Reads the ingest outputs that downstream subcommands consume.
pub fn load_ingested(out_dir: &Path) -> Result<(Vocabulary, Vec<Transaction>)> {
    let vocab = read_vocabulary_json(&out_dir.join(VOCABULARY_FILE))?;
    let transactions = read_transactions_csv(&out_dir.join(TRANSACTIONS_FILE), &vocab)?;
    Ok((vocab, transactions))
}

pub fn ensure_out_dir(out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))
}

pub fn write_file(path: &PathBuf, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}
