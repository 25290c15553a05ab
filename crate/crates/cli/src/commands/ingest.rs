//! `trendmine ingest`: corpus file in, transactions CSV and vocabulary JSON
//! out, with record/transaction/reject counts on stdout.

use std::path::Path;

use trendmine::corpus::{
    build_transactions, build_vocabulary, filter_by_keywords, load_corpus, write_transactions_csv,
    write_vocabulary_json,
};
use trendmine::Result;

use crate::config::PipelineConfig;

use super::{ensure_out_dir, TRANSACTIONS_FILE, VOCABULARY_FILE};

pub fn run(config: &PipelineConfig, out_dir: &Path) -> Result<()> {
    let load = load_corpus(&config.input_path(), config.input.format)?;
    let options = config.tokenize_options();
    let records = match config.keyword_set() {
        Some(keywords) => filter_by_keywords(&load.records, &keywords, options.strip_hashtags)?,
        None => load.records.clone(),
    };
    let stopwords = config.stopword_set()?;
    let frame = config.semantic_frame()?;
    let vocab = build_vocabulary(&records, config.min_count, &stopwords, &options)?;

    let (transactions, dropped_empty) = if vocab.is_empty() {
        // nothing survives the dictionary; every record drops as empty
        (Vec::new(), records.len() as u64)
    } else {
        let build = build_transactions(&records, &vocab, frame.as_ref(), &options)?;
        (build.transactions, build.dropped_empty)
    };

    ensure_out_dir(out_dir)?;
    write_transactions_csv(&transactions, &vocab, &out_dir.join(TRANSACTIONS_FILE))?;
    write_vocabulary_json(&vocab, &out_dir.join(VOCABULARY_FILE))?;

    println!(
        "records={} rejected={} kept_after_keywords={} vocabulary={} transactions={} dropped_empty={}",
        load.records.len(),
        load.rejected,
        records.len(),
        vocab.len(),
        transactions.len(),
        dropped_empty,
    );
    if transactions.is_empty() {
        eprintln!("warning: ingest produced no transactions");
    }
    Ok(())
}
