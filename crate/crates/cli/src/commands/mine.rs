//! `trendmine mine`: frequent itemsets from the ingested transactions, via
//! Apriori or (with `--oracle`) the brute-force reference.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use trendmine::itemsets::{apriori, brute_force_frequent, write_frequent_csv};
use trendmine::numeric::parse_rational;
use trendmine::{Error, Result};

use crate::config::PipelineConfig;

use super::{ensure_out_dir, load_ingested, FREQUENT_FILE};

pub struct MineFlags {
    pub oracle: bool,
    pub min_support: Option<String>,
    pub max_length: Option<usize>,
}

pub fn run(config: &PipelineConfig, out_dir: &Path, flags: &MineFlags) -> Result<()> {
    let mut params = config.mining_params()?;
    if let Some(text) = &flags.min_support {
        params.min_support = parse_rational(text)?;
    }
    if let Some(cap) = flags.max_length {
        params.max_length = Some(cap);
    }
    params.validate()?;

    let (vocab, transactions) = load_ingested(out_dir)?;
    if transactions.is_empty() {
        return Err(Error::EmptyTransactions);
    }

    let family = if flags.oracle {
        brute_force_frequent(&transactions, &params)?
    } else {
        apriori(&transactions, &params)?
    };

    ensure_out_dir(out_dir)?;
    let path = out_dir.join(FREQUENT_FILE);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_frequent_csv(&family, &vocab, BufWriter::new(file))?;

    println!(
        "transactions={} frequent_sets={} min_support={}",
        transactions.len(),
        family.len(),
        params.min_support,
    );
    Ok(())
}
