//! `trendmine rules`: association rules over the mined frequent sets,
//! sorted by support, as CSV (rounded decimals) and JSON (exact rationals).

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use trendmine::itemsets::read_frequent_csv;
use trendmine::numeric::parse_rational;
use trendmine::rules::{generate_rules, rules_to_json, sort_rules, write_rules_csv, RuleSortKey};
use trendmine::{Error, Result};

use crate::config::PipelineConfig;

use super::{ensure_out_dir, load_ingested, write_file, FREQUENT_FILE, RULES_CSV_FILE, RULES_JSON_FILE};

pub struct RulesFlags {
    pub min_confidence: Option<String>,
    pub whitelist: Option<String>,
}

pub fn run(config: &PipelineConfig, out_dir: &Path, flags: &RulesFlags) -> Result<()> {
    let (vocab, transactions) = load_ingested(out_dir)?;
    if transactions.is_empty() {
        return Err(Error::EmptyTransactions);
    }

    let path = out_dir.join(FREQUENT_FILE);
    let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
    let family = read_frequent_csv(file, &vocab, transactions.len() as u64)?;

    let mut constraints = config.rule_constraints(Some(&vocab))?;
    if let Some(text) = &flags.min_confidence {
        constraints.min_confidence = parse_rational(text)?;
    }
    if let Some(list) = &flags.whitelist {
        constraints.consequent_whitelist = Some(
            list.split([' ', ','])
                .filter(|s| !s.is_empty())
                .filter_map(|item| vocab.id_of(item))
                .collect(),
        );
    }
    constraints.validate()?;

    let mut rules = generate_rules(&family, &transactions, &constraints)?;
    sort_rules(&mut rules, RuleSortKey::Support);

    ensure_out_dir(out_dir)?;
    let csv_path = out_dir.join(RULES_CSV_FILE);
    let csv_file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_rules_csv(&rules, &vocab, BufWriter::new(csv_file))?;
    write_file(&out_dir.join(RULES_JSON_FILE), &rules_to_json(&rules, &vocab)?)?;

    println!("frequent_sets={} rules={}", family.len(), rules.len());
    Ok(())
}
