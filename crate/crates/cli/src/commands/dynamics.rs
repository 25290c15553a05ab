//! `trendmine dynamics`: per-window support or confidence series for a
//! chosen itemset or rule, plus detected markers.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use trendmine::dynamics::{
    confidence_series, detect_markers, markers_to_json, support_series, write_series_csv,
};
use trendmine::numeric::parse_rational;
use trendmine::{Error, Itemset, Result, Vocabulary};

use crate::config::{parse_duration, PipelineConfig};

use super::{ensure_out_dir, load_ingested, write_file, MARKERS_FILE, SERIES_FILE};

pub struct DynamicsFlags {
    pub items: Option<String>,
    pub antecedent: Option<String>,
    pub consequent: Option<String>,
    pub threshold: Option<String>,
    pub window_length: Option<String>,
    pub step: Option<String>,
}

/// Item names to ids. Names missing from the vocabulary map to fresh ids
/// past it, so they match no transaction and the series reflects a target
/// that never occurs.
fn parse_itemset(text: &str, vocab: &Vocabulary) -> Itemset {
    let mut next_unknown = vocab.len() as u32;
    let ids = text
        .split_whitespace()
        .map(|token| {
            vocab.id_of(token).unwrap_or_else(|| {
                let id = next_unknown;
                next_unknown += 1;
                id
            })
        })
        .collect();
    Itemset::new(ids)
}

pub fn run(config: &PipelineConfig, out_dir: &Path, flags: &DynamicsFlags) -> Result<()> {
    let mut spec = config.window_spec()?;
    if let Some(text) = &flags.window_length {
        spec.window_length = parse_duration(text)?;
        spec.step = spec.window_length;
    }
    if let Some(text) = &flags.step {
        spec.step = parse_duration(text)?;
    }
    spec.validate()?;
    let threshold = flags
        .threshold
        .as_deref()
        .map(parse_rational)
        .transpose()?;

    let (vocab, transactions) = load_ingested(out_dir)?;

    let series = match (&flags.items, &flags.antecedent, &flags.consequent) {
        (Some(items), None, None) => {
            let target = parse_itemset(items, &vocab);
            if target.is_empty() {
                return Err(Error::invalid_param("--items names no items"));
            }
            support_series(&target, &transactions, &spec)?
        }
        (None, Some(antecedent), Some(consequent)) => confidence_series(
            &parse_itemset(antecedent, &vocab),
            &parse_itemset(consequent, &vocab),
            &transactions,
            &spec,
        )?,
        _ => {
            return Err(Error::invalid_param(
                "pass either --items, or both --antecedent and --consequent",
            ))
        }
    };

    let markers = detect_markers(&series, threshold)?;

    ensure_out_dir(out_dir)?;
    let path = out_dir.join(SERIES_FILE);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_series_csv(&series, BufWriter::new(file))?;
    write_file(&out_dir.join(MARKERS_FILE), &markers_to_json(&markers)?)?;

    println!("windows={} markers={}", series.len(), markers.len());
    Ok(())
}
