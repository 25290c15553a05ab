//! Corpus ingestion: timestamped message records, tokenization, frequency
//! dictionary, stopword and semantic-frame filtering, and transaction
//! building.
//!
//! A transaction is a message reduced to the set of its retained vocabulary
//! items, in canonical (ascending item id) order. Everything downstream —
//! itemset mining, rule generation, lattices, dynamics — consumes the
//! transaction set produced here.

mod io;

pub use io::{
    load_corpus, load_semantic_frame, load_stopwords, read_transactions_csv, read_vocabulary_json,
    write_jsonl, write_transactions_csv, write_vocabulary_json, CorpusFormat,
};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use chrono::{DateTime, Datelike, Utc};

use crate::error::{Error, Result};

/// One raw message: opaque id, parse-validated timestamp, raw text.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageRecord {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
}

/// Frequency dictionary mapping item strings to dense ids.
///
/// Ids are assigned in descending occurrence-count order, ties broken
/// lexicographically, after stopword removal and min-count pruning.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocabulary {
    items: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn from_entries(entries: Vec<(String, u64)>) -> Self {
        let mut index = HashMap::with_capacity(entries.len());
        let mut items = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        for (pos, (item, count)) in entries.into_iter().enumerate() {
            index.insert(item.clone(), pos as u32);
            items.push(item);
            counts.push(count);
        }
        Vocabulary {
            items,
            counts,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn id_of(&self, item: &str) -> Option<u32> {
        self.index.get(item).copied()
    }

    pub fn item(&self, id: u32) -> Option<&str> {
        self.items.get(id as usize).map(String::as_str)
    }

    pub fn count(&self, id: u32) -> Option<u64> {
        self.counts.get(id as usize).copied()
    }

    /// Entries in id order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &str, u64)> {
        self.items
            .iter()
            .zip(&self.counts)
            .enumerate()
            .map(|(id, (item, &count))| (id as u32, item.as_str(), count))
    }

    /// Renders item ids as their strings, sorted lexicographically — the
    /// canonical presentation for CSV cells and DOT labels.
    pub fn render_items(&self, ids: &[u32]) -> Vec<String> {
        let mut names: Vec<String> = ids
            .iter()
            .map(|&id| {
                self.item(id)
                    .map(str::to_owned)
                    .unwrap_or_else(|| format!("<{id}>"))
            })
            .collect();
        names.sort();
        names
    }
}

/// Named thematic fields, each a non-empty set of item strings. When a frame
/// is active, only items inside the union of its fields survive transaction
/// building.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticFrame {
    fields: BTreeMap<String, BTreeSet<String>>,
}

impl SemanticFrame {
    pub fn new(fields: BTreeMap<String, BTreeSet<String>>) -> Result<Self> {
        for (name, items) in &fields {
            if items.is_empty() {
                return Err(Error::invalid_param(format!(
                    "semantic frame field {name:?} is empty"
                )));
            }
        }
        Ok(SemanticFrame { fields })
    }

    pub fn fields(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.fields
    }

    /// Union of all field item sets: the retained vocabulary under the frame.
    pub fn union(&self) -> BTreeSet<&str> {
        self.fields
            .values()
            .flat_map(|items| items.iter().map(String::as_str))
            .collect()
    }

    pub fn contains(&self, item: &str) -> bool {
        self.fields.values().any(|items| items.contains(item))
    }
}

/// One message reduced to a set of vocabulary ids plus its timestamp.
/// `items` is non-empty, sorted ascending and duplicate-free.
#[derive(Debug, Clone, PartialEq)]
pub struct Transaction {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub items: Vec<u32>,
}

impl Transaction {
    pub fn new(id: impl Into<String>, timestamp: DateTime<Utc>, mut items: Vec<u32>) -> Self {
        items.sort_unstable();
        items.dedup();
        Transaction {
            id: id.into(),
            timestamp,
            items,
        }
    }

    pub fn contains_all(&self, items: &[u32]) -> bool {
        contains_sorted(&self.items, items)
    }
}

/// Merge-scan subset test over two ascending id slices.
pub(crate) fn contains_sorted(haystack: &[u32], needles: &[u32]) -> bool {
    let mut pos = 0;
    for &needle in needles {
        while pos < haystack.len() && haystack[pos] < needle {
            pos += 1;
        }
        if pos == haystack.len() || haystack[pos] != needle {
            return false;
        }
        pos += 1;
    }
    true
}

/// Tokenization switches shared by vocabulary building and transaction
/// building, so both sides see the same token stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenizeOptions {
    /// Strip a single leading `#` from each token.
    pub strip_hashtags: bool,
    /// Append the record's own UTC date as an extra item, in `aug_04` form
    /// (three-letter month, zero-padded day).
    pub inject_date_items: bool,
}

impl Default for TokenizeOptions {
    fn default() -> Self {
        TokenizeOptions {
            strip_hashtags: true,
            inject_date_items: false,
        }
    }
}

/// Lowercases, splits on any character outside `[a-z0-9_#]`, optionally
/// strips one leading `#`, and drops empty tokens.
pub fn tokenize(text: &str, strip_hashtags: bool) -> Vec<String> {
    let lowered = text.to_lowercase();
    lowered
        .split(|c: char| !matches!(c, 'a'..='z' | '0'..='9' | '_' | '#'))
        .filter_map(|raw| {
            let token = if strip_hashtags {
                raw.strip_prefix('#').unwrap_or(raw)
            } else {
                raw
            };
            (!token.is_empty()).then(|| token.to_owned())
        })
        .collect()
}

/// The date item injected for a record: `aug_04` for August 4.
pub fn date_item(timestamp: DateTime<Utc>) -> String {
    const MONTHS: [&str; 12] = [
        "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
    ];
    format!(
        "{}_{:02}",
        MONTHS[timestamp.month0() as usize],
        timestamp.day()
    )
}

/// Full token stream of a record under the given options.
pub fn record_tokens(record: &MessageRecord, options: &TokenizeOptions) -> Vec<String> {
    let mut tokens = tokenize(&record.text, options.strip_hashtags);
    if options.inject_date_items {
        tokens.push(date_item(record.timestamp));
    }
    tokens
}

/// Retains exactly the records whose tokenized text contains at least one
/// keyword, preserving order. Date injection plays no part here: keyword
/// membership is about the message text.
pub fn filter_by_keywords(
    records: &[MessageRecord],
    keywords: &HashSet<String>,
    strip_hashtags: bool,
) -> Result<Vec<MessageRecord>> {
    if keywords.is_empty() {
        return Err(Error::invalid_param("keyword set is empty"));
    }
    Ok(records
        .iter()
        .filter(|record| {
            tokenize(&record.text, strip_hashtags)
                .iter()
                .any(|token| keywords.contains(token))
        })
        .cloned()
        .collect())
}

/// Builds the frequency dictionary: counts every token occurrence over all
/// records, drops stopwords, prunes items occurring fewer than `min_count`
/// times, and assigns dense ids in descending-count order (ties broken
/// lexicographically).
pub fn build_vocabulary(
    records: &[MessageRecord],
    min_count: u64,
    stopwords: &HashSet<String>,
    options: &TokenizeOptions,
) -> Result<Vocabulary> {
    if min_count < 1 {
        return Err(Error::invalid_param("min_count must be at least 1"));
    }
    let mut occurrences: HashMap<String, u64> = HashMap::new();
    for record in records {
        for token in record_tokens(record, options) {
            *occurrences.entry(token).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(String, u64)> = occurrences
        .into_iter()
        .filter(|(token, count)| *count >= min_count && !stopwords.contains(token))
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(Vocabulary::from_entries(entries))
}

/// Result of transaction building: the transactions plus the count of
/// records whose baskets came out empty and were dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionBuild {
    pub transactions: Vec<Transaction>,
    pub dropped_empty: u64,
}

/// Reduces each record to the set of its vocabulary-resolvable tokens.
/// When `frame` is supplied, tokens outside the frame union are dropped
/// first. Records whose baskets end up empty are discarded and counted;
/// record order is preserved.
pub fn build_transactions(
    records: &[MessageRecord],
    vocab: &Vocabulary,
    frame: Option<&SemanticFrame>,
    options: &TokenizeOptions,
) -> Result<TransactionBuild> {
    if vocab.is_empty() {
        return Err(Error::invalid_param("vocabulary is empty"));
    }
    let mut transactions = Vec::with_capacity(records.len());
    let mut dropped_empty = 0u64;
    for record in records {
        let items: Vec<u32> = record_tokens(record, options)
            .into_iter()
            .filter(|token| frame.map_or(true, |f| f.contains(token)))
            .filter_map(|token| vocab.id_of(&token))
            .collect();
        if items.is_empty() {
            dropped_empty += 1;
            continue;
        }
        transactions.push(Transaction::new(
            record.id.clone(),
            record.timestamp,
            items,
        ));
    }
    Ok(TransactionBuild {
        transactions,
        dropped_empty,
    })
}
