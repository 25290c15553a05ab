//! File formats for corpus ingestion and transaction exchange.
//!
//! - JSONL input: one `{"id", "timestamp", "text"}` object per line.
//! - CSV input: header `id,timestamp,text`, RFC-4180 quoting.
//! - Transaction CSV: `id,timestamp,items` with items space-joined and
//!   lexicographically sorted.
//! - Vocabulary JSON, semantic-frame JSON, stopword list (one per line).

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use super::{MessageRecord, SemanticFrame, Transaction, Vocabulary};
use crate::error::{Error, Result};

/// Input corpus encodings accepted by `load_corpus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

/// Records retained from a corpus file plus the number of rejected lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusLoad {
    pub records: Vec<MessageRecord>,
    pub rejected: u64,
}

/// Parses an ISO-8601 timestamp: RFC 3339, or a naive `YYYY-MM-DDTHH:MM:SS`
/// (space separator also accepted) taken as UTC.
pub(crate) fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    if let Ok(ts) = DateTime::parse_from_rfc3339(raw) {
        return Some(ts.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(Utc.from_utc_datetime(&naive));
        }
    }
    None
}

pub(crate) fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    timestamp: String,
    text: String,
}

/// Loads all parseable records in file order; malformed lines, unparseable
/// timestamps and duplicate ids are skipped and counted. An unreadable file
/// is a fatal I/O error.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<CorpusLoad> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        CorpusFormat::Jsonl => load_jsonl(path, file),
        CorpusFormat::Csv => load_csv(path, file),
    }
}

fn load_jsonl(path: &Path, file: File) -> Result<CorpusLoad> {
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut rejected = 0u64;
    let mut seen_ids: HashSet<String> = HashSet::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = match serde_json::from_str(&line) {
            Ok(raw) => raw,
            Err(_) => {
                rejected += 1;
                continue;
            }
        };
        match accept(raw, &mut seen_ids) {
            Some(record) => records.push(record),
            None => rejected += 1,
        }
    }
    Ok(CorpusLoad { records, rejected })
}

fn load_csv(_path: &Path, file: File) -> Result<CorpusLoad> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::format("csv corpus", e.to_string()))?
        .clone();
    let expected = ["id", "timestamp", "text"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::format(
            "csv corpus",
            format!("header must be id,timestamp,text (got {headers:?})"),
        ));
    }
    let mut records = Vec::new();
    let mut rejected = 0u64;
    let mut seen_ids: HashSet<String> = HashSet::new();
    for row in reader.records() {
        let row = match row {
            Ok(row) => row,
            Err(_) => {
                rejected += 1;
                continue;
            }
        };
        if row.len() != 3 {
            rejected += 1;
            continue;
        }
        let raw = RawRecord {
            id: row[0].to_owned(),
            timestamp: row[1].to_owned(),
            text: row[2].to_owned(),
        };
        match accept(raw, &mut seen_ids) {
            Some(record) => records.push(record),
            None => rejected += 1,
        }
    }
    Ok(CorpusLoad { records, rejected })
}

fn accept(raw: RawRecord, seen_ids: &mut HashSet<String>) -> Option<MessageRecord> {
    let timestamp = parse_timestamp(&raw.timestamp)?;
    if raw.id.is_empty() || !seen_ids.insert(raw.id.clone()) {
        return None; // duplicate ids are rejected at load
    }
    Some(MessageRecord {
        id: raw.id,
        timestamp,
        text: raw.text,
    })
}

/// Writes records as JSONL, one object per line. Used by the fixture kit.
pub fn write_jsonl(records: &[MessageRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for record in records {
        let line = serde_json::json!({
            "id": record.id,
            "timestamp": format_timestamp(record.timestamp),
            "text": record.text,
        });
        writeln!(writer, "{line}").map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Transaction export: `id,timestamp,items` where items is a space-joined,
/// lexicographically sorted item-string list.
pub fn write_transactions_csv(
    transactions: &[Transaction],
    vocab: &Vocabulary,
    path: &Path,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    writer
        .write_record(["id", "timestamp", "items"])
        .map_err(|e| Error::format("transactions csv", e.to_string()))?;
    for t in transactions {
        let items = vocab.render_items(&t.items).join(" ");
        writer
            .write_record([&t.id, &format_timestamp(t.timestamp), &items])
            .map_err(|e| Error::format("transactions csv", e.to_string()))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))
}

/// Reads a transaction CSV produced by `write_transactions_csv`. These are
/// pipeline-internal files, so any malformed row is a hard error.
pub fn read_transactions_csv(path: &Path, vocab: &Vocabulary) -> Result<Vec<Transaction>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let mut transactions = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::format("transactions csv", e.to_string()))?;
        if row.len() != 3 {
            return Err(Error::format(
                "transactions csv",
                format!("row {} has {} fields, expected 3", line + 2, row.len()),
            ));
        }
        let timestamp = parse_timestamp(&row[1]).ok_or_else(|| {
            Error::format(
                "transactions csv",
                format!("bad timestamp {:?} on row {}", &row[1], line + 2),
            )
        })?;
        let mut items = Vec::new();
        for token in row[2].split(' ').filter(|s| !s.is_empty()) {
            let id = vocab.id_of(token).ok_or_else(|| {
                Error::format(
                    "transactions csv",
                    format!("item {token:?} not in vocabulary (row {})", line + 2),
                )
            })?;
            items.push(id);
        }
        transactions.push(Transaction::new(row[0].to_owned(), timestamp, items));
    }
    Ok(transactions)
}

#[derive(Serialize, Deserialize)]
struct VocabEntry {
    id: u32,
    item: String,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct VocabFile {
    items: Vec<VocabEntry>,
}

pub fn write_vocabulary_json(vocab: &Vocabulary, path: &Path) -> Result<()> {
    let file = VocabFile {
        items: vocab
            .iter()
            .map(|(id, item, count)| VocabEntry {
                id,
                item: item.to_owned(),
                count,
            })
            .collect(),
    };
    let body = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::format("vocabulary json", e.to_string()))?;
    std::fs::write(path, body + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_vocabulary_json(path: &Path) -> Result<Vocabulary> {
    let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: VocabFile =
        serde_json::from_str(&body).map_err(|e| Error::format("vocabulary json", e.to_string()))?;
    for (pos, entry) in file.items.iter().enumerate() {
        if entry.id as usize != pos {
            return Err(Error::format(
                "vocabulary json",
                format!("ids must be dense and ascending (found {} at {pos})", entry.id),
            ));
        }
    }
    Ok(Vocabulary::from_entries(
        file.items
            .into_iter()
            .map(|e| (e.item, e.count))
            .collect(),
    ))
}

/// Semantic frame file: a JSON object mapping field name to an array of
/// item strings.
pub fn load_semantic_frame(path: &Path) -> Result<SemanticFrame> {
    let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: BTreeMap<String, Vec<String>> =
        serde_json::from_str(&body).map_err(|e| Error::format("semantic frame", e.to_string()))?;
    let fields: BTreeMap<String, BTreeSet<String>> = raw
        .into_iter()
        .map(|(name, items)| (name, items.into_iter().collect()))
        .collect();
    SemanticFrame::new(fields)
}

/// Stopword file: one token per line, UTF-8; blank lines ignored.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut body = String::new();
    reader
        .read_to_string(&mut body)
        .map_err(|e| Error::io(path, e))?;
    Ok(body
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty())
        .map(str::to_owned)
        .collect())
}
