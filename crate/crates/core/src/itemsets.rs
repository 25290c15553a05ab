//! Frequent-itemset mining: support counting, level-wise Apriori, and an
//! independent brute-force oracle for differential verification.
//!
//! Frequency is strict: an itemset is frequent when its support is strictly
//! greater than the minimum support. Supports are exact rationals; the count
//! behind each one is kept so exports never re-round.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use num::Zero;

use crate::corpus::{contains_sorted, Transaction, Vocabulary};
use crate::error::{Error, Result};
use crate::numeric::{format_decimal, ratio, Rational};

/// Canonical itemset: strictly increasing vocabulary ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Itemset(Vec<u32>);

impl Itemset {
    pub fn new(mut ids: Vec<u32>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Itemset(ids)
    }

    pub fn items(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        contains_sorted(other.items(), self.items())
    }

    pub fn union(&self, other: &Itemset) -> Itemset {
        let mut ids = self.0.clone();
        ids.extend_from_slice(&other.0);
        Itemset::new(ids)
    }

    pub fn is_disjoint(&self, other: &Itemset) -> bool {
        let mut a = self.0.iter().peekable();
        let mut b = other.0.iter().peekable();
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

impl From<&[u32]> for Itemset {
    fn from(ids: &[u32]) -> Self {
        Itemset::new(ids.to_vec())
    }
}

/// An itemset with its containing-transaction count and relative support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequentItemset {
    pub itemset: Itemset,
    pub count: u64,
    pub support: Rational,
}

/// Mining thresholds: `min_support` must lie in `[0, 1)`; frequency uses the
/// strict comparison `support > min_support`.
#[derive(Debug, Clone, PartialEq)]
pub struct MiningParams {
    pub min_support: Rational,
    pub max_length: Option<usize>,
}

impl MiningParams {
    pub fn new(min_support: Rational, max_length: Option<usize>) -> Result<Self> {
        let params = MiningParams {
            min_support,
            max_length,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_support < Rational::zero() || self.min_support >= Rational::from_integer(1) {
            return Err(Error::invalid_param(format!(
                "min_support must be in [0, 1), got {}",
                self.min_support
            )));
        }
        if self.max_length == Some(0) {
            return Err(Error::invalid_param("max_length must be positive"));
        }
        Ok(())
    }
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams {
            min_support: Rational::zero(),
            max_length: None,
        }
    }
}

fn count_containing(itemset: &[u32], transactions: &[Transaction]) -> u64 {
    transactions
        .iter()
        .filter(|t| contains_sorted(&t.items, itemset))
        .count() as u64
}

/// Exact support of `itemset`: containing transactions over total
/// transactions. The empty itemset has support 1.
pub fn support(itemset: &Itemset, transactions: &[Transaction]) -> Result<Rational> {
    if transactions.is_empty() {
        return Err(Error::EmptyTransactions);
    }
    Ok(ratio(
        count_containing(itemset.items(), transactions),
        transactions.len() as u64,
    ))
}

fn is_frequent(count: u64, total: u64, min_support: Rational) -> bool {
    ratio(count, total) > min_support
}

/// Canonical family order: size ascending, then items lexicographic.
fn sort_family(family: &mut [FrequentItemset]) {
    family.sort_by(|a, b| {
        a.itemset
            .len()
            .cmp(&b.itemset.len())
            .then_with(|| a.itemset.items().cmp(b.itemset.items()))
    });
}

/// Level-wise Apriori. Candidates of size k are joined from frequent
/// (k-1)-sets sharing a (k-2)-prefix and pruned when any (k-1)-subset is
/// infrequent; survivors are counted against the transactions. Output is
/// exactly the family of itemsets with `support > min_support` and size at
/// most `max_length`, in canonical order.
pub fn apriori(transactions: &[Transaction], params: &MiningParams) -> Result<Vec<FrequentItemset>> {
    params.validate()?;
    if transactions.is_empty() {
        return Err(Error::EmptyTransactions);
    }
    let total = transactions.len() as u64;

    let mut singles: HashMap<u32, u64> = HashMap::new();
    for t in transactions {
        for &item in &t.items {
            *singles.entry(item).or_insert(0) += 1;
        }
    }
    let mut level: Vec<(Vec<u32>, u64)> = singles
        .into_iter()
        .filter(|&(_, count)| is_frequent(count, total, params.min_support))
        .map(|(item, count)| (vec![item], count))
        .collect();
    level.sort_by(|a, b| a.0.cmp(&b.0));

    let mut family: Vec<FrequentItemset> = Vec::new();
    let mut size = 1usize;
    while !level.is_empty() {
        family.extend(level.iter().map(|(items, count)| FrequentItemset {
            itemset: Itemset(items.clone()),
            count: *count,
            support: ratio(*count, total),
        }));
        if params.max_length.is_some_and(|cap| size >= cap) {
            break;
        }

        let previous: HashSet<&[u32]> = level.iter().map(|(items, _)| items.as_slice()).collect();
        let mut next: Vec<(Vec<u32>, u64)> = Vec::new();
        for i in 0..level.len() {
            for j in (i + 1)..level.len() {
                let (a, b) = (&level[i].0, &level[j].0);
                if a[..size - 1] != b[..size - 1] {
                    break; // level is sorted, no further prefix matches for i
                }
                let mut candidate = a.clone();
                candidate.push(b[size - 1]);
                if !prune_passes(&candidate, &previous) {
                    continue;
                }
                let count = count_containing(&candidate, transactions);
                if is_frequent(count, total, params.min_support) {
                    next.push((candidate, count));
                }
            }
        }
        next.sort_by(|a, b| a.0.cmp(&b.0));
        level = next;
        size += 1;
    }

    sort_family(&mut family);
    Ok(family)
}

/// Anti-monotone prune: every (k-1)-subset of the candidate must be frequent.
fn prune_passes(candidate: &[u32], previous: &HashSet<&[u32]>) -> bool {
    if candidate.len() <= 2 {
        return true; // both (k-1)-subsets are the joined generators
    }
    let mut subset = Vec::with_capacity(candidate.len() - 1);
    for skip in 0..candidate.len() {
        subset.clear();
        subset.extend(
            candidate
                .iter()
                .enumerate()
                .filter(|&(pos, _)| pos != skip)
                .map(|(_, &item)| item),
        );
        if !previous.contains(subset.as_slice()) {
            return false;
        }
    }
    true
}

/// Maximum distinct-item universe the brute-force oracle accepts.
pub const BRUTE_FORCE_ITEM_LIMIT: usize = 20;

/// Exhaustive oracle: enumerates every non-empty subset of the items that
/// appear in the transactions and counts each directly. Refuses item
/// universes above [`BRUTE_FORCE_ITEM_LIMIT`]. Same output contract as
/// [`apriori`].
pub fn brute_force_frequent(
    transactions: &[Transaction],
    params: &MiningParams,
) -> Result<Vec<FrequentItemset>> {
    params.validate()?;
    if transactions.is_empty() {
        return Err(Error::EmptyTransactions);
    }
    let mut universe: Vec<u32> = transactions
        .iter()
        .flat_map(|t| t.items.iter().copied())
        .collect();
    universe.sort_unstable();
    universe.dedup();
    if universe.len() > BRUTE_FORCE_ITEM_LIMIT {
        return Err(Error::OracleGuard {
            items: universe.len(),
            limit: BRUTE_FORCE_ITEM_LIMIT,
        });
    }

    let position: HashMap<u32, usize> = universe
        .iter()
        .enumerate()
        .map(|(pos, &item)| (item, pos))
        .collect();
    let masks: Vec<u32> = transactions
        .iter()
        .map(|t| {
            t.items
                .iter()
                .fold(0u32, |mask, item| mask | 1 << position[item])
        })
        .collect();

    let total = transactions.len() as u64;
    let mut family = Vec::new();
    for subset in 1u32..(1 << universe.len()) {
        let size = subset.count_ones() as usize;
        if params.max_length.is_some_and(|cap| size > cap) {
            continue;
        }
        let count = masks.iter().filter(|&&m| m & subset == subset).count() as u64;
        if is_frequent(count, total, params.min_support) {
            let items: Vec<u32> = universe
                .iter()
                .enumerate()
                .filter(|&(pos, _)| subset & (1 << pos) != 0)
                .map(|(_, &item)| item)
                .collect();
            family.push(FrequentItemset {
                itemset: Itemset(items),
                count,
                support: ratio(count, total),
            });
        }
    }
    sort_family(&mut family);
    Ok(family)
}

/// Frequent-set export: `items,count,support` with support printed to nine
/// fractional digits, round-half-even.
pub fn write_frequent_csv<W: Write>(
    family: &[FrequentItemset],
    vocab: &Vocabulary,
    writer: W,
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["items", "count", "support"])
        .map_err(|e| Error::format("frequent csv", e.to_string()))?;
    for f in family {
        csv.write_record([
            vocab.render_items(f.itemset.items()).join(" "),
            f.count.to_string(),
            format_decimal(f.support, 9),
        ])
        .map_err(|e| Error::format("frequent csv", e.to_string()))?;
    }
    csv.flush().map_err(|e| Error::format("frequent csv", e.to_string()))
}

/// Reads a frequent-set CSV back, resolving item strings through the
/// vocabulary and recomputing exact supports from counts.
pub fn read_frequent_csv<R: std::io::Read>(
    reader: R,
    vocab: &Vocabulary,
    total_transactions: u64,
) -> Result<Vec<FrequentItemset>> {
    let mut csv = csv::Reader::from_reader(reader);
    let mut family = Vec::new();
    for (line, row) in csv.records().enumerate() {
        let row = row.map_err(|e| Error::format("frequent csv", e.to_string()))?;
        if row.len() != 3 {
            return Err(Error::format(
                "frequent csv",
                format!("row {} has {} fields, expected 3", line + 2, row.len()),
            ));
        }
        let mut ids = Vec::new();
        for token in row[0].split(' ').filter(|s| !s.is_empty()) {
            let id = vocab.id_of(token).ok_or_else(|| {
                Error::format(
                    "frequent csv",
                    format!("item {token:?} not in vocabulary (row {})", line + 2),
                )
            })?;
            ids.push(id);
        }
        let count: u64 = row[1]
            .parse()
            .map_err(|_| Error::format("frequent csv", format!("bad count on row {}", line + 2)))?;
        if total_transactions == 0 {
            return Err(Error::EmptyTransactions);
        }
        family.push(FrequentItemset {
            itemset: Itemset::new(ids),
            count,
            support: ratio(count, total_transactions),
        });
    }
    Ok(family)
}
