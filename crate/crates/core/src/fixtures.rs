//! Deterministic fixture generators for the test kit and benchmarks.
//!
//! Each generator builds a corpus with exactly known counts, so tests can
//! assert mined statistics against values computed by hand. The seed only
//! shuffles record order; counts and timestamps never depend on it.

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    build_transactions, build_vocabulary, MessageRecord, TokenizeOptions, Transaction, Vocabulary,
};
use crate::fca::FormalContext;

fn base(y: i32, m: u32, d: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(y, m, d, 0, 0, 0).unwrap()
}

fn expand(
    prefix: &str,
    start: DateTime<Utc>,
    spacing: Duration,
    groups: &[(&str, usize)],
    seed: u64,
) -> Vec<MessageRecord> {
    let mut texts: Vec<&str> = Vec::new();
    for &(text, count) in groups {
        texts.extend(std::iter::repeat(text).take(count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    texts.shuffle(&mut rng);
    texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| MessageRecord {
            id: format!("{prefix}{i:05}"),
            timestamp: start + spacing * i as i32,
            text: text.to_owned(),
        })
        .collect()
}

/// A 616-message contest-discussion corpus with fixed co-occurrence counts:
/// `win` appears in 422 messages; the country pairs occur 10, 7, 8, 5 and 7
/// times with 9, 7, 7, 5 and 5 of those also containing `win`.
pub fn eurovision_corpus(seed: u64) -> Vec<MessageRecord> {
    let groups = [
        ("denmark norway win", 9),
        ("denmark norway", 1),
        ("denmark favourites win", 7),
        ("azerbaijan norway win", 7),
        ("azerbaijan norway", 1),
        ("finland sweden win", 5),
        ("azerbaijan denmark win", 5),
        ("azerbaijan denmark", 2),
        ("win", 389),
        ("chatter", 190),
    ];
    debug_assert_eq!(groups.iter().map(|&(_, n)| n).sum::<usize>(), 616);
    expand("ev", base(2013, 5, 10), Duration::minutes(15), &groups, seed)
}

/// A 10,000-message tournament corpus whose eight tracked attribute triples
/// occur in exactly 300, 7, 4, 181, 376, 79, 5 and 197 messages, i.e. at
/// 3.00%, 0.07%, 0.04%, 1.81%, 3.76%, 0.79%, 0.05% and 1.97%.
pub fn olympic_extent_corpus(seed: u64) -> Vec<MessageRecord> {
    let mut records = Vec::with_capacity(10_000);
    let day_groups: [(u32, &[(&str, usize)]); 3] = [
        (
            4,
            &[
                ("sharapova aug_04 gold", 300),
                ("sharapova aug_04 wins", 181),
                ("williams aug_04 gold", 376),
                ("williams aug_04 wins", 197),
            ],
        ),
        (
            5,
            &[
                ("sharapova aug_05 gold", 7),
                ("williams aug_05 gold", 79),
            ],
        ),
        (
            1,
            &[
                ("sharapova aug_01 wins", 4),
                ("williams aug_01 wins", 5),
            ],
        ),
    ];
    for (i, (day, groups)) in day_groups.into_iter().enumerate() {
        records.extend(expand(
            &format!("oly{day}_"),
            base(2012, 8, day),
            Duration::seconds(30),
            groups,
            seed.wrapping_add(i as u64),
        ));
    }
    let fill = 10_000 - records.len();
    records.extend(expand(
        "olyfill_",
        base(2012, 7, 27),
        Duration::seconds(120),
        &[("final", fill)],
        seed.wrapping_add(99),
    ));
    debug_assert_eq!(records.len(), 10_000);
    records
}

/// A 1,000-message finals corpus where exactly 20 messages (2.00%) carry the
/// quadruple `aug_5 federer murrey man`, embedded among other day/result
/// patterns over twelve attributes.
pub fn tennis_finals_corpus(seed: u64) -> Vec<MessageRecord> {
    let groups = [
        ("aug_5 federer murrey man final single", 20),
        ("aug_4 sharapova williams woman final single", 30),
        ("aug_5 murrey gold man", 60),
        ("aug_5 federer silver man", 50),
        ("aug_4 williams gold woman", 80),
        ("aug_4 sharapova silver woman", 70),
        ("final", 690),
    ];
    debug_assert_eq!(groups.iter().map(|&(_, n)| n).sum::<usize>(), 1000);
    expand("ten", base(2012, 8, 4), Duration::minutes(2), &groups, seed)
}

/// Per-day `gold -> sharapova` co-occurrence counts of the 14-day ramp
/// corpus: confidence climbs to 1.0 on day 10 and falls off after.
pub const RAMP_DAILY_HITS: [u64; 14] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 7, 5, 3, 2];

/// Day the ramp peaks (the tenth day of the corpus).
pub fn ramp_peak_day() -> DateTime<Utc> {
    base(2012, 8, 4)
}

/// A 14-day corpus starting 2012-07-26 with ten `gold` messages per day, of
/// which [`RAMP_DAILY_HITS`] also contain `sharapova`. Record order is
/// chronological; no shuffling, so the series is easy to eyeball.
pub fn confidence_ramp_corpus() -> Vec<MessageRecord> {
    let start = base(2012, 7, 26);
    let mut records = Vec::new();
    for (day, &hits) in RAMP_DAILY_HITS.iter().enumerate() {
        for slot in 0..10u64 {
            let text = if slot < hits {
                "gold sharapova"
            } else {
                "gold"
            };
            records.push(MessageRecord {
                id: format!("ramp{day:02}_{slot}"),
                timestamp: start + Duration::days(day as i64) + Duration::minutes(slot as i64),
                text: text.to_owned(),
            });
        }
    }
    records
}

/// Runs the standard ingest steps (vocabulary + transactions, no stopwords,
/// no frame) over fixture records.
pub fn prepare(records: &[MessageRecord], min_count: u64) -> (Vocabulary, Vec<Transaction>) {
    let options = TokenizeOptions::default();
    let vocab = build_vocabulary(records, min_count, &Default::default(), &options)
        .expect("fixture vocabulary");
    let build =
        build_transactions(records, &vocab, None, &options).expect("fixture transactions");
    (vocab, build.transactions)
}

/// Random transaction collection for differential tests: up to
/// `max_transactions` transactions over up to `max_items` distinct items,
/// each transaction non-empty.
pub fn random_corpus(seed: u64, max_transactions: usize, max_items: usize) -> Vec<Transaction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = rng.gen_range(2..=max_items.max(2)) as u32;
    let count = rng.gen_range(1..=max_transactions.max(1));
    let start = base(2013, 5, 10);
    (0..count)
        .map(|i| {
            let size = rng.gen_range(1..=(items as usize).min(6));
            let mut picked: Vec<u32> = Vec::with_capacity(size);
            while picked.len() < size {
                let item = rng.gen_range(0..items);
                if !picked.contains(&item) {
                    picked.push(item);
                }
            }
            Transaction::new(format!("r{i:04}"), start + Duration::hours(i as i64), picked)
        })
        .collect()
}

/// Random formal context with at least one object and one attribute.
pub fn random_context(seed: u64, max_objects: usize, max_attrs: usize) -> FormalContext {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objects = rng.gen_range(1..=max_objects.max(1));
    let attrs = rng.gen_range(1..=max_attrs.max(1));
    let density: f64 = rng.gen_range(0.2..0.8);
    FormalContext::new(
        (0..objects).map(|i| format!("o{i}")).collect(),
        (0..attrs as u32).collect(),
        (0..objects)
            .map(|_| (0..attrs).filter(|_| rng.gen_bool(density)).collect())
            .collect(),
    )
    .expect("random context construction")
}
