use criterion::{black_box, criterion_group, criterion_main, Criterion};

use trendmine::dynamics::{confidence_series, detect_markers};
use trendmine::fca::{build_lattice, FormalContext};
use trendmine::fixtures::{
    confidence_ramp_corpus, eurovision_corpus, olympic_extent_corpus, prepare, random_context,
    random_corpus,
};
use trendmine::itemsets::{apriori, MiningParams};
use trendmine::numeric::parse_rational;
use trendmine::rules::{generate_rules, RuleConstraints};
use trendmine::{Itemset, Rational, TimeWindowSpec};

fn bench_apriori(c: &mut Criterion) {
    let txs = random_corpus(7, 2000, 40);
    let params = MiningParams::new(Rational::new(1, 100), None).unwrap();
    c.bench_function("apriori_random_2k", |b| {
        b.iter(|| apriori(black_box(&txs), black_box(&params)).unwrap())
    });

    let records = eurovision_corpus(0);
    let (_, contest) = prepare(&records, 1);
    let contest_params = MiningParams::new(parse_rational("4/616").unwrap(), None).unwrap();
    c.bench_function("apriori_contest_616", |b| {
        b.iter(|| apriori(black_box(&contest), black_box(&contest_params)).unwrap())
    });
}

fn bench_rules(c: &mut Criterion) {
    let records = eurovision_corpus(0);
    let (vocab, txs) = prepare(&records, 1);
    let params = MiningParams::new(parse_rational("4/616").unwrap(), None).unwrap();
    let family = apriori(&txs, &params).unwrap();
    let constraints = RuleConstraints {
        min_support: params.min_support,
        min_confidence: parse_rational("0.7").unwrap(),
        consequent_whitelist: Some([vocab.id_of("win").unwrap()].into()),
        ..RuleConstraints::default()
    };
    c.bench_function("generate_rules_contest", |b| {
        b.iter(|| generate_rules(black_box(&family), black_box(&txs), black_box(&constraints)).unwrap())
    });
}

fn bench_lattice(c: &mut Criterion) {
    let ctx = random_context(11, 64, 12);
    c.bench_function("lattice_random_12_attrs", |b| {
        b.iter(|| build_lattice(black_box(&ctx)).unwrap())
    });

    let records = olympic_extent_corpus(0);
    let (_, txs) = prepare(&records, 1);
    let wide = FormalContext::from_transactions(&txs).unwrap();
    c.bench_function("lattice_10k_objects", |b| {
        b.iter(|| build_lattice(black_box(&wide)).unwrap())
    });
}

fn bench_dynamics(c: &mut Criterion) {
    let records = confidence_ramp_corpus();
    let (vocab, txs) = prepare(&records, 1);
    let gold = Itemset::new(vec![vocab.id_of("gold").unwrap()]);
    let sharapova = Itemset::new(vec![vocab.id_of("sharapova").unwrap()]);
    let spec = TimeWindowSpec::daily();
    c.bench_function("confidence_series_daily", |b| {
        b.iter(|| {
            let series =
                confidence_series(black_box(&gold), black_box(&sharapova), &txs, &spec).unwrap();
            detect_markers(&series, Some(Rational::new(95, 100))).unwrap()
        })
    });
}

criterion_group!(benches, bench_apriori, bench_rules, bench_lattice, bench_dynamics);
criterion_main!(benches);
