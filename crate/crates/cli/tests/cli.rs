//! Black-box tests of the command-line surface: exit codes, file outputs,
//! flag overrides, and agreement with the in-process library path.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use trendmine::corpus::{
    build_transactions, build_vocabulary, load_corpus, write_jsonl, CorpusFormat, TokenizeOptions,
};
use trendmine::fixtures::tennis_finals_corpus;
use trendmine::itemsets::apriori;
use trendmine::numeric::parse_rational;
use trendmine::rules::{generate_rules, sort_rules, write_rules_csv, RuleConstraints, RuleSortKey};
use trendmine::{MessageRecord, MiningParams};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_trendmine")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn trendmine")
}

fn code(output: &Output) -> i32 {
    output.status.code().unwrap_or(-1)
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write_corpus(dir: &Path, lines: &[&str]) -> PathBuf {
    let path = dir.join("corpus.jsonl");
    let body: String = lines
        .iter()
        .enumerate()
        .map(|(i, text)| {
            format!(
                "{{\"id\":\"m{i:03}\",\"timestamp\":\"2013-05-{:02}T10:{:02}:00Z\",\"text\":\"{text}\"}}\n",
                10 + i / 50,
                i % 50,
            )
        })
        .collect();
    std::fs::write(&path, body).unwrap();
    path
}

fn write_config(dir: &Path, extra: serde_json::Value) -> PathBuf {
    let mut body = serde_json::json!({
        "input": {"path": "corpus.jsonl", "format": "jsonl"},
        "min_count": 1,
        "output_dir": "out"
    });
    body.as_object_mut()
        .unwrap()
        .extend(extra.as_object().unwrap().clone());
    let path = dir.join("run.json");
    std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path
}

fn config_arg(path: &Path) -> String {
    path.to_str().unwrap().to_owned()
}

#[test]
fn ingest_reports_counts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    std::fs::write(
        &corpus,
        concat!(
            "{\"id\":\"1\",\"timestamp\":\"2013-05-17T10:00:00Z\",\"text\":\"gold medal\"}\n",
            "{\"id\":\"2\",\"timestamp\":\"2013-05-17T10:01:00Z\",\"text\":\"gold again\"}\n",
            "{\"id\":\"3\",\"timestamp\":\"broken\",\"text\":\"dropped\"}\n",
        ),
    )
    .unwrap();
    let config = write_config(dir.path(), serde_json::json!({}));
    let output = run(&["ingest", "--config", &config_arg(&config)]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let summary = stdout(&output);
    assert!(summary.contains("records=2"), "{summary}");
    assert!(summary.contains("rejected=1"), "{summary}");
    assert!(summary.contains("transactions=2"), "{summary}");
    assert!(dir.path().join("out/transactions.csv").is_file());
    assert!(dir.path().join("out/vocabulary.json").is_file());
}

#[test]
fn missing_input_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "input": {"path": "absent.jsonl", "format": "jsonl"},
            "output_dir": "out"
        })
        .to_string(),
    )
    .unwrap();
    let output = run(&["ingest", "--config", &config_arg(&config)]);
    assert_eq!(code(&output), 2, "{}", stderr(&output));
    assert!(!dir.path().join("out").exists(), "no partial outputs");
}

#[test]
fn missing_config_flag_exits_2() {
    let output = run(&["ingest"]);
    assert_eq!(code(&output), 2);
}

#[test]
fn all_stopword_corpus_warns_and_mine_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &["the and of", "and the"]);
    std::fs::write(dir.path().join("stop.txt"), "the\nand\nof\n").unwrap();
    let config = write_config(dir.path(), serde_json::json!({"stopwords": "stop.txt"}));
    let output = run(&["ingest", "--config", &config_arg(&config)]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    assert!(stdout(&output).contains("transactions=0"));
    assert!(stderr(&output).contains("warning"));

    let output = run(&["mine", "--config", &config_arg(&config)]);
    assert_eq!(code(&output), 3, "empty transactions must exit 3");
}

#[test]
fn mine_without_ingest_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &["gold"]);
    let config = write_config(dir.path(), serde_json::json!({}));
    let output = run(&["mine", "--config", &config_arg(&config)]);
    assert_eq!(code(&output), 2);
}

#[test]
fn mine_oracle_flag_agrees_with_apriori() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(
        dir.path(),
        &["gold silver", "gold bronze", "silver bronze", "gold", "silver gold"],
    );
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    let run_ok = |args: &[&str]| {
        let output = run(args);
        assert_eq!(code(&output), 0, "{}", stderr(&output));
    };
    run_ok(&["ingest", "--config", &config]);
    run_ok(&["mine", "--config", &config]);
    let fast = std::fs::read(dir.path().join("out/frequent.csv")).unwrap();
    run_ok(&["mine", "--config", &config, "--oracle"]);
    let slow = std::fs::read(dir.path().join("out/frequent.csv")).unwrap();
    assert_eq!(fast, slow, "--oracle output differs from apriori output");
}

#[test]
fn mine_saturated_threshold_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &["gold silver", "bronze", "tin zinc"]);
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    let output = run(&["mine", "--config", &config, "--min-support", "0.99"]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let body = std::fs::read_to_string(dir.path().join("out/frequent.csv")).unwrap();
    assert_eq!(body, "items,count,support\n");
}

#[test]
fn mine_oracle_guard_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let wide: String = (0..21).map(|i| format!("item{i:02} ")).collect();
    write_corpus(dir.path(), &[wide.trim()]);
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    let output = run(&["mine", "--config", &config, "--oracle"]);
    assert_eq!(code(&output), 4, "{}", stderr(&output));
}

#[test]
fn rules_respect_consequent_whitelist() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(
        dir.path(),
        &["denmark win", "denmark win", "denmark vote", "norway win", "norway vote win"],
    );
    let config = write_config(
        dir.path(),
        serde_json::json!({"rules": {"min_confidence": 0.1, "consequent_whitelist": ["win"]}}),
    );
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    run(&["mine", "--config", &config]);
    let output = run(&["rules", "--config", &config]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let mut reader = csv::Reader::from_path(dir.path().join("out/rules.csv")).unwrap();
    let mut seen = 0;
    for row in reader.records() {
        let row = row.unwrap();
        assert_eq!(&row[1], "win", "non-whitelisted consequent leaked");
        seen += 1;
    }
    assert!(seen > 0, "expected at least one rule");
}

#[test]
fn rules_with_impossible_constraints_write_header_only() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &["gold silver", "gold", "silver"]);
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    run(&["mine", "--config", &config]);
    let output = run(&["rules", "--config", &config, "--whitelist", "absent_item"]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let body = std::fs::read_to_string(dir.path().join("out/rules.csv")).unwrap();
    assert_eq!(body, "antecedent,consequent,support,confidence,lift\n");
}

#[test]
fn cli_rules_equal_in_process_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = write_corpus(
        dir.path(),
        &[
            "denmark norway win",
            "denmark norway",
            "denmark win vote",
            "norway win",
            "sweden win vote",
            "denmark sweden",
        ],
    );
    let config = write_config(
        dir.path(),
        serde_json::json!({
            "mining": {"min_support": "1/6"},
            "rules": {"min_confidence": 0.5}
        }),
    );
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    run(&["mine", "--config", &config]);
    let output = run(&["rules", "--config", &config]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let cli_bytes = std::fs::read(dir.path().join("out/rules.csv")).unwrap();

    // same pipeline in process
    let load = load_corpus(&corpus_path, CorpusFormat::Jsonl).unwrap();
    let options = TokenizeOptions::default();
    let vocab = build_vocabulary(&load.records, 1, &Default::default(), &options).unwrap();
    let txs = build_transactions(&load.records, &vocab, None, &options)
        .unwrap()
        .transactions;
    let params = MiningParams::new(parse_rational("1/6").unwrap(), None).unwrap();
    let family = apriori(&txs, &params).unwrap();
    let constraints = RuleConstraints {
        min_support: params.min_support,
        min_confidence: parse_rational("0.5").unwrap(),
        ..RuleConstraints::default()
    };
    let mut rules = generate_rules(&family, &txs, &constraints).unwrap();
    sort_rules(&mut rules, RuleSortKey::Support);
    let mut lib_bytes = Vec::new();
    write_rules_csv(&rules, &vocab, &mut lib_bytes).unwrap();

    assert_eq!(cli_bytes, lib_bytes, "file pipeline deviates from library pipeline");
}

#[test]
fn lattice_identity_corpus_has_five_concepts() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &["alpha", "beta", "gamma"]);
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    let output = run(&["lattice", "--config", &config]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    assert!(stdout(&output).contains("concepts=5"));
    let dot = std::fs::read_to_string(dir.path().join("out/lattice.dot")).unwrap();
    assert_eq!(dot.matches("label=").count(), 5);
    assert_eq!(dot.matches(" -> ").count(), 6);
    let concepts: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/concepts.json")).unwrap())
            .unwrap();
    assert_eq!(concepts.as_array().unwrap().len(), 5);
}

#[test]
fn lattice_empty_query_finds_top_with_singleton_filter() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &["alpha beta", "alpha", "beta"]);
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    let output = run(&[
        "lattice", "--config", &config, "--query", "", "--mode", "filter",
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let query: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/query.json")).unwrap())
            .unwrap();
    assert_eq!(query["concept"]["intent"], serde_json::json!([]));
    assert_eq!(query["concept"]["extent_size"], 3);
    assert_eq!(query["members"].as_array().unwrap().len(), 1);
    assert_eq!(query["members"][0]["index"], query["concept"]["index"]);
}

#[test]
fn lattice_attribute_bound_exits_5_with_frame_guidance() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &["a b c d e", "a c e", "b d"]);
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    let output = run(&["lattice", "--config", &config, "--max-attributes", "4"]);
    assert_eq!(code(&output), 5, "{}", stderr(&output));
    assert!(stderr(&output).contains("frame"), "{}", stderr(&output));
}

#[test]
fn lattice_quadruple_query_reports_two_percent() {
    let dir = tempfile::tempdir().unwrap();
    write_jsonl(&tennis_finals_corpus(0), &dir.path().join("corpus.jsonl")).unwrap();
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    let output = run(&[
        "lattice",
        "--config",
        &config,
        "--query",
        "aug_5 federer murrey man",
        "--mode",
        "ideal",
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let query = std::fs::read_to_string(dir.path().join("out/query.json")).unwrap();
    assert!(
        query.contains("\"extent_percent\": 2.00"),
        "expected a 2.00% concept, got:\n{query}"
    );
}

#[test]
fn dynamics_two_peak_fixture_crosses_once() {
    let dir = tempfile::tempdir().unwrap();
    // daily gold share: 0.1, 0.4, 0.1, 0.8, 0.2 — peaks at days 2 and 4
    let mut records = Vec::new();
    for (day, hits) in [(1u32, 1u32), (2, 4), (3, 1), (4, 8), (5, 2)] {
        for slot in 0..10u32 {
            let text = if slot < hits { "gold rally" } else { "rally" };
            records.push(MessageRecord {
                id: format!("d{day}s{slot}"),
                timestamp: chrono::TimeZone::with_ymd_and_hms(
                    &chrono::Utc,
                    2012,
                    8,
                    day,
                    8,
                    slot,
                    0,
                )
                .unwrap(),
                text: text.to_owned(),
            });
        }
    }
    write_jsonl(&records, &dir.path().join("corpus.jsonl")).unwrap();
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    let output = run(&[
        "dynamics", "--config", &config, "--items", "gold", "--threshold", "0.6",
    ]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let markers: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/markers.json")).unwrap())
            .unwrap();
    let events = markers.as_array().unwrap();
    let crossings: Vec<_> = events
        .iter()
        .filter(|e| e["kind"] == "threshold_up_crossing")
        .collect();
    assert_eq!(crossings.len(), 1, "threshold between the peaks must cross once");
    assert_eq!(crossings[0]["window_start"], "2012-08-04T00:00:00Z");
    assert_eq!(events[0]["kind"], "global_maximum");
    assert_eq!(events[0]["window_start"], "2012-08-04T00:00:00Z");
}

#[test]
fn dynamics_single_window_equals_whole_corpus_support() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &["gold silver", "gold", "silver", "gold tin"]);
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    let output = run(&["dynamics", "--config", &config, "--items", "gold"]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let body = std::fs::read_to_string(dir.path().join("out/series.csv")).unwrap();
    let rows: Vec<&str> = body.lines().skip(1).collect();
    assert_eq!(rows.len(), 1, "all records share one day: {body}");
    assert_eq!(rows[0].split(',').nth(1), Some("0.750000000"));
}

#[test]
fn dynamics_absent_antecedent_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &["gold silver", "gold"]);
    let config = write_config(dir.path(), serde_json::json!({}));
    let config = config_arg(&config);
    run(&["ingest", "--config", &config]);
    let output = run(&[
        "dynamics", "--config", &config, "--antecedent", "platinum", "--consequent", "gold",
    ]);
    assert_eq!(code(&output), 3, "{}", stderr(&output));
}

#[test]
fn dynamics_without_target_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &["gold"]);
    let config = write_config(dir.path(), serde_json::json!({}));
    let output = run(&["dynamics", "--config", &config_arg(&config)]);
    assert_eq!(code(&output), 2);
}

#[test]
fn csv_corpus_and_date_injection() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.csv");
    std::fs::write(
        &corpus,
        "id,timestamp,text\n1,2012-08-04T10:00:00Z,\"sharapova wins, gold\"\n2,2012-08-05T11:00:00Z,federer murray\n",
    )
    .unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "input": {"path": "corpus.csv", "format": "csv"},
            "min_count": 1,
            "inject_date_items": true,
            "output_dir": "out"
        })
        .to_string(),
    )
    .unwrap();
    let output = run(&["ingest", "--config", &config_arg(&config)]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let vocab = std::fs::read_to_string(dir.path().join("out/vocabulary.json")).unwrap();
    assert!(vocab.contains("aug_04"), "injected date item missing: {vocab}");
    assert!(vocab.contains("aug_05"));
    let transactions = std::fs::read_to_string(dir.path().join("out/transactions.csv")).unwrap();
    assert!(transactions.contains("aug_04 gold sharapova wins"));
}

#[test]
fn keyword_filter_and_frame_restrict_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(
        dir.path(),
        &[
            "eurovision denmark win",
            "weather is nice",
            "eurovision norway vote",
        ],
    );
    std::fs::write(
        dir.path().join("frame.json"),
        serde_json::json!({"country": ["denmark", "norway"], "verdict": ["win", "vote"]})
            .to_string(),
    )
    .unwrap();
    let config = write_config(
        dir.path(),
        serde_json::json!({
            "keywords": ["eurovision"],
            "frame": "frame.json"
        }),
    );
    let output = run(&["ingest", "--config", &config_arg(&config)]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let summary = stdout(&output);
    assert!(summary.contains("kept_after_keywords=2"), "{summary}");
    let transactions = std::fs::read_to_string(dir.path().join("out/transactions.csv")).unwrap();
    // frame keeps only the named items; "eurovision" itself is outside it
    assert!(transactions.contains("denmark win"));
    assert!(transactions.contains("norway vote"));
    assert!(!transactions.contains("eurovision"));
    assert!(!transactions.contains("weather"));
}
