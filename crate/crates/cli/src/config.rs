//! Pipeline configuration: a single JSON document naming the input corpus,
//! preprocessing switches and every mining threshold. Command-line flags
//! override individual fields. Relative paths are resolved against the
//! config file's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use chrono::Duration;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer};

use trendmine::corpus::{self, CorpusFormat, SemanticFrame, TokenizeOptions};
use trendmine::numeric::parse_rational;
use trendmine::rules::RuleConstraints;
use trendmine::{Error, MiningParams, Rational, Result, TimeWindowSpec, Vocabulary};

/// Exact threshold parsed from a JSON number or a string such as `"4/616"`
/// or `"0.01"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalParam(pub Rational);

impl<'de> Deserialize<'de> for RationalParam {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        let text = match &value {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => {
                return Err(D::Error::custom(format!(
                    "expected a number or string, got {other}"
                )))
            }
        };
        parse_rational(&text)
            .map(RationalParam)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

fn zero() -> RationalParam {
    RationalParam(Rational::new(0, 1))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub path: PathBuf,
    pub format: CorpusFormat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MiningConfig {
    #[serde(default = "zero")]
    pub min_support: RationalParam,
    #[serde(default)]
    pub max_length: Option<usize>,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            min_support: zero(),
            max_length: None,
        }
    }
}

fn single_consequent() -> Option<usize> {
    Some(1)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulesConfig {
    #[serde(default = "zero")]
    pub min_confidence: RationalParam,
    #[serde(default)]
    pub consequent_whitelist: Option<Vec<String>>,
    #[serde(default)]
    pub max_antecedent_size: Option<usize>,
    /// Defaults to 1; set to null for multi-item consequents.
    #[serde(default = "single_consequent")]
    pub max_consequent_size: Option<usize>,
}

impl Default for RulesConfig {
    fn default() -> Self {
        RulesConfig {
            min_confidence: zero(),
            consequent_whitelist: None,
            max_antecedent_size: None,
            max_consequent_size: single_consequent(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    /// Duration such as `"1d"`, `"6h"`, `"30m"`, `"45s"` or plain seconds.
    #[serde(default)]
    pub length: Option<String>,
    #[serde(default)]
    pub step: Option<String>,
    /// Instant anchoring window boundaries; defaults to the UTC epoch.
    #[serde(default)]
    pub origin: Option<String>,
}

fn default_lattice_bound() -> usize {
    trendmine::fca::DEFAULT_ATTRIBUTE_BOUND
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    #[serde(default = "default_lattice_bound")]
    pub max_attributes: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            max_attributes: default_lattice_bound(),
        }
    }
}

fn default_min_count() -> u64 {
    10
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputConfig,
    #[serde(default)]
    pub keywords: Option<Vec<String>>,
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    #[serde(default = "default_min_count")]
    pub min_count: u64,
    #[serde(default)]
    pub frame: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub strip_hashtags: bool,
    #[serde(default)]
    pub inject_date_items: bool,
    #[serde(default)]
    pub mining: MiningConfig,
    #[serde(default)]
    pub rules: RulesConfig,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub lattice: LatticeConfig,
    pub output_dir: PathBuf,

    #[serde(skip)]
    base_dir: PathBuf,
}

impl PipelineConfig {
    /// Loads and fully validates a config: every referenced file must exist
    /// and every numeric field must be in its documented range. Nothing is
    /// written before this passes.
    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: PipelineConfig = serde_json::from_str(&body)
            .map_err(|e| Error::format("pipeline config", e.to_string()))?;
        config.base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        let input = self.resolve(&self.input.path);
        if !input.is_file() {
            return Err(Error::invalid_param(format!(
                "input file {} does not exist",
                input.display()
            )));
        }
        for optional in [&self.stopwords, &self.frame] {
            if let Some(path) = optional {
                let path = self.resolve(path);
                if !path.is_file() {
                    return Err(Error::invalid_param(format!(
                        "referenced file {} does not exist",
                        path.display()
                    )));
                }
            }
        }
        if self.min_count < 1 {
            return Err(Error::invalid_param("min_count must be at least 1"));
        }
        if let Some(keywords) = &self.keywords {
            if keywords.is_empty() {
                return Err(Error::invalid_param(
                    "keywords, when present, must be non-empty",
                ));
            }
        }
        self.mining_params()?;
        self.rule_constraints(None)?.validate()?;
        self.window_spec()?.validate()?;
        if self.lattice.max_attributes < 1 {
            return Err(Error::invalid_param("lattice.max_attributes must be positive"));
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn input_path(&self) -> PathBuf {
        self.resolve(&self.input.path)
    }

    pub fn output_dir(&self, override_dir: Option<&Path>) -> PathBuf {
        match override_dir {
            Some(dir) => dir.to_path_buf(),
            None => self.resolve(&self.output_dir),
        }
    }

    pub fn tokenize_options(&self) -> TokenizeOptions {
        TokenizeOptions {
            strip_hashtags: self.strip_hashtags,
            inject_date_items: self.inject_date_items,
        }
    }

    pub fn keyword_set(&self) -> Option<HashSet<String>> {
        self.keywords
            .as_ref()
            .map(|list| list.iter().cloned().collect())
    }

    pub fn stopword_set(&self) -> Result<HashSet<String>> {
        match &self.stopwords {
            Some(path) => corpus::load_stopwords(&self.resolve(path)),
            None => Ok(HashSet::new()),
        }
    }

    pub fn semantic_frame(&self) -> Result<Option<SemanticFrame>> {
        match &self.frame {
            Some(path) => corpus::load_semantic_frame(&self.resolve(path)).map(Some),
            None => Ok(None),
        }
    }

    pub fn mining_params(&self) -> Result<MiningParams> {
        MiningParams::new(self.mining.min_support.0, self.mining.max_length)
    }

    /// Rule constraints with the whitelist resolved through the vocabulary.
    /// Whitelist items missing from the vocabulary cannot occur in any rule
    /// and are dropped.
    pub fn rule_constraints(&self, vocab: Option<&Vocabulary>) -> Result<RuleConstraints> {
        let whitelist = match (&self.rules.consequent_whitelist, vocab) {
            (Some(items), Some(vocab)) => Some(
                items
                    .iter()
                    .filter_map(|item| vocab.id_of(item))
                    .collect(),
            ),
            (Some(_), None) => None, // validation pass, ids not known yet
            (None, _) => None,
        };
        Ok(RuleConstraints {
            min_support: self.mining.min_support.0,
            min_confidence: self.rules.min_confidence.0,
            consequent_whitelist: whitelist,
            max_antecedent_size: self.rules.max_antecedent_size,
            max_consequent_size: self.rules.max_consequent_size,
        })
    }

    pub fn window_spec(&self) -> Result<TimeWindowSpec> {
        let length = match &self.window.length {
            Some(text) => parse_duration(text)?,
            None => Duration::days(1),
        };
        let step = match &self.window.step {
            Some(text) => parse_duration(text)?,
            None => length,
        };
        let origin = match &self.window.origin {
            Some(text) => chrono::DateTime::parse_from_rfc3339(text)
                .map_err(|e| Error::invalid_param(format!("bad window origin {text:?}: {e}")))?
                .with_timezone(&chrono::Utc),
            None => chrono::TimeZone::timestamp_opt(&chrono::Utc, 0, 0).unwrap(),
        };
        Ok(TimeWindowSpec {
            window_length: length,
            step,
            origin,
        })
    }
}

/// Parses `"90s"`, `"30m"`, `"12h"`, `"1d"` or a bare number of seconds.
pub fn parse_duration(text: &str) -> Result<Duration> {
    let text = text.trim();
    let bad = || Error::invalid_param(format!("cannot parse duration {text:?}"));
    let (digits, unit) = match text.find(|c: char| !c.is_ascii_digit()) {
        Some(split) => text.split_at(split),
        None => (text, "s"),
    };
    let quantity: i64 = digits.parse().map_err(|_| bad())?;
    match unit {
        "s" => Ok(Duration::seconds(quantity)),
        "m" => Ok(Duration::minutes(quantity)),
        "h" => Ok(Duration::hours(quantity)),
        "d" => Ok(Duration::days(quantity)),
        _ => Err(bad()),
    }
}
