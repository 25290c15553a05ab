//! Association rules over mined frequent itemsets: bipartition generation,
//! confidence and lift, semantic constraints, sorting and export.
//!
//! Every rule X -> Y comes from one frequent set F = X ∪ Y, carries F's
//! support, confidence |containing X∪Y| / |containing X| and lift
//! confidence / support(Y). All three are exact rationals.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::Write;

use num::Zero;
use serde::Serialize;

use crate::corpus::{Transaction, Vocabulary};
use crate::error::{Error, Result};
use crate::itemsets::{FrequentItemset, Itemset};
use crate::numeric::{format_decimal, ratio, to_f64, Rational, RationalJson};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationRule {
    pub antecedent: Itemset,
    pub consequent: Itemset,
    /// Support of antecedent ∪ consequent.
    pub support: Rational,
    pub confidence: Rational,
    pub lift: Rational,
}

/// Constraints on emitted rules. `min_support` filters the union set with a
/// strict comparison; `min_confidence` is inclusive. The consequent
/// whitelist realizes semantically constrained analyses (e.g. only rules
/// predicting `win`). Multi-item consequents are supported by the engine but
/// excluded by the default `max_consequent_size` of 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleConstraints {
    pub min_support: Rational,
    pub min_confidence: Rational,
    pub consequent_whitelist: Option<BTreeSet<u32>>,
    pub max_antecedent_size: Option<usize>,
    pub max_consequent_size: Option<usize>,
}

impl Default for RuleConstraints {
    fn default() -> Self {
        RuleConstraints {
            min_support: Rational::zero(),
            min_confidence: Rational::zero(),
            consequent_whitelist: None,
            max_antecedent_size: None,
            max_consequent_size: Some(1),
        }
    }
}

impl RuleConstraints {
    pub fn validate(&self) -> Result<()> {
        let unit = Rational::from_integer(1);
        if self.min_support < Rational::zero() || self.min_support > unit {
            return Err(Error::invalid_param("min_support must be in [0, 1]"));
        }
        if self.min_confidence < Rational::zero() || self.min_confidence > unit {
            return Err(Error::invalid_param("min_confidence must be in [0, 1]"));
        }
        if self.max_antecedent_size == Some(0) {
            return Err(Error::invalid_param("max_antecedent_size must be positive"));
        }
        if self.max_consequent_size == Some(0) {
            return Err(Error::invalid_param("max_consequent_size must be positive"));
        }
        Ok(())
    }

    /// True when the bipartition shape passes the side-specific constraints.
    pub(crate) fn admits(&self, antecedent: &[u32], consequent: &[u32]) -> bool {
        if self
            .max_antecedent_size
            .is_some_and(|cap| antecedent.len() > cap)
        {
            return false;
        }
        if self
            .max_consequent_size
            .is_some_and(|cap| consequent.len() > cap)
        {
            return false;
        }
        if let Some(whitelist) = &self.consequent_whitelist {
            if !consequent.iter().all(|item| whitelist.contains(item)) {
                return false;
            }
        }
        true
    }
}

/// Lift of a rule: confidence divided by the consequent's support.
pub fn lift(rule_confidence: Rational, consequent_support: Rational) -> Result<Rational> {
    if consequent_support <= Rational::zero() {
        return Err(Error::ZeroConsequentSupport);
    }
    Ok(rule_confidence / consequent_support)
}

/// Canonical rule order shared by [`generate_rules`] and the FCA route:
/// union size, union items, antecedent size, antecedent items.
pub(crate) fn canonical_rule_cmp(a: &AssociationRule, b: &AssociationRule) -> Ordering {
    let ua = a.antecedent.union(&a.consequent);
    let ub = b.antecedent.union(&b.consequent);
    ua.len()
        .cmp(&ub.len())
        .then_with(|| ua.items().cmp(ub.items()))
        .then_with(|| a.antecedent.len().cmp(&b.antecedent.len()))
        .then_with(|| a.antecedent.items().cmp(b.antecedent.items()))
}

/// Emits every bipartition X ⊎ Y of every frequent set with at least two
/// items, subject to the constraints: union support strictly above
/// `min_support`, confidence at least `min_confidence`, consequent inside
/// the whitelist, and the size caps. Confidence and lift are computed from
/// exact counts; output is in canonical rule order.
pub fn generate_rules(
    frequent: &[FrequentItemset],
    transactions: &[Transaction],
    constraints: &RuleConstraints,
) -> Result<Vec<AssociationRule>> {
    constraints.validate()?;
    if transactions.is_empty() {
        return Err(Error::EmptyTransactions);
    }
    let total = transactions.len() as u64;

    let appearing: HashSet<u32> = transactions
        .iter()
        .flat_map(|t| t.items.iter().copied())
        .collect();
    for f in frequent {
        for &item in f.itemset.items() {
            if !appearing.contains(&item) {
                return Err(Error::InconsistentFamily { item });
            }
        }
    }

    let counts: HashMap<&[u32], u64> = frequent
        .iter()
        .map(|f| (f.itemset.items(), f.count))
        .collect();
    let count_of = |items: &[u32]| -> u64 {
        counts.get(items).copied().unwrap_or_else(|| {
            transactions
                .iter()
                .filter(|t| t.contains_all(items))
                .count() as u64
        })
    };

    let mut rules = Vec::new();
    for f in frequent {
        let k = f.itemset.len();
        if k < 2 {
            continue;
        }
        if !(f.support > constraints.min_support) {
            continue;
        }
        let items = f.itemset.items();
        let full: u64 = (1 << k) - 1;
        for mask in 1..full {
            let antecedent: Vec<u32> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| items[i]).collect();
            let consequent: Vec<u32> = (0..k).filter(|i| mask & (1 << i) == 0).map(|i| items[i]).collect();
            if !constraints.admits(&antecedent, &consequent) {
                continue;
            }
            let count_x = count_of(&antecedent);
            if count_x == 0 {
                continue; // undefined confidence
            }
            let confidence = ratio(f.count, count_x);
            if confidence < constraints.min_confidence {
                continue;
            }
            let count_y = count_of(&consequent);
            let lift = lift(confidence, ratio(count_y, total))?;
            rules.push(AssociationRule {
                antecedent: Itemset::new(antecedent),
                consequent: Itemset::new(consequent),
                support: f.support,
                confidence,
                lift,
            });
        }
    }
    rules.sort_by(canonical_rule_cmp);
    Ok(rules)
}

/// Sort keys for [`sort_rules`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSortKey {
    Support,
    Confidence,
    Lift,
}

/// Stable descending sort by the chosen metric; ties break by antecedent
/// size ascending, then antecedent items, then consequent items.
pub fn sort_rules(rules: &mut [AssociationRule], key: RuleSortKey) {
    rules.sort_by(|a, b| {
        let (ka, kb) = match key {
            RuleSortKey::Support => (a.support, b.support),
            RuleSortKey::Confidence => (a.confidence, b.confidence),
            RuleSortKey::Lift => (a.lift, b.lift),
        };
        kb.cmp(&ka)
            .then_with(|| a.antecedent.len().cmp(&b.antecedent.len()))
            .then_with(|| a.antecedent.items().cmp(b.antecedent.items()))
            .then_with(|| a.consequent.items().cmp(b.consequent.items()))
    });
}

/// Rule CSV: antecedent and consequent as space-joined, lexicographically
/// sorted item strings; support printed to nine fractional digits,
/// confidence and lift to seven, all round-half-even.
pub fn write_rules_csv<W: Write>(
    rules: &[AssociationRule],
    vocab: &Vocabulary,
    writer: W,
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["antecedent", "consequent", "support", "confidence", "lift"])
        .map_err(|e| Error::format("rules csv", e.to_string()))?;
    for rule in rules {
        csv.write_record([
            vocab.render_items(rule.antecedent.items()).join(" "),
            vocab.render_items(rule.consequent.items()).join(" "),
            format_decimal(rule.support, 9),
            format_decimal(rule.confidence, 7),
            format_decimal(rule.lift, 7),
        ])
        .map_err(|e| Error::format("rules csv", e.to_string()))?;
    }
    csv.flush().map_err(|e| Error::format("rules csv", e.to_string()))
}

#[derive(Serialize)]
struct RuleJson {
    antecedent: Vec<String>,
    consequent: Vec<String>,
    support: RationalJson,
    confidence: RationalJson,
    lift: RationalJson,
}

/// JSON export with exact numerator/denominator fields alongside floats.
pub fn rules_to_json(rules: &[AssociationRule], vocab: &Vocabulary) -> Result<String> {
    let body: Vec<RuleJson> = rules
        .iter()
        .map(|rule| RuleJson {
            antecedent: vocab.render_items(rule.antecedent.items()),
            consequent: vocab.render_items(rule.consequent.items()),
            support: rule.support.into(),
            confidence: rule.confidence.into(),
            lift: rule.lift.into(),
        })
        .collect();
    serde_json::to_string_pretty(&body).map_err(|e| Error::format("rules json", e.to_string()))
}

impl AssociationRule {
    pub fn support_f64(&self) -> f64 {
        to_f64(self.support)
    }

    pub fn confidence_f64(&self) -> f64 {
        to_f64(self.confidence)
    }

    pub fn lift_f64(&self) -> f64 {
        to_f64(self.lift)
    }
}
