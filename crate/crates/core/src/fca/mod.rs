//! Formal concept analysis over the transaction corpus: formal contexts,
//! Galois derivations, the full concept lattice with covering edges,
//! ideal/filter queries, extent percentages, and rules derived from the
//! context side.
//!
//! Objects are transactions, attributes are vocabulary items; object i has
//! attribute j exactly when item j occurs in transaction i. The lattice is
//! enumerated by canonical (lectic-order) closure and its cover edges are
//! the transitive reduction of extent inclusion.

mod bits;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::corpus::Transaction;
use crate::error::{Error, Result};
use crate::itemsets::Itemset;
use crate::numeric::{format_decimal, ratio, to_f64, Rational};
use crate::rules::{canonical_rule_cmp, lift, AssociationRule, RuleConstraints};

use bits::Bits;

/// Cross table between transactions (objects) and items (attributes).
#[derive(Debug, Clone, PartialEq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<u32>,
    rows: Vec<Bits>, // per object: attribute set
    cols: Vec<Bits>, // per attribute: object set
}

impl FormalContext {
    /// Builds a context from explicit incidence rows (attribute indices per
    /// object). Attribute ids must be unique.
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<u32>,
        incidence: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if incidence.len() != objects.len() {
            return Err(Error::invalid_param(format!(
                "incidence has {} rows for {} objects",
                incidence.len(),
                objects.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for &attr in &attributes {
            if !seen.insert(attr) {
                return Err(Error::invalid_param(format!("duplicate attribute id {attr}")));
            }
        }
        let m = attributes.len();
        let n = objects.len();
        let mut rows = Vec::with_capacity(n);
        let mut cols = vec![Bits::new(n); m];
        for (obj, row) in incidence.into_iter().enumerate() {
            let mut bits = Bits::new(m);
            for attr in row {
                if attr >= m {
                    return Err(Error::IndexOutOfRange {
                        index: attr,
                        size: m,
                    });
                }
                bits.set(attr);
                cols[attr].set(obj);
            }
            rows.push(bits);
        }
        Ok(FormalContext {
            objects,
            attributes,
            rows,
            cols,
        })
    }

    /// Context induced by a transaction collection: objects in transaction
    /// order, attributes the distinct item ids present, sorted ascending.
    pub fn from_transactions(transactions: &[Transaction]) -> Result<Self> {
        if transactions.is_empty() {
            return Err(Error::EmptyTransactions);
        }
        let mut attributes: Vec<u32> = transactions
            .iter()
            .flat_map(|t| t.items.iter().copied())
            .collect();
        attributes.sort_unstable();
        attributes.dedup();
        let index: HashMap<u32, usize> = attributes
            .iter()
            .enumerate()
            .map(|(pos, &item)| (item, pos))
            .collect();
        let objects = transactions.iter().map(|t| t.id.clone()).collect();
        let incidence = transactions
            .iter()
            .map(|t| t.items.iter().map(|item| index[item]).collect())
            .collect();
        Self::new(objects, attributes, incidence)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn object_ids(&self) -> &[String] {
        &self.objects
    }

    /// Item ids behind the attribute indices.
    pub fn attribute_items(&self) -> &[u32] {
        &self.attributes
    }

    pub fn incidence(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].get(attribute)
    }

    /// Attribute index of an item id, when the item appears in this context.
    pub fn attribute_of_item(&self, item: u32) -> Option<usize> {
        self.attributes.binary_search(&item).ok()
    }

    fn check_objects(&self, objs: &BTreeSet<usize>) -> Result<()> {
        if let Some(&bad) = objs.iter().find(|&&o| o >= self.objects.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: self.objects.len(),
            });
        }
        Ok(())
    }

    fn check_attributes(&self, attrs: &BTreeSet<usize>) -> Result<()> {
        if let Some(&bad) = attrs.iter().find(|&&a| a >= self.attributes.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: self.attributes.len(),
            });
        }
        Ok(())
    }

    fn intent_bits(&self, objs: &Bits) -> Bits {
        let mut intent = Bits::full(self.attributes.len());
        for obj in objs.ones() {
            intent.and_assign(&self.rows[obj]);
        }
        intent
    }

    fn extent_bits(&self, attrs: &Bits) -> Bits {
        let mut extent = Bits::full(self.objects.len());
        for attr in attrs.ones() {
            extent.and_assign(&self.cols[attr]);
        }
        extent
    }

    fn closure_bits(&self, attrs: &Bits) -> Bits {
        self.intent_bits(&self.extent_bits(attrs))
    }

    /// Galois derivation objects -> attributes: the attributes held by every
    /// object in `objs`. The empty object set derives to all attributes.
    pub fn derive_objects_to_attrs(&self, objs: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        self.check_objects(objs)?;
        let bits = Bits::from_indices(self.objects.len(), objs.iter().copied());
        Ok(self.intent_bits(&bits).ones().collect())
    }

    /// Galois derivation attributes -> objects: the objects holding every
    /// attribute in `attrs`. The empty attribute set derives to all objects.
    pub fn derive_attrs_to_objects(&self, attrs: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        self.check_attributes(attrs)?;
        let bits = Bits::from_indices(self.attributes.len(), attrs.iter().copied());
        Ok(self.extent_bits(&bits).ones().collect())
    }

    /// The closure A'' — a fixpoint of this map is a concept intent.
    pub fn closure(&self, attrs: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        self.check_attributes(attrs)?;
        let bits = Bits::from_indices(self.attributes.len(), attrs.iter().copied());
        Ok(self.closure_bits(&bits).ones().collect())
    }
}

/// A pair (extent, intent) closed under the Galois derivations.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalConcept {
    /// Object indices, ascending.
    pub extent: Vec<usize>,
    /// Attribute indices, ascending.
    pub intent: Vec<usize>,
    /// |extent| / |objects| as an exact percentage.
    pub extent_percent: Rational,
}

/// All concepts of a context ordered by (|extent| descending, intent
/// lexicographic), plus the Hasse covering edges (lower, upper).
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptLattice {
    pub concepts: Vec<FormalConcept>,
    pub cover_edges: Vec<(usize, usize)>,
    pub top: usize,
    pub bottom: usize,
    object_count: usize,
    attribute_count: usize,
    extents: Vec<Bits>,
}

/// Contexts with more attributes than this refuse full-lattice construction
/// unless an explicit bound is supplied.
pub const DEFAULT_ATTRIBUTE_BOUND: usize = 64;

/// Enumerates every concept exactly once via canonical closures in lectic
/// order, then computes cover edges as the transitive reduction of extent
/// inclusion. Uses [`DEFAULT_ATTRIBUTE_BOUND`].
pub fn build_lattice(context: &FormalContext) -> Result<ConceptLattice> {
    build_lattice_with_bound(context, DEFAULT_ATTRIBUTE_BOUND)
}

pub fn build_lattice_with_bound(context: &FormalContext, bound: usize) -> Result<ConceptLattice> {
    if context.object_count() == 0 || context.attribute_count() == 0 {
        return Err(Error::DegenerateContext);
    }
    if context.attribute_count() > bound {
        return Err(Error::AttributeBound {
            count: context.attribute_count(),
            bound,
        });
    }

    let m = context.attribute_count();
    let n = context.object_count();
    let mut intents = Vec::new();
    let mut current = context.closure_bits(&Bits::new(m));
    loop {
        intents.push(current.clone());
        match next_closure(context, &current) {
            Some(next) => current = next,
            None => break,
        }
    }

    let mut entries: Vec<(Bits, Bits)> = intents
        .into_iter()
        .map(|intent| {
            let extent = context.extent_bits(&intent);
            (intent, extent)
        })
        .collect();
    entries.sort_by(|(ia, ea), (ib, eb)| {
        eb.count_ones()
            .cmp(&ea.count_ones())
            .then_with(|| ia.ones().collect::<Vec<_>>().cmp(&ib.ones().collect()))
    });

    let concepts: Vec<FormalConcept> = entries
        .iter()
        .map(|(intent, extent)| FormalConcept {
            extent: extent.ones().collect(),
            intent: intent.ones().collect(),
            extent_percent: ratio(extent.count_ones() as u64 * 100, n as u64),
        })
        .collect();
    let extents: Vec<Bits> = entries.into_iter().map(|(_, extent)| extent).collect();

    let cover_edges = cover_edges(&extents);
    let top = 0;
    let bottom = concepts.len() - 1;
    debug_assert_eq!(concepts[top].extent.len(), n);
    debug_assert_eq!(concepts[bottom].intent.len(), m);

    Ok(ConceptLattice {
        concepts,
        cover_edges,
        top,
        bottom,
        object_count: n,
        attribute_count: m,
        extents,
    })
}

/// One step of canonical closure enumeration: the lectically next intent
/// after `current`, or None when `current` is the full attribute set.
fn next_closure(context: &FormalContext, current: &Bits) -> Option<Bits> {
    let m = context.attribute_count();
    let mut work = current.clone();
    for i in (0..m).rev() {
        if work.get(i) {
            work.clear(i);
        } else {
            let mut candidate = work.clone();
            candidate.set(i);
            let closed = context.closure_bits(&candidate);
            if closed.prefix_matches(&work, i) {
                return Some(closed);
            }
        }
    }
    None
}

/// Covering pairs (lower, upper): extent(lower) ⊂ extent(upper) with no
/// concept strictly between. Concepts are ordered by extent size descending,
/// so candidate uppers of a concept all precede it.
fn cover_edges(extents: &[Bits]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for (lower, extent) in extents.iter().enumerate() {
        let mut uppers: Vec<usize> = (0..extents.len())
            .filter(|&candidate| extent.is_strict_subset(&extents[candidate]))
            .collect();
        // smallest uppers first: a candidate is a cover iff no accepted
        // (necessarily smaller) cover sits strictly inside it
        uppers.sort_by_key(|&candidate| extents[candidate].count_ones());
        let mut covers: Vec<usize> = Vec::new();
        for candidate in uppers {
            if !covers
                .iter()
                .any(|&c| extents[c].is_strict_subset(&extents[candidate]))
            {
                covers.push(candidate);
            }
        }
        edges.extend(covers.into_iter().map(|upper| (lower, upper)));
    }
    edges.sort_unstable();
    edges
}

impl ConceptLattice {
    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn object_count(&self) -> usize {
        self.object_count
    }

    pub fn attribute_count(&self) -> usize {
        self.attribute_count
    }

    fn check_concept(&self, index: usize) -> Result<()> {
        if index >= self.concepts.len() {
            return Err(Error::IndexOutOfRange {
                index,
                size: self.concepts.len(),
            });
        }
        Ok(())
    }

    /// True when concept `a` is below-or-equal concept `b` (extent
    /// inclusion).
    pub fn leq(&self, a: usize, b: usize) -> Result<bool> {
        self.check_concept(a)?;
        self.check_concept(b)?;
        Ok(self.extents[a].is_subset(&self.extents[b]))
    }

    /// Downward closure of a concept: every concept at or below it,
    /// including the bottom.
    pub fn order_ideal(&self, concept: usize) -> Result<BTreeSet<usize>> {
        self.check_concept(concept)?;
        Ok((0..self.concepts.len())
            .filter(|&x| self.extents[x].is_subset(&self.extents[concept]))
            .collect())
    }

    /// Upward closure of a concept: every concept at or above it, including
    /// the top.
    pub fn order_filter(&self, concept: usize) -> Result<BTreeSet<usize>> {
        self.check_concept(concept)?;
        Ok((0..self.concepts.len())
            .filter(|&x| self.extents[concept].is_subset(&self.extents[x]))
            .collect())
    }

    /// The concept whose intent is the closure of `attrs`; always exists for
    /// in-range attribute indices.
    pub fn concept_for_intent(&self, attrs: &BTreeSet<usize>) -> Result<(usize, &FormalConcept)> {
        if let Some(&bad) = attrs.iter().find(|&&a| a >= self.attribute_count) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: self.attribute_count,
            });
        }
        // concepts are sorted by extent size descending, and the closure
        // concept has the largest extent among those whose intent covers
        // the query
        let attrs: Vec<usize> = attrs.iter().copied().collect();
        self.concepts
            .iter()
            .enumerate()
            .find(|(_, c)| is_subsequence(&attrs, &c.intent))
            .map(|(i, c)| (i, c))
            .ok_or(Error::DegenerateContext)
    }

    /// Extent percentage formatted with two fractional digits,
    /// round-half-even.
    pub fn extent_percent_str(&self, concept: usize) -> Result<String> {
        self.check_concept(concept)?;
        Ok(format_decimal(self.concepts[concept].extent_percent, 2))
    }
}

fn is_subsequence(needle: &[usize], haystack: &[usize]) -> bool {
    let mut pos = 0;
    for &n in needle {
        while pos < haystack.len() && haystack[pos] < n {
            pos += 1;
        }
        if pos == haystack.len() || haystack[pos] != n {
            return false;
        }
        pos += 1;
    }
    true
}

/// Association rules computed on the context side: supports and confidences
/// come from extent cardinalities (vertical intersection of attribute
/// columns), never from the transaction-scan route. Given the same
/// transactions and constraints this agrees exactly with
/// [`crate::rules::generate_rules`] over [`crate::itemsets::apriori`].
pub fn fca_rules(
    context: &FormalContext,
    constraints: &RuleConstraints,
) -> Result<Vec<AssociationRule>> {
    constraints.validate()?;
    if context.object_count() == 0 || context.attribute_count() == 0 {
        return Err(Error::DegenerateContext);
    }
    let n = context.object_count() as u64;
    let m = context.attribute_count();

    // depth-first vertical enumeration of frequent attribute sets; the
    // strict support threshold makes the search anti-monotone
    let mut frequent: HashMap<Vec<usize>, u64> = HashMap::new();
    let mut stack: Vec<(Vec<usize>, Bits, usize)> =
        vec![(Vec::new(), Bits::full(context.object_count()), 0)];
    while let Some((prefix, extent, start)) = stack.pop() {
        for attr in start..m {
            let mut narrowed = extent.clone();
            narrowed.and_assign(&context.cols[attr]);
            let count = narrowed.count_ones() as u64;
            if ratio(count, n) > constraints.min_support {
                let mut attrs = prefix.clone();
                attrs.push(attr);
                frequent.insert(attrs.clone(), count);
                stack.push((attrs, narrowed, attr + 1));
            }
        }
    }

    let mut rules = Vec::new();
    for (attrs, &count) in frequent.iter() {
        let k = attrs.len();
        if k < 2 {
            continue;
        }
        let full: u64 = (1 << k) - 1;
        for mask in 1..full {
            let antecedent: Vec<usize> =
                (0..k).filter(|i| mask & (1 << i) != 0).map(|i| attrs[i]).collect();
            let consequent: Vec<usize> =
                (0..k).filter(|i| mask & (1 << i) == 0).map(|i| attrs[i]).collect();
            let antecedent_items: Vec<u32> = antecedent
                .iter()
                .map(|&a| context.attributes[a])
                .collect();
            let consequent_items: Vec<u32> = consequent
                .iter()
                .map(|&a| context.attributes[a])
                .collect();
            if !constraints.admits(&antecedent_items, &consequent_items) {
                continue;
            }
            let count_a = frequent[&antecedent];
            if count_a == 0 {
                continue;
            }
            let confidence = ratio(count, count_a);
            if confidence < constraints.min_confidence {
                continue;
            }
            let count_c = frequent[&consequent];
            let lift = lift(confidence, ratio(count_c, n))?;
            rules.push(AssociationRule {
                antecedent: Itemset::new(antecedent_items),
                consequent: Itemset::new(consequent_items),
                support: ratio(count, n),
                confidence,
                lift,
            });
        }
    }
    rules.sort_by(canonical_rule_cmp);
    Ok(rules)
}

/// DOT digraph with one node per concept (labeled with its intent items and
/// extent percentage) and one edge per cover pair, lower -> upper. Node and
/// edge order are deterministic.
pub fn export_dot(lattice: &ConceptLattice, attribute_names: &[String]) -> Result<String> {
    if attribute_names.len() != lattice.attribute_count {
        return Err(Error::invalid_param(format!(
            "{} attribute names supplied for {} attributes",
            attribute_names.len(),
            lattice.attribute_count
        )));
    }
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n");
    for (index, concept) in lattice.concepts.iter().enumerate() {
        let mut names: Vec<&str> = concept
            .intent
            .iter()
            .map(|&a| attribute_names[a].as_str())
            .collect();
        names.sort_unstable();
        out.push_str(&format!(
            "  n{index} [label=\"{{{}}} {}%\"];\n",
            names.join(", ").replace('"', "\\\""),
            format_decimal(concept.extent_percent, 2),
        ));
    }
    for &(lower, upper) in &lattice.cover_edges {
        out.push_str(&format!("  n{lower} -> n{upper};\n"));
    }
    out.push_str("}\n");
    Ok(out)
}

#[derive(Serialize)]
struct ConceptJson<'a> {
    intent: Vec<&'a str>,
    extent_size: usize,
    extent_percent: Box<serde_json::value::RawValue>,
}

/// Concept list as a JSON array of `{intent, extent_size, extent_percent}`,
/// with the percentage printed at exactly two fractional digits.
pub fn concepts_to_json(lattice: &ConceptLattice, attribute_names: &[String]) -> Result<String> {
    if attribute_names.len() != lattice.attribute_count {
        return Err(Error::invalid_param("attribute name count mismatch"));
    }
    let body: Vec<ConceptJson> = lattice
        .concepts
        .iter()
        .map(|concept| {
            let mut intent: Vec<&str> = concept
                .intent
                .iter()
                .map(|&a| attribute_names[a].as_str())
                .collect();
            intent.sort_unstable();
            ConceptJson {
                intent,
                extent_size: concept.extent.len(),
                extent_percent: serde_json::value::RawValue::from_string(format_decimal(
                    concept.extent_percent,
                    2,
                ))
                .expect("fixed-point decimal is valid JSON"),
            }
        })
        .collect();
    serde_json::to_string_pretty(&body).map_err(|e| Error::format("concepts json", e.to_string()))
}

impl FormalConcept {
    pub fn extent_percent_f64(&self) -> f64 {
        to_f64(self.extent_percent)
    }
}
