//! `trendmine lattice`: the concept lattice of the ingested transactions as
//! DOT and JSON, with optional intent queries and ideal/filter listings.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use trendmine::fca::{build_lattice_with_bound, concepts_to_json, export_dot, FormalContext};
use trendmine::numeric::format_decimal;
use trendmine::{ConceptLattice, Error, Result, Vocabulary};

use crate::config::PipelineConfig;

use super::{ensure_out_dir, load_ingested, write_file, CONCEPTS_FILE, LATTICE_DOT_FILE, QUERY_FILE};

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum QueryMode {
    Ideal,
    Filter,
}

pub struct LatticeFlags {
    pub query: Option<String>,
    pub mode: Option<QueryMode>,
    pub max_attributes: Option<usize>,
}

#[derive(Serialize)]
struct ConceptOut {
    index: usize,
    intent: Vec<String>,
    extent_size: usize,
    extent_percent: Box<serde_json::value::RawValue>,
}

#[derive(Serialize)]
struct QueryOut {
    query: Vec<String>,
    concept: ConceptOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    members: Option<Vec<MemberOut>>,
}

#[derive(Serialize)]
struct MemberOut {
    index: usize,
    intent: Vec<String>,
}

fn concept_out(lattice: &ConceptLattice, names: &[String], index: usize) -> ConceptOut {
    let concept = &lattice.concepts[index];
    let mut intent: Vec<String> = concept.intent.iter().map(|&a| names[a].clone()).collect();
    intent.sort();
    ConceptOut {
        index,
        intent,
        extent_size: concept.extent.len(),
        extent_percent: serde_json::value::RawValue::from_string(format_decimal(
            concept.extent_percent,
            2,
        ))
        .expect("fixed-point decimal is valid JSON"),
    }
}

pub fn run(config: &PipelineConfig, out_dir: &Path, flags: &LatticeFlags) -> Result<()> {
    let (vocab, transactions) = load_ingested(out_dir)?;
    let context = FormalContext::from_transactions(&transactions)?;
    let bound = flags.max_attributes.unwrap_or(config.lattice.max_attributes);
    let lattice = build_lattice_with_bound(&context, bound)?;

    let names: Vec<String> = context
        .attribute_items()
        .iter()
        .map(|&id| {
            vocab
                .item(id)
                .map(str::to_owned)
                .unwrap_or_else(|| format!("<{id}>"))
        })
        .collect();

    let query_out = match &flags.query {
        Some(text) => Some(build_query(&lattice, &context, &vocab, &names, text, flags.mode)?),
        None => None,
    };

    ensure_out_dir(out_dir)?;
    write_file(&out_dir.join(LATTICE_DOT_FILE), &export_dot(&lattice, &names)?)?;
    write_file(&out_dir.join(CONCEPTS_FILE), &concepts_to_json(&lattice, &names)?)?;
    if let Some(query) = &query_out {
        let body = serde_json::to_string_pretty(query)
            .map_err(|e| Error::format("query json", e.to_string()))?;
        write_file(&out_dir.join(QUERY_FILE), &body)?;
    }

    println!(
        "objects={} attributes={} concepts={} cover_edges={}",
        context.object_count(),
        context.attribute_count(),
        lattice.len(),
        lattice.cover_edges.len(),
    );
    Ok(())
}

fn build_query(
    lattice: &ConceptLattice,
    context: &FormalContext,
    vocab: &Vocabulary,
    names: &[String],
    text: &str,
    mode: Option<QueryMode>,
) -> Result<QueryOut> {
    let tokens: Vec<String> = text.split_whitespace().map(str::to_owned).collect();
    let mut attrs = BTreeSet::new();
    for token in &tokens {
        let id = vocab
            .id_of(token)
            .ok_or_else(|| Error::invalid_param(format!("query item {token:?} is not in the vocabulary")))?;
        let attr = context.attribute_of_item(id).ok_or_else(|| {
            Error::invalid_param(format!("query item {token:?} occurs in no transaction"))
        })?;
        attrs.insert(attr);
    }
    let (index, _) = lattice.concept_for_intent(&attrs)?;
    let (mode_name, members) = match mode {
        Some(QueryMode::Ideal) => ("ideal", Some(lattice.order_ideal(index)?)),
        Some(QueryMode::Filter) => ("filter", Some(lattice.order_filter(index)?)),
        None => ("", None),
    };
    Ok(QueryOut {
        query: tokens,
        concept: concept_out(lattice, names, index),
        mode: members.is_some().then_some(mode_name),
        members: members.map(|set| {
            set.into_iter()
                .map(|member| {
                    let mut intent: Vec<String> = lattice.concepts[member]
                        .intent
                        .iter()
                        .map(|&a| names[a].clone())
                        .collect();
                    intent.sort();
                    MemberOut {
                        index: member,
                        intent,
                    }
                })
                .collect()
        }),
    })
}
