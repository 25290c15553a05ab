//! Pattern mining over timestamped short-text corpora.
//!
//! The pipeline turns message records into transactions ([`corpus`]), mines
//! frequent itemsets with Apriori ([`itemsets`]), derives association rules
//! with confidence and lift ([`rules`]), builds formal-concept lattices with
//! ideal/filter queries ([`fca`]), and tracks time-windowed support and
//! confidence dynamics with threshold-based marker detection ([`dynamics`]).
//!
//! All statistics are exact rationals; floats and rounded decimals appear
//! only at serialization boundaries, making every output byte-reproducible.

pub mod corpus;
pub mod dynamics;
pub mod error;
pub mod fca;
pub mod fixtures;
pub mod itemsets;
pub mod numeric;
pub mod rules;

pub use corpus::{
    MessageRecord, SemanticFrame, TokenizeOptions, Transaction, TransactionBuild, Vocabulary,
};
pub use dynamics::{MarkerEvent, MarkerKind, SeriesPoint, TimeWindowSpec};
pub use error::{Error, Result};
pub use fca::{ConceptLattice, FormalConcept, FormalContext};
pub use itemsets::{FrequentItemset, Itemset, MiningParams};
pub use numeric::Rational;
pub use rules::{AssociationRule, RuleConstraints, RuleSortKey};
