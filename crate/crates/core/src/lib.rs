//! Rule-based short query intent identification.
//!
//! A query is split into word n-grams, each n-gram is looked up in one
//! lexicon per tag, and the resulting tag combination is matched exactly
//! against a rule base mapping combinations to per-domain confidences. The
//! domain with the highest confidence wins.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the
//! reference configuration and the command-line tool live in the `sqiis`
//! crate.

#![no_std]
#![warn(rust_2018_idioms, missing_debug_implementations)]

extern crate alloc;

pub mod classifier;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod registry;
pub mod rulebase;
pub mod rulegen;
pub mod tagger;
pub mod tagset;

pub use classifier::{classify, select_domain, ClassificationResult, Engine, NoDomainReason, Outcome};
pub use error::{Error, Result};
pub use eval::{
    cumulative_table, euclidean_distance, perturb_one_tag, run_evaluation, threshold_count, EvalCase, EvalReport,
    OutcomeClass,
};
pub use lexicon::LexiconSet;
pub use registry::{DomainRegistry, TagRegistry, NO_DOMAIN};
pub use rulebase::{ConfidenceVector, Mode, Rule, RuleBase, Violation};
pub use rulegen::{
    compile_handcrafted, enumerate_combinations, generate_rulebase, is_valid_combination, normalize, raw_confidence,
    ExclusionSet, Label, LabelSheet, WeightMatrix,
};
pub use tagger::{candidate_tag_sets, tokenize_and_tag, TaggedQuery, TaggedToken};
pub use tagset::TagSet;
