use alloc::string::String;
use core::fmt;

use crate::rulebase::Violation;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The same identifier appears twice in a registry.
    DuplicateIdentifier { kind: &'static str, id: String },
    /// Structurally invalid configuration (empty id, empty registry, empty phrase ...).
    MalformedConfig(String),
    /// A lexicon referenced a tag outside the registry.
    UnknownTag(String),
    /// A tag or domain id (or position) that the registries do not know.
    UnknownIdentifier(String),
    /// Query is empty once normalized.
    EmptyQuery,
    /// No token of the query carries a tag.
    NoTagsFound,
    /// Rule firing and perturbation need at least one set bit.
    EmptyTagSet,
    /// Two rules share the same tag combination.
    DuplicateRule(String),
    /// A confidence or weight that is negative, non-finite, or above 1 where 1 is the cap.
    InvalidConfidence(f64),
    /// A rule violates the invariants of its rule-base mode.
    ModeViolation(Violation),
    /// A rule combination contains an excluded tag pair.
    ExcludedCombination(Violation),
    /// Vector or matrix lengths disagree.
    DimensionError { expected: usize, found: usize },
    /// A numeric argument lies outside its permitted range.
    RangeError(String),
    /// A label sheet row still carries the placeholder label.
    Unlabeled(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DuplicateIdentifier { kind, id } => write!(f, "duplicate {kind} identifier `{id}`"),
            Error::MalformedConfig(msg) => write!(f, "malformed configuration: {msg}"),
            Error::UnknownTag(id) => write!(f, "unknown tag `{id}`"),
            Error::UnknownIdentifier(id) => write!(f, "unknown identifier `{id}`"),
            Error::EmptyQuery => f.write_str("query is empty"),
            Error::NoTagsFound => f.write_str("no token of the query carries a tag"),
            Error::EmptyTagSet => f.write_str("tag set is empty"),
            Error::DuplicateRule(c) => write!(f, "duplicate rule for combination {c}"),
            Error::InvalidConfidence(v) => write!(f, "invalid confidence value {v}"),
            Error::ModeViolation(v) => write!(f, "mode violation: {v}"),
            Error::ExcludedCombination(v) => write!(f, "excluded combination: {v}"),
            Error::DimensionError { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::RangeError(msg) => write!(f, "out of range: {msg}"),
            Error::Unlabeled(c) => write!(f, "combination {c} has no label"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
