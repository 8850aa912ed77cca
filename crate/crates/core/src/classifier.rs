//! Query → domain pipeline.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lexicon::LexiconSet;
use crate::registry::{DomainRegistry, TagRegistry};
use crate::rulebase::{ConfidenceVector, RuleBase};
use crate::tagger::{candidate_tag_sets, tokenize_and_tag, TaggedQuery, DEFAULT_CANDIDATE_CAP};
use crate::tagset::TagSet;

/// Confidences closer than this are ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoDomainReason {
    NoTags,
    NoRule,
    ZeroConfidence,
}

impl NoDomainReason {
    pub fn as_str(self) -> &'static str {
        match self {
            NoDomainReason::NoTags => "no-tags",
            NoDomainReason::NoRule => "no-rule",
            NoDomainReason::ZeroConfidence => "zero-confidence",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Domain {
        domain: usize,
        confidence: f64,
        combination: TagSet,
    },
    NoDomain(NoDomainReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateOutcome {
    pub combination: TagSet,
    pub fired: Option<ConfidenceVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub outcome: Outcome,
    pub tagged: TaggedQuery,
    pub candidates: Vec<CandidateOutcome>,
}

impl ClassificationResult {
    pub fn domain(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Domain { domain, .. } => Some(domain),
            Outcome::NoDomain(_) => None,
        }
    }
}

/// Argmax with ties going to the lowest domain position. `None` for an all-zero vector.
pub fn select_domain(c: &ConfidenceVector) -> Option<(usize, f64)> {
    if c.is_all_zero() {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    for (d, &v) in c.values().iter().enumerate() {
        match best {
            Some((_, b)) if v <= b + TIE_TOLERANCE => {}
            _ => best = Some((d, v)),
        }
    }
    best
}

/// Tags the query, fires every candidate combination and keeps the fired
/// rule with the highest maximum confidence. Ties go to the earlier
/// candidate, then to the lower domain position.
pub fn classify(query: &str, lex: &LexiconSet, rb: &RuleBase, cap: usize) -> Result<ClassificationResult> {
    let tagged = tokenize_and_tag(query, lex)?;
    let combinations = match candidate_tag_sets(&tagged, cap) {
        Ok(c) => c,
        Err(Error::NoTagsFound) => {
            return Ok(ClassificationResult {
                outcome: Outcome::NoDomain(NoDomainReason::NoTags),
                tagged,
                candidates: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };

    let mut candidates = Vec::with_capacity(combinations.len());
    let mut best: Option<(usize, f64, TagSet)> = None;
    let mut any_fired = false;
    for q in combinations {
        let fired = rb.fire(q)?.cloned();
        if let Some(c) = &fired {
            any_fired = true;
            if let Some((d, v)) = select_domain(c) {
                match best {
                    Some((_, b, _)) if v <= b + TIE_TOLERANCE => {}
                    _ => best = Some((d, v, q)),
                }
            }
        }
        candidates.push(CandidateOutcome { combination: q, fired });
    }

    let outcome = match best {
        Some((domain, confidence, combination)) => Outcome::Domain {
            domain,
            confidence,
            combination,
        },
        None if any_fired => Outcome::NoDomain(NoDomainReason::ZeroConfidence),
        None => Outcome::NoDomain(NoDomainReason::NoRule),
    };
    Ok(ClassificationResult {
        outcome,
        tagged,
        candidates,
    })
}

/// Loaded registries, lexicons and rule base with consistent dimensions.
#[derive(Debug, Clone)]
pub struct Engine {
    pub tags: TagRegistry,
    pub domains: DomainRegistry,
    pub lexicon: LexiconSet,
    pub rulebase: RuleBase,
    pub candidate_cap: usize,
}

impl Engine {
    pub fn new(tags: TagRegistry, domains: DomainRegistry, lexicon: LexiconSet, rulebase: RuleBase) -> Result<Self> {
        for found in [lexicon.tag_count(), rulebase.tag_count()] {
            if found != tags.len() {
                return Err(Error::DimensionError {
                    expected: tags.len(),
                    found,
                });
            }
        }
        if rulebase.domain_count() != domains.len() {
            return Err(Error::DimensionError {
                expected: domains.len(),
                found: rulebase.domain_count(),
            });
        }
        Ok(Engine {
            tags,
            domains,
            lexicon,
            rulebase,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        })
    }

    #[must_use]
    pub fn with_candidate_cap(mut self, cap: usize) -> Self {
        self.candidate_cap = cap;
        self
    }

    pub fn classify(&self, query: &str) -> Result<ClassificationResult> {
        classify(query, &self.lexicon, &self.rulebase, self.candidate_cap)
    }
}
