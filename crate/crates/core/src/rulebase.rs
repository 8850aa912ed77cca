//! Rule storage, exact-match firing and rule-base validation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::rulegen::ExclusionSet;
use crate::tagset::TagSet;

/// Tolerance for sum-to-one and one-hot checks.
pub const CONFIDENCE_TOLERANCE: f64 = 1e-9;

/// Per-domain confidences, indexed by domain position.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfidenceVector(Vec<f64>);

impl ConfidenceVector {
    pub fn new(values: Vec<f64>) -> Self {
        ConfidenceVector(values)
    }

    pub fn zeros(len: usize) -> Self {
        ConfidenceVector(alloc::vec![0.0; len])
    }

    pub fn one_hot(len: usize, domain: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[domain] = 1.0;
        v
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    fn is_one_hot(&self) -> bool {
        let ones = self
            .0
            .iter()
            .filter(|&&v| (v - 1.0).abs() <= CONFIDENCE_TOLERANCE)
            .count();
        let zeros = self.0.iter().filter(|&&v| v.abs() <= CONFIDENCE_TOLERANCE).count();
        ones == 1 && zeros == self.0.len() - 1
    }
}

impl From<Vec<f64>> for ConfidenceVector {
    fn from(v: Vec<f64>) -> Self {
        ConfidenceVector(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One-hot (or all-zero) confidences assigned by a person.
    HandCrafted,
    /// Normalized confidences derived from a weight matrix.
    SystemGenerated,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::HandCrafted => "hand-crafted",
            Mode::SystemGenerated => "system-generated",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hand-crafted" => Ok(Mode::HandCrafted),
            "system-generated" => Ok(Mode::SystemGenerated),
            other => Err(Error::MalformedConfig(alloc::format!(
                "unknown rule-base mode `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub combination: TagSet,
    pub confidences: ConfidenceVector,
}

/// A rule that breaks a rule-base invariant. `rule` is the index in file order.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyCombination {
        rule: usize,
    },
    InvalidConfidence {
        rule: usize,
        domain: usize,
        value: f64,
    },
    /// Hand-crafted rule that is neither one-hot nor all-zero.
    ModeViolation {
        rule: usize,
        combination: TagSet,
    },
    /// System-generated rule whose confidences neither sum to 1 nor are all zero.
    NormalizationViolation {
        rule: usize,
        combination: TagSet,
        sum: f64,
    },
    ExcludedCombination {
        rule: usize,
        combination: TagSet,
        pair: (usize, usize),
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyCombination { rule } => write!(f, "rule #{rule} has an empty combination"),
            Violation::InvalidConfidence { rule, domain, value } => {
                write!(f, "rule #{rule}: confidence {value} for domain {domain} outside [0,1]")
            }
            Violation::ModeViolation { rule, combination } => {
                write!(
                    f,
                    "rule #{rule} {combination}: hand-crafted confidences must be one-hot or all zero"
                )
            }
            Violation::NormalizationViolation { rule, combination, sum } => {
                write!(
                    f,
                    "rule #{rule} {combination}: confidences sum to {sum}, expected 1 or all zero"
                )
            }
            Violation::ExcludedCombination {
                rule,
                combination,
                pair,
            } => write!(
                f,
                "rule #{rule} {combination}: contains excluded pair (t{}, t{})",
                pair.0, pair.1
            ),
        }
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        match v {
            Violation::EmptyCombination { .. } => Error::EmptyTagSet,
            Violation::InvalidConfidence { value, .. } => Error::InvalidConfidence(value),
            Violation::ExcludedCombination { .. } => Error::ExcludedCombination(v),
            _ => Error::ModeViolation(v),
        }
    }
}

/// Rules keyed by their exact tag combination.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleBase {
    mode: Mode,
    tag_count: usize,
    domain_count: usize,
    exclusions: ExclusionSet,
    rules: Vec<Rule>,
    index: BTreeMap<u64, usize>,
}

impl RuleBase {
    /// Builds and validates a rule base; the first violation becomes the error.
    pub fn new(
        mode: Mode,
        tag_count: usize,
        domain_count: usize,
        exclusions: ExclusionSet,
        rules: Vec<Rule>,
    ) -> Result<Self> {
        let rb = Self::assemble(mode, tag_count, domain_count, exclusions, rules)?;
        match rb.validate().into_iter().next() {
            Some(v) => Err(v.into()),
            None => Ok(rb),
        }
    }

    /// Builds the keyed index without checking confidence invariants.
    ///
    /// Duplicate combinations and dimension mismatches are still rejected,
    /// since the index cannot represent them.
    pub fn assemble(
        mode: Mode,
        tag_count: usize,
        domain_count: usize,
        exclusions: ExclusionSet,
        rules: Vec<Rule>,
    ) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, rule) in rules.iter().enumerate() {
            if rule.combination.width() != tag_count {
                return Err(Error::DimensionError {
                    expected: tag_count,
                    found: rule.combination.width(),
                });
            }
            if rule.confidences.len() != domain_count {
                return Err(Error::DimensionError {
                    expected: domain_count,
                    found: rule.confidences.len(),
                });
            }
            if index.insert(rule.combination.bits(), i).is_some() {
                return Err(Error::DuplicateRule(alloc::format!("{}", rule.combination)));
            }
        }
        Ok(RuleBase {
            mode,
            tag_count,
            domain_count,
            exclusions,
            rules,
            index,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn tag_count(&self) -> usize {
        self.tag_count
    }

    pub fn domain_count(&self) -> usize {
        self.domain_count
    }

    pub fn exclusions(&self) -> &ExclusionSet {
        &self.exclusions
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Exact-match lookup. `Ok(None)` means no rule has this combination.
    pub fn fire(&self, q: TagSet) -> Result<Option<&ConfidenceVector>> {
        if q.is_empty() {
            return Err(Error::EmptyTagSet);
        }
        Ok(self.index.get(&q.bits()).map(|&i| &self.rules[i].confidences))
    }

    /// Every broken invariant for the declared mode; empty when well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, rule) in self.rules.iter().enumerate() {
            let q = rule.combination;
            if q.is_empty() {
                out.push(Violation::EmptyCombination { rule: i });
            }
            let mut in_range = true;
            for (d, &value) in rule.confidences.values().iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    in_range = false;
                    out.push(Violation::InvalidConfidence {
                        rule: i,
                        domain: d,
                        value,
                    });
                }
            }
            if !in_range {
                continue;
            }
            match self.mode {
                Mode::HandCrafted => {
                    if !rule.confidences.is_all_zero() && !rule.confidences.is_one_hot() {
                        out.push(Violation::ModeViolation {
                            rule: i,
                            combination: q,
                        });
                    }
                }
                Mode::SystemGenerated => {
                    let sum = rule.confidences.sum();
                    if !rule.confidences.is_all_zero() && (sum - 1.0).abs() > CONFIDENCE_TOLERANCE {
                        out.push(Violation::NormalizationViolation {
                            rule: i,
                            combination: q,
                            sum,
                        });
                    }
                    if let Some(pair) = self.exclusions.first_violated(q) {
                        out.push(Violation::ExcludedCombination {
                            rule: i,
                            combination: q,
                            pair,
                        });
                    }
                }
            }
        }
        out
    }
}
