//! Rule-base construction.
//!
//! Two strategies are provided. A *system-generated* rule base sums a
//! tag × domain weight for every tag of a combination and normalizes the
//! per-domain totals. A *hand-crafted* rule base starts from a scaffold of
//! every valid combination, which a person labels with a single domain (or
//! none); labels compile to one-hot confidence vectors.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rulebase::{ConfidenceVector, Mode, Rule, RuleBase};
use crate::tagset::TagSet;

/// Largest tag count accepted by [`enumerate_combinations`].
pub const MAX_ENUMERATION_TAGS: usize = 24;

/// Unordered tag pairs that cannot occur together in one combination.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExclusionSet {
    pairs: BTreeSet<(usize, usize)>,
}

impl ExclusionSet {
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(tag_count: usize, pairs: I) -> Result<Self> {
        let mut set = ExclusionSet::default();
        for (a, b) in pairs {
            set.insert(tag_count, a, b)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, tag_count: usize, a: usize, b: usize) -> Result<()> {
        if a >= tag_count || b >= tag_count {
            return Err(Error::UnknownIdentifier(alloc::format!("tag position {}", a.max(b))));
        }
        if a == b {
            return Err(Error::MalformedConfig(alloc::format!(
                "tag t{a} cannot be excluded with itself"
            )));
        }
        self.pairs.insert((a.min(b), a.max(b)));
        Ok(())
    }

    /// Pairs as `(lower, higher)` positions, sorted.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub(crate) fn first_violated(&self, q: TagSet) -> Option<(usize, usize)> {
        self.pairs
            .iter()
            .copied()
            .find(|&(a, b)| q.contains(a) && q.contains(b))
    }
}

/// False iff `q` holds both members of some excluded pair.
pub fn is_valid_combination(q: TagSet, ex: &ExclusionSet) -> bool {
    ex.first_violated(q).is_none()
}

/// All non-empty subsets of `n` tags in ascending bit-pattern order.
pub fn enumerate_combinations(n: usize) -> Result<Vec<TagSet>> {
    if !(1..=MAX_ENUMERATION_TAGS).contains(&n) {
        return Err(Error::RangeError(alloc::format!(
            "tag count {n} not in 1..={MAX_ENUMERATION_TAGS}"
        )));
    }
    (1..1u64 << n).map(|bits| TagSet::from_bits(n, bits)).collect()
}

/// Non-negative tag × domain weights, row-major by tag.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    tags: usize,
    domains: usize,
    values: Vec<f64>,
}

impl WeightMatrix {
    /// Rejects negative or non-finite entries. All-zero rows are allowed here;
    /// see [`zero_rows`](Self::zero_rows).
    pub fn new(tags: usize, domains: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != tags * domains {
            return Err(Error::DimensionError {
                expected: tags * domains,
                found: values.len(),
            });
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidConfidence(bad));
        }
        Ok(WeightMatrix { tags, domains, values })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let domains = rows.first().map_or(0, |r| r.len());
        if let Some(r) = rows.iter().find(|r| r.len() != domains) {
            return Err(Error::DimensionError {
                expected: domains,
                found: r.len(),
            });
        }
        Self::new(rows.len(), domains, rows.concat())
    }

    pub fn zeros(tags: usize, domains: usize) -> Self {
        WeightMatrix {
            tags,
            domains,
            values: alloc::vec![0.0; tags * domains],
        }
    }

    pub fn tag_count(&self) -> usize {
        self.tags
    }

    pub fn domain_count(&self) -> usize {
        self.domains
    }

    pub fn get(&self, tag: usize, domain: usize) -> f64 {
        self.values[tag * self.domains + domain]
    }

    pub fn set(&mut self, tag: usize, domain: usize, value: f64) -> Result<()> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidConfidence(value));
        }
        if tag >= self.tags || domain >= self.domains {
            return Err(Error::UnknownIdentifier(alloc::format!("weight ({tag}, {domain})")));
        }
        self.values[tag * self.domains + domain] = value;
        Ok(())
    }

    /// Tags whose weights are all zero, i.e. that contribute to no domain.
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.tags)
            .filter(|&t| (0..self.domains).all(|d| self.get(t, d) == 0.0))
            .collect()
    }

    #[must_use]
    pub fn scaled(&self, factor: f64) -> Self {
        WeightMatrix {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

/// Sum of `w[i][k]` over the tags `i` present in `q`.
pub fn raw_confidence(w: &WeightMatrix, q: TagSet, k: usize) -> f64 {
    q.iter().map(|i| w.get(i, k)).sum()
}

pub fn raw_confidences(w: &WeightMatrix, q: TagSet) -> ConfidenceVector {
    (0..w.domain_count())
        .map(|k| raw_confidence(w, q, k))
        .collect::<Vec<_>>()
        .into()
}

/// Divides every component by the total. A zero total yields the all-zero vector.
pub fn normalize(raw: &ConfidenceVector) -> Result<ConfidenceVector> {
    if let Some(&bad) = raw.values().iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidConfidence(bad));
    }
    let total = raw.sum();
    if total == 0.0 {
        return Ok(ConfidenceVector::zeros(raw.len()));
    }
    Ok(raw.values().iter().map(|v| v / total).collect::<Vec<_>>().into())
}

/// One normalized rule per valid combination; excluded combinations are skipped.
pub fn generate_rulebase(w: &WeightMatrix, ex: &ExclusionSet) -> Result<RuleBase> {
    let rules = enumerate_combinations(w.tag_count())?
        .into_iter()
        .filter(|&q| is_valid_combination(q, ex))
        .map(|q| {
            Ok(Rule {
                combination: q,
                confidences: normalize(&raw_confidences(w, q))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RuleBase::new(
        Mode::SystemGenerated,
        w.tag_count(),
        w.domain_count(),
        ex.clone(),
        rules,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Domain(usize),
    NoDomain,
    /// Placeholder left by the scaffold.
    Unlabeled,
}

/// Worksheet for the manual labelling pass.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSheet {
    pub tag_count: usize,
    pub domain_count: usize,
    pub exclusions: ExclusionSet,
    pub rows: Vec<(TagSet, Label)>,
}

impl LabelSheet {
    /// Every valid combination, unlabeled, in enumeration order.
    pub fn scaffold(tag_count: usize, domain_count: usize, ex: &ExclusionSet) -> Result<Self> {
        let rows = enumerate_combinations(tag_count)?
            .into_iter()
            .filter(|&q| is_valid_combination(q, ex))
            .map(|q| (q, Label::Unlabeled))
            .collect();
        Ok(LabelSheet {
            tag_count,
            domain_count,
            exclusions: ex.clone(),
            rows,
        })
    }
}

/// Turns labels into one-hot rules; `NoDomain` rows become all-zero rules.
pub fn compile_handcrafted(sheet: &LabelSheet) -> Result<RuleBase> {
    let mut rules = Vec::with_capacity(sheet.rows.len());
    for &(q, label) in &sheet.rows {
        let confidences = match label {
            Label::Domain(d) if d < sheet.domain_count => ConfidenceVector::one_hot(sheet.domain_count, d),
            Label::Domain(d) => return Err(Error::UnknownIdentifier(alloc::format!("domain position {d}"))),
            Label::NoDomain => ConfidenceVector::zeros(sheet.domain_count),
            Label::Unlabeled => return Err(Error::Unlabeled(alloc::format!("{q}"))),
        };
        rules.push(Rule {
            combination: q,
            confidences,
        });
    }
    RuleBase::new(
        Mode::HandCrafted,
        sheet.tag_count,
        sheet.domain_count,
        sheet.exclusions.clone(),
        rules,
    )
}
