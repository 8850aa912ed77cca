//! Robustness evaluation by single-tag substitution.
//!
//! Each rule-firing combination is perturbed by swapping one of its tags for
//! a tag it does not hold. The perturbed combination is fired against the
//! same rule base and the case is classed as:
//!
//! * `C0` the selected domain is unchanged,
//! * `C1` a different domain is selected,
//! * `C2` no domain can be selected (no rule, or an all-zero rule).
//!
//! The Euclidean distance between the two confidence vectors is recorded for
//! every case; a missing result counts as the all-zero vector.

use alloc::vec::Vec;
use core::fmt;

use crate::classifier::select_domain;
use crate::error::{Error, Result};
use crate::rulebase::{ConfidenceVector, RuleBase};
use crate::rulegen::enumerate_combinations;
use crate::tagset::TagSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutcomeClass {
    C0,
    C1,
    C2,
}

impl OutcomeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeClass::C0 => "C0",
            OutcomeClass::C1 => "C1",
            OutcomeClass::C2 => "C2",
        }
    }
}

impl fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalCase {
    pub original: TagSet,
    pub perturbed: TagSet,
    pub original_result: ConfidenceVector,
    pub perturbed_result: Option<ConfidenceVector>,
    pub class: OutcomeClass,
    pub distance: f64,
}

/// Every substitution of one held tag by one absent tag, ordered by the
/// removed position and then the added position.
pub fn perturb_one_tag(q: TagSet) -> Result<Vec<TagSet>> {
    if q.is_empty() {
        return Err(Error::EmptyTagSet);
    }
    let absent: Vec<usize> = (0..q.width()).filter(|&j| !q.contains(j)).collect();
    Ok(q.iter()
        .flat_map(|i| absent.iter().map(move |&j| q.without(i).with(j)))
        .collect())
}

pub fn euclidean_distance(a: &ConfidenceVector, b: &ConfidenceVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionError {
            expected: a.len(),
            found: b.len(),
        });
    }
    let sq: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(libm::sqrt(sq))
}

/// Cases for one original combination, or `None` when it selects no domain.
pub fn evaluate_original(rb: &RuleBase, original: TagSet) -> Result<Option<Vec<EvalCase>>> {
    let Some(base) = rb.fire(original)? else {
        return Ok(None);
    };
    let Some((base_domain, _)) = select_domain(base) else {
        return Ok(None);
    };
    let zeros = ConfidenceVector::zeros(rb.domain_count());
    let mut cases = Vec::new();
    for perturbed in perturb_one_tag(original)? {
        let fired = rb.fire(perturbed)?;
        let class = match fired.and_then(select_domain) {
            Some((d, _)) if d == base_domain => OutcomeClass::C0,
            Some(_) => OutcomeClass::C1,
            None => OutcomeClass::C2,
        };
        let distance = euclidean_distance(base, fired.unwrap_or(&zeros))?;
        cases.push(EvalCase {
            original,
            perturbed,
            original_result: base.clone(),
            perturbed_result: fired.cloned(),
            class,
            distance,
        });
    }
    Ok(Some(cases))
}

/// All combinations whose size lies in `size_min..=size_max`, in enumeration order.
pub fn originals(tag_count: usize, size_min: usize, size_max: usize) -> Result<Vec<TagSet>> {
    if size_min < 1 || size_min > size_max || size_max > tag_count {
        return Err(Error::RangeError(alloc::format!(
            "sizes {size_min}..{size_max} not within 1..{tag_count}"
        )));
    }
    Ok(enumerate_combinations(tag_count)?
        .into_iter()
        .filter(|q| (size_min..=size_max).contains(&q.len()))
        .collect())
}

/// Serial evaluation over every original of the given sizes.
pub fn run_evaluation(rb: &RuleBase, size_min: usize, size_max: usize) -> Result<EvalReport> {
    let mut per_original = Vec::new();
    for q in originals(rb.tag_count(), size_min, size_max)? {
        per_original.push(evaluate_original(rb, q)?);
    }
    Ok(EvalReport::from_results(per_original))
}

/// One row of a cumulative table; `bucket` is the distance in units of 1e-4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub bucket: i64,
    pub cases: usize,
    pub cumulative: usize,
}

impl TableRow {
    pub fn distance(&self) -> f64 {
        self.bucket as f64 / 1e4
    }
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{:04}\t{}\t{}",
            self.bucket / 10_000,
            self.bucket % 10_000,
            self.cases,
            self.cumulative
        )
    }
}

/// Distance rounded to 4 decimals, as an integer number of 1e-4 units.
pub fn bucket_of(distance: f64) -> i64 {
    libm::round(distance * 1e4) as i64
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Sorted by (original, perturbed).
    pub cases: Vec<EvalCase>,
    pub originals_evaluated: usize,
    pub originals_skipped: usize,
    distances: [Vec<f64>; 3],
}

impl EvalReport {
    /// Aggregates per-original results in any order; the report only depends
    /// on the multiset of inputs.
    pub fn from_results<I>(per_original: I) -> Self
    where
        I: IntoIterator<Item = Option<Vec<EvalCase>>>,
    {
        let mut cases = Vec::new();
        let mut evaluated = 0;
        let mut skipped = 0;
        for r in per_original {
            match r {
                Some(c) => {
                    evaluated += 1;
                    cases.extend(c);
                }
                None => skipped += 1,
            }
        }
        cases.sort_by_key(|c| (c.original, c.perturbed));
        let mut distances: [Vec<f64>; 3] = Default::default();
        for c in &cases {
            distances[c.class as usize].push(c.distance);
        }
        for d in &mut distances {
            d.sort_by(f64::total_cmp);
        }
        EvalReport {
            cases,
            originals_evaluated: evaluated,
            originals_skipped: skipped,
            distances,
        }
    }

    pub fn total_cases(&self) -> usize {
        self.cases.len()
    }

    pub fn class_count(&self, class: OutcomeClass) -> usize {
        self.distances[class as usize].len()
    }

    pub fn c2_count(&self) -> usize {
        self.class_count(OutcomeClass::C2)
    }

    /// Ascending distances of one class.
    pub fn distances(&self, class: OutcomeClass) -> &[f64] {
        &self.distances[class as usize]
    }
}

/// Rows of (4-decimal distance, cases, running total) in ascending distance.
pub fn cumulative_table(report: &EvalReport, class: OutcomeClass) -> Vec<TableRow> {
    let mut rows: Vec<TableRow> = Vec::new();
    let mut cumulative = 0;
    for &d in report.distances(class) {
        let bucket = bucket_of(d);
        cumulative += 1;
        match rows.last_mut() {
            Some(row) if row.bucket == bucket => {
                row.cases += 1;
                row.cumulative = cumulative;
            }
            _ => rows.push(TableRow {
                bucket,
                cases: 1,
                cumulative,
            }),
        }
    }
    rows
}

/// Cases of `class` whose distance is at most `tau`.
pub fn threshold_count(report: &EvalReport, class: OutcomeClass, tau: f64) -> usize {
    report.distances(class).partition_point(|&d| d <= tau)
}
