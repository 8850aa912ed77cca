//! Text and JSON renderings of engine results. All output is byte-deterministic.

use std::fmt::Write as _;

use serde_json::{json, Value};
use sqiis_core::eval::TableRow;
use sqiis_core::{
    cumulative_table, threshold_count, ClassificationResult, DomainRegistry, EvalReport, Outcome, OutcomeClass,
    TagRegistry, TagSet, TaggedQuery,
};

use crate::format::format_confidence;

const TABLE_CLASSES: [OutcomeClass; 2] = [OutcomeClass::C0, OutcomeClass::C1];

fn tag_list(tags: &TagRegistry, set: TagSet) -> String {
    if set.is_empty() {
        "-".to_string()
    } else {
        set.iter()
            .map(|p| tags.id(p).unwrap_or_default())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// One line per token: `<start>-<end>\t<surface>\t<tags>`; word span is half-open.
pub fn tagged_table(tags: &TagRegistry, tq: &TaggedQuery) -> String {
    let mut out = String::new();
    for t in &tq.tokens {
        let _ = writeln!(
            out,
            "{}-{}\t{}\t{}",
            t.start,
            t.start + t.word_count,
            t.surface,
            tag_list(tags, t.tags)
        );
    }
    out
}

fn tagged_json(tags: &TagRegistry, tq: &TaggedQuery) -> Value {
    let tokens: Vec<Value> = tq
        .tokens
        .iter()
        .map(|t| {
            json!({
                "surface": t.surface,
                "start": t.start,
                "words": t.word_count,
                "tags": t.tags.iter().map(|p| tags.id(p).unwrap_or_default()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "query": tq.raw, "tokens": tokens })
}

pub fn tagged_structured(tags: &TagRegistry, tq: &TaggedQuery) -> String {
    pretty(&tagged_json(tags, tq))
}

pub fn classification_table(
    tags: &TagRegistry,
    domains: &DomainRegistry,
    r: &ClassificationResult,
    verbose: bool,
) -> String {
    let mut out = String::new();
    match &r.outcome {
        Outcome::Domain {
            domain,
            confidence,
            combination,
        } => {
            let _ = writeln!(out, "domain\t{}", domains.id(*domain).unwrap_or_default());
            let _ = writeln!(out, "confidence\t{}", format_confidence(*confidence));
            let _ = writeln!(out, "combination\t{}", combination.render(tags));
        }
        Outcome::NoDomain(reason) => {
            let _ = writeln!(out, "domain\t{}", sqiis_core::NO_DOMAIN);
            let _ = writeln!(out, "reason\t{}", reason.as_str());
        }
    }
    if verbose {
        out.push_str("\n# tokens\n");
        out.push_str(&tagged_table(tags, &r.tagged));
        out.push_str("\n# candidates\n");
        for c in &r.candidates {
            let fired = match &c.fired {
                Some(v) => v
                    .values()
                    .iter()
                    .map(|&x| format_confidence(x))
                    .collect::<Vec<_>>()
                    .join(" "),
                None => "no-rule".to_string(),
            };
            let _ = writeln!(out, "{}\t{}", c.combination.render(tags), fired);
        }
    }
    out
}

pub fn classification_structured(tags: &TagRegistry, domains: &DomainRegistry, r: &ClassificationResult) -> String {
    let outcome = match &r.outcome {
        Outcome::Domain {
            domain,
            confidence,
            combination,
        } => json!({
            "domain": domains.id(*domain),
            "confidence": confidence,
            "combination": combination.render(tags),
        }),
        Outcome::NoDomain(reason) => json!({ "domain": null, "reason": reason.as_str() }),
    };
    let candidates: Vec<Value> = r
        .candidates
        .iter()
        .map(|c| {
            json!({
                "combination": c.combination.render(tags),
                "fired": c.fired.as_ref().map(|v| v.values().to_vec()),
            })
        })
        .collect();
    pretty(&json!({
        "outcome": outcome,
        "tagged": tagged_json(tags, &r.tagged),
        "candidates": candidates,
    }))
}

fn threshold_lines(out: &mut String, report: &EvalReport, taus: &[f64]) {
    for &tau in taus {
        for class in TABLE_CLASSES {
            let _ = writeln!(
                out,
                "threshold\t{tau}\t{class}\t{}",
                threshold_count(report, class, tau)
            );
        }
    }
}

/// Cumulative tables for C0 and C1, then C2 count, totals and threshold counts.
pub fn report_table(report: &EvalReport, taus: &[f64]) -> String {
    let mut out = String::new();
    for class in TABLE_CLASSES {
        let _ = writeln!(out, "class\t{class}");
        out.push_str("distance\tcases\tcumulative\n");
        for row in cumulative_table(report, class) {
            let _ = writeln!(out, "{row}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "c2\t{}", report.c2_count());
    let _ = writeln!(out, "total\t{}", report.total_cases());
    let _ = writeln!(out, "originals\t{}", report.originals_evaluated);
    threshold_lines(&mut out, report, taus);
    out
}

fn rows_json(rows: &[TableRow]) -> Vec<Value> {
    rows.iter()
        .map(|r| json!({ "distance": r.distance(), "cases": r.cases, "cumulative": r.cumulative }))
        .collect()
}

pub fn report_structured(tags: &TagRegistry, report: &EvalReport, taus: &[f64]) -> String {
    let mut classes = serde_json::Map::new();
    for class in TABLE_CLASSES {
        classes.insert(
            class.to_string(),
            json!({
                "count": report.class_count(class),
                "rows": rows_json(&cumulative_table(report, class)),
            }),
        );
    }
    let thresholds: Vec<Value> = taus
        .iter()
        .map(|&tau| {
            json!({
                "tau": tau,
                "C0": threshold_count(report, OutcomeClass::C0, tau),
                "C1": threshold_count(report, OutcomeClass::C1, tau),
            })
        })
        .collect();
    let cases: Vec<Value> = report
        .cases
        .iter()
        .map(|c| {
            json!({
                "original": c.original.render(tags),
                "perturbed": c.perturbed.render(tags),
                "original_result": c.original_result.values(),
                "perturbed_result": c.perturbed_result.as_ref().map(|v| v.values().to_vec()),
                "class": c.class.as_str(),
                "distance": c.distance,
            })
        })
        .collect();
    pretty(&json!({
        "originals_evaluated": report.originals_evaluated,
        "originals_skipped": report.originals_skipped,
        "total_cases": report.total_cases(),
        "classes": classes,
        "c2": report.c2_count(),
        "thresholds": thresholds,
        "cases": cases,
    }))
}

/// Columns for cumulative plots: class, running case number, distance.
pub fn plot_data(report: &EvalReport) -> String {
    let mut out = String::from("class\tcases\tdistance\n");
    for class in TABLE_CLASSES {
        for (i, d) in report.distances(class).iter().enumerate() {
            let _ = writeln!(out, "{class}\t{}\t{d:.4}", i + 1);
        }
    }
    out
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}
