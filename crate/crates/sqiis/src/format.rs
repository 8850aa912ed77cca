//! Line-oriented, tab-separated configuration files.
//!
//! All formats share the same lexical rules: UTF-8, one record per line,
//! fields separated by a single TAB, blank lines and lines starting with `#`
//! ignored, trailing `\r` tolerated.

use std::fmt::Write as _;

use sqiis_core::registry::{Registry, RegistryKind, NO_DOMAIN};
use sqiis_core::{
    ConfidenceVector, DomainRegistry, Error as CoreError, ExclusionSet, Label, LabelSheet, LexiconSet, Mode, Rule,
    RuleBase, TagRegistry, TagSet, WeightMatrix,
};

/// Placeholder label written by the scaffold.
pub const UNLABELED: &str = "?";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: CoreError,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl FormatError {
    /// The engine error behind this failure, if any.
    pub fn core(&self) -> Option<&CoreError> {
        match self {
            FormatError::Invalid { source, .. } | FormatError::Core(source) => Some(source),
            FormatError::Syntax { .. } => None,
        }
    }
}

type Result<T> = std::result::Result<T, FormatError>;

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn at(line: usize) -> impl FnOnce(CoreError) -> FormatError {
    move |source| FormatError::Invalid { line, source }
}

/// Non-blank, non-comment lines with 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

// ---------------------------------------------------------------------------
// registries

pub fn load_registries(text: &str) -> Result<(TagRegistry, DomainRegistry)> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Tags,
        Domains,
    }
    let mut section = Section::None;
    let mut tags = Vec::new();
    let mut domains = Vec::new();
    let mut seen_tags = false;
    let mut seen_domains = false;
    for (line, rec) in records(text) {
        match rec.trim() {
            "[tags]" if !seen_tags => {
                section = Section::Tags;
                seen_tags = true;
                continue;
            }
            "[domains]" if !seen_domains => {
                section = Section::Domains;
                seen_domains = true;
                continue;
            }
            s if s.starts_with('[') => return Err(syntax(line, format!("unexpected section header `{s}`"))),
            _ => {}
        }
        let (id, description) = rec.split_once('\t').unwrap_or((rec, ""));
        let entry = (id.trim().to_string(), description.trim().to_string());
        match section {
            Section::Tags => tags.push((line, entry)),
            Section::Domains => domains.push((line, entry)),
            Section::None => return Err(syntax(line, "entry outside a [tags] or [domains] section")),
        }
    }
    Ok((build_registry(tags)?, build_registry(domains)?))
}

fn build_registry<K: RegistryKind>(entries: Vec<(usize, (String, String))>) -> Result<Registry<K>> {
    // the core constructor has no line numbers, so report per-entry problems here
    let mut seen = std::collections::BTreeSet::new();
    for (line, (id, _)) in &entries {
        let single = Registry::<K>::new([(id.as_str(), "")]);
        if let Err(e @ CoreError::MalformedConfig(_)) = single {
            return Err(at(*line)(e));
        }
        if !seen.insert(id.as_str()) {
            return Err(at(*line)(CoreError::DuplicateIdentifier {
                kind: K::NAME,
                id: id.clone(),
            }));
        }
    }
    Ok(Registry::new(entries.into_iter().map(|(_, e)| e))?)
}

pub fn write_registries(tags: &TagRegistry, domains: &DomainRegistry) -> String {
    let mut out = String::from("[tags]\n");
    for e in tags.entries() {
        let _ = writeln!(out, "{}\t{}", e.id, e.description);
    }
    out.push_str("\n[domains]\n");
    for e in domains.entries() {
        let _ = writeln!(out, "{}\t{}", e.id, e.description);
    }
    out
}

// ---------------------------------------------------------------------------
// lexicons

pub fn load_lexicons(tags: &TagRegistry, text: &str) -> Result<LexiconSet> {
    let mut builder = LexiconSet::builder(tags);
    for (line, rec) in records(text) {
        let (tag, phrase) = rec
            .split_once('\t')
            .ok_or_else(|| syntax(line, "expected `<tag-id>\\t<phrase>`"))?;
        builder.add(tag.trim(), phrase).map_err(at(line))?;
    }
    Ok(builder.build())
}

pub fn write_lexicons(tags: &TagRegistry, lex: &LexiconSet) -> String {
    let mut out = String::new();
    for (t, phrase) in lex.entries() {
        let _ = writeln!(out, "{}\t{}", tags.id(t).unwrap_or_default(), phrase);
    }
    out
}

// ---------------------------------------------------------------------------
// shared pieces of rule-base, label sheet, weight and exclusion files

fn parse_combination(tags: &TagRegistry, field: &str, line: usize) -> Result<TagSet> {
    let positions = field
        .split('+')
        .map(|id| tags.require(id.trim()))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(at(line))?;
    let set = TagSet::from_positions(tags.len(), positions).map_err(at(line))?;
    if set.is_empty() {
        return Err(at(line)(CoreError::EmptyTagSet));
    }
    Ok(set)
}

fn parse_exclude(tags: &TagRegistry, fields: &[&str], line: usize, ex: &mut ExclusionSet) -> Result<()> {
    let [a, b] = fields else {
        return Err(syntax(line, "expected `exclude\\t<tag-id>\\t<tag-id>`"));
    };
    let a = tags.require(a.trim()).map_err(at(line))?;
    let b = tags.require(b.trim()).map_err(at(line))?;
    ex.insert(tags.len(), a, b).map_err(at(line))
}

fn write_exclusions_into(out: &mut String, tags: &TagRegistry, ex: &ExclusionSet) {
    for (a, b) in ex.pairs() {
        let _ = writeln!(
            out,
            "exclude\t{}\t{}",
            tags.id(a).unwrap_or_default(),
            tags.id(b).unwrap_or_default()
        );
    }
}

/// Shortest round-tripping decimal, padded to at least six fractional digits.
pub fn format_confidence(v: f64) -> String {
    let mut s = format!("{v}");
    let decimals = match s.find('.') {
        Some(dot) => s.len() - dot - 1,
        None => {
            s.push('.');
            0
        }
    };
    for _ in decimals..6 {
        s.push('0');
    }
    s
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| syntax(line, format!("`{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(at(line)(CoreError::InvalidConfidence(v)));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// rule bases

pub fn load_rulebase(tags: &TagRegistry, domains: &DomainRegistry, text: &str) -> Result<RuleBase> {
    let mut mode = None;
    let mut exclusions = ExclusionSet::default();
    let mut rules = Vec::new();
    let mut rule_lines = Vec::new();
    for (line, rec) in records(text) {
        let fields: Vec<&str> = rec.split('\t').collect();
        match fields[0] {
            "mode" => {
                let [_, m] = fields[..] else {
                    return Err(syntax(line, "expected `mode\\t<hand-crafted|system-generated>`"));
                };
                if mode.is_some() {
                    return Err(syntax(line, "mode declared twice"));
                }
                mode = Some(m.trim().parse::<Mode>().map_err(at(line))?);
            }
            "exclude" => parse_exclude(tags, &fields[1..], line, &mut exclusions)?,
            "rule" => {
                let [_, combo, confs] = fields[..] else {
                    return Err(syntax(line, "expected `rule\\t<tags>\\t<domain>:<confidence> ...`"));
                };
                let combination = parse_combination(tags, combo, line)?;
                let mut values = vec![0.0; domains.len()];
                let mut given = vec![false; domains.len()];
                for pair in confs.split_whitespace() {
                    let (id, value) = pair
                        .split_once(':')
                        .ok_or_else(|| syntax(line, format!("expected `<domain-id>:<confidence>`, got `{pair}`")))?;
                    let d = domains.require(id).map_err(at(line))?;
                    if std::mem::replace(&mut given[d], true) {
                        return Err(syntax(line, format!("domain `{id}` given twice")));
                    }
                    values[d] = parse_number(value, line)?;
                }
                rules.push(Rule {
                    combination,
                    confidences: ConfidenceVector::new(values),
                });
                rule_lines.push(line);
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    let mode = mode.ok_or_else(|| syntax(0, "missing `mode` line"))?;

    // Duplicates are reported on the second occurrence.
    let mut seen = std::collections::BTreeMap::new();
    for (rule, &line) in rules.iter().zip(&rule_lines) {
        if seen.insert(rule.combination, line).is_some() {
            return Err(at(line)(CoreError::DuplicateRule(rule.combination.render(tags))));
        }
    }
    let rb = RuleBase::assemble(mode, tags.len(), domains.len(), exclusions, rules)?;
    if let Some(v) = rb.validate().into_iter().next() {
        let line = violation_rule(&v).map_or(0, |i| rule_lines[i]);
        return Err(at(line)(v.into()));
    }
    Ok(rb)
}

fn violation_rule(v: &sqiis_core::Violation) -> Option<usize> {
    use sqiis_core::Violation::*;
    match *v {
        EmptyCombination { rule }
        | InvalidConfidence { rule, .. }
        | ModeViolation { rule, .. }
        | NormalizationViolation { rule, .. }
        | ExcludedCombination { rule, .. } => Some(rule),
    }
}

pub fn write_rulebase(tags: &TagRegistry, domains: &DomainRegistry, rb: &RuleBase) -> String {
    let mut out = format!("mode\t{}\n", rb.mode());
    write_exclusions_into(&mut out, tags, rb.exclusions());
    for rule in rb.rules() {
        let confs: Vec<String> = rule
            .confidences
            .values()
            .iter()
            .enumerate()
            .map(|(d, &v)| format!("{}:{}", domains.id(d).unwrap_or_default(), format_confidence(v)))
            .collect();
        let _ = writeln!(out, "rule\t{}\t{}", rule.combination.render(tags), confs.join(" "));
    }
    out
}

// ---------------------------------------------------------------------------
// label sheets

pub fn load_labelsheet(tags: &TagRegistry, domains: &DomainRegistry, text: &str) -> Result<LabelSheet> {
    let mut exclusions = ExclusionSet::default();
    let mut rows = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (line, rec) in records(text) {
        let fields: Vec<&str> = rec.split('\t').collect();
        match fields[0] {
            "mode" => {
                if fields.get(1).map(|m| m.trim()) != Some(Mode::HandCrafted.as_str()) {
                    return Err(syntax(line, "label sheets are always `mode\\thand-crafted`"));
                }
            }
            "exclude" => parse_exclude(tags, &fields[1..], line, &mut exclusions)?,
            "label" => {
                let [_, combo, label] = fields[..] else {
                    return Err(syntax(line, "expected `label\\t<tags>\\t<domain-id|NO_DOMAIN|?>`"));
                };
                let combination = parse_combination(tags, combo, line)?;
                let label = match label.trim() {
                    UNLABELED => Label::Unlabeled,
                    NO_DOMAIN => Label::NoDomain,
                    id => Label::Domain(domains.require(id).map_err(at(line))?),
                };
                if !seen.insert(combination) {
                    return Err(at(line)(CoreError::DuplicateRule(combination.render(tags))));
                }
                rows.push((combination, label));
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    Ok(LabelSheet {
        tag_count: tags.len(),
        domain_count: domains.len(),
        exclusions,
        rows,
    })
}

pub fn write_labelsheet(tags: &TagRegistry, domains: &DomainRegistry, sheet: &LabelSheet) -> String {
    let mut out = String::from("# Replace each `?` with one domain id or NO_DOMAIN.\n");
    let ids: Vec<&str> = domains.ids().collect();
    let _ = writeln!(out, "# domains: {}", ids.join(", "));
    let _ = writeln!(out, "mode\t{}", Mode::HandCrafted);
    write_exclusions_into(&mut out, tags, &sheet.exclusions);
    for (combination, label) in &sheet.rows {
        let label = match *label {
            Label::Domain(d) => domains.id(d).unwrap_or_default(),
            Label::NoDomain => NO_DOMAIN,
            Label::Unlabeled => UNLABELED,
        };
        let _ = writeln!(out, "label\t{}\t{}", combination.render(tags), label);
    }
    out
}

/// Blank worksheet listing every valid combination.
pub fn scaffold_labelsheet(tags: &TagRegistry, domains: &DomainRegistry, ex: &ExclusionSet) -> Result<String> {
    let sheet = LabelSheet::scaffold(tags.len(), domains.len(), ex)?;
    Ok(write_labelsheet(tags, domains, &sheet))
}

// ---------------------------------------------------------------------------
// weights and exclusions

/// Parses `weight` records. Every tag must carry at least one positive weight.
pub fn load_weights(tags: &TagRegistry, domains: &DomainRegistry, text: &str) -> Result<WeightMatrix> {
    let mut w = WeightMatrix::zeros(tags.len(), domains.len());
    let mut given = std::collections::BTreeSet::new();
    for (line, rec) in records(text) {
        let fields: Vec<&str> = rec.split('\t').collect();
        let ["weight", tag, domain, value] = fields[..] else {
            return Err(syntax(line, "expected `weight\\t<tag-id>\\t<domain-id>\\t<value>`"));
        };
        let t = tags.require(tag.trim()).map_err(at(line))?;
        let d = domains.require(domain.trim()).map_err(at(line))?;
        if !given.insert((t, d)) {
            return Err(syntax(line, format!("weight for ({tag}, {domain}) given twice")));
        }
        w.set(t, d, parse_number(value, line)?).map_err(at(line))?;
    }
    if let Some(&t) = w.zero_rows().first() {
        return Err(CoreError::MalformedConfig(format!(
            "tag `{}` has no positive weight for any domain",
            tags.id(t).unwrap_or_default()
        ))
        .into());
    }
    Ok(w)
}

pub fn write_weights(tags: &TagRegistry, domains: &DomainRegistry, w: &WeightMatrix) -> String {
    let mut out = String::new();
    for t in 0..w.tag_count() {
        for d in 0..w.domain_count() {
            let v = w.get(t, d);
            if v != 0.0 {
                let _ = writeln!(
                    out,
                    "weight\t{}\t{}\t{}",
                    tags.id(t).unwrap_or_default(),
                    domains.id(d).unwrap_or_default(),
                    format_confidence(v)
                );
            }
        }
    }
    out
}

pub fn load_exclusions(tags: &TagRegistry, text: &str) -> Result<ExclusionSet> {
    let mut ex = ExclusionSet::default();
    for (line, rec) in records(text) {
        let fields: Vec<&str> = rec.split('\t').collect();
        if fields[0] != "exclude" {
            return Err(syntax(line, format!("unknown record `{}`", fields[0])));
        }
        parse_exclude(tags, &fields[1..], line, &mut ex)?;
    }
    Ok(ex)
}

pub fn write_exclusions(tags: &TagRegistry, ex: &ExclusionSet) -> String {
    let mut out = String::new();
    write_exclusions_into(&mut out, tags, ex);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const REGISTRY: &str = "[tags]\nt1\tfirst\nt2\nt3\nt4\nt5\n[domains]\nD1\nD2\n";

    fn regs() -> (TagRegistry, DomainRegistry) {
        load_registries(REGISTRY).unwrap()
    }

    #[test]
    fn registry_errors() {
        let dup = load_registries("[tags]\nx\nx\n[domains]\nd\n").unwrap_err();
        assert!(matches!(dup.core(), Some(CoreError::DuplicateIdentifier { .. })));
        assert!(matches!(dup, FormatError::Invalid { line: 3, .. }));
        assert!(matches!(
            load_registries("").unwrap_err().core(),
            Some(CoreError::MalformedConfig(_))
        ));
        assert!(matches!(
            load_registries("x\n").unwrap_err(),
            FormatError::Syntax { line: 1, .. }
        ));
        assert!(load_registries("[tags]\n\tdesc\n[domains]\nd\n").is_err());
    }

    #[test]
    fn registry_round_trip() {
        let (t, d) = regs();
        assert_eq!(t.entries()[0].description, "first");
        let (t2, d2) = load_registries(&write_registries(&t, &d)).unwrap();
        assert_eq!((t, d), (t2, d2));
    }

    #[test]
    fn lexicon_errors() {
        let (t, _) = regs();
        let err = load_lexicons(&t, "t1\tfoo\ncolour\tred\n").unwrap_err();
        assert!(matches!(
            err,
            FormatError::Invalid {
                line: 2,
                source: CoreError::UnknownTag(_)
            }
        ));
        let err = load_lexicons(&t, "t1\t ;; \n").unwrap_err();
        assert!(matches!(err.core(), Some(CoreError::MalformedConfig(_))));
        assert!(load_lexicons(&t, "t1 foo\n").is_err());
    }

    #[test]
    fn illustrated_rule_rows() {
        let (t, d) = regs();
        let rb = load_rulebase(
            &t,
            &d,
            "mode\tsystem-generated\nrule\tt1+t4\tD1:0.75 D2:0.25\nrule\tt2+t5\tD1:0.45 D2:0.55\n",
        )
        .unwrap();
        assert_eq!(rb.len(), 2);
        let q = TagSet::from_positions(5, [0, 3]).unwrap();
        assert_eq!(rb.fire(q).unwrap().unwrap().values(), &[0.75, 0.25]);
        let q = TagSet::from_positions(5, [1, 4]).unwrap();
        assert_eq!(rb.fire(q).unwrap().unwrap().values(), &[0.45, 0.55]);
    }

    #[test]
    fn rulebase_errors() {
        let (t, d) = regs();
        let load = |body: &str| load_rulebase(&t, &d, body).unwrap_err();
        let e = load("mode\thand-crafted\nrule\tt1\tD1:1\nrule\tt1\tD2:1\n");
        assert!(matches!(
            e,
            FormatError::Invalid {
                line: 3,
                source: CoreError::DuplicateRule(_)
            }
        ));
        let e = load("mode\tsystem-generated\nrule\tt1\tD1:1.5\n");
        assert!(matches!(e.core(), Some(CoreError::InvalidConfidence(_))));
        let e = load("mode\thand-crafted\nrule\tt1\tD1:0.5 D2:0.5\n");
        assert!(matches!(e.core(), Some(CoreError::ModeViolation(_))));
        let e = load("mode\thand-crafted\nrule\tt9\tD1:1\n");
        assert!(matches!(e.core(), Some(CoreError::UnknownIdentifier(_))));
        let e = load("mode\thand-crafted\nrule\tt1\tD9:1\n");
        assert!(matches!(e.core(), Some(CoreError::UnknownIdentifier(_))));
        let e = load("mode\tsystem-generated\nexclude\tt1\tt2\nrule\tt1+t2\tD1:1\n");
        assert!(matches!(
            e,
            FormatError::Invalid {
                line: 3,
                source: CoreError::ExcludedCombination(_)
            }
        ));
        assert!(matches!(load("rule\tt1\tD1:1\n"), FormatError::Syntax { .. }));
        assert!(matches!(
            load("mode\thand-crafted\nrule\tt1\tD1=1\n"),
            FormatError::Syntax { .. }
        ));
    }

    #[test]
    fn omitted_domains_default_to_zero() {
        let (t, d) = regs();
        let rb = load_rulebase(&t, &d, "mode\thand-crafted\nrule\tt3\tD2:1.0\n").unwrap();
        assert_eq!(rb.rules()[0].confidences.values(), &[0.0, 1.0]);
    }

    #[test]
    fn confidence_formatting() {
        assert_eq!(format_confidence(1.0), "1.000000");
        assert_eq!(format_confidence(0.25), "0.250000");
        assert_eq!(format_confidence(1.0 / 3.0), "0.3333333333333333");
        assert_eq!(format_confidence(1e-7), "0.0000001");
        assert_eq!(format_confidence(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn label_sheet_flow() {
        let (t, d) = regs();
        let ex = load_exclusions(&t, "# none but one\nexclude\tt1\tt2\n").unwrap();
        let text = scaffold_labelsheet(&t, &d, &ex).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("label\t")).count(), 31 - 8);
        assert!(!text.contains("label\tt1+t2\t"));
        let sheet = load_labelsheet(&t, &d, &text).unwrap();
        assert_eq!(sheet.exclusions, ex);
        assert!(sheet.rows.iter().all(|r| r.1 == Label::Unlabeled));

        let filled = text.replace("\t?", "\tNO_DOMAIN").replacen("\tNO_DOMAIN", "\tD2", 1);
        let sheet = load_labelsheet(&t, &d, &filled).unwrap();
        assert_eq!(sheet.rows[0].1, Label::Domain(1));
        assert_eq!(write_labelsheet(&t, &d, &sheet), filled);

        let dup = format!("{filled}label\tt1\tD1\n");
        assert!(matches!(
            load_labelsheet(&t, &d, &dup).unwrap_err().core(),
            Some(CoreError::DuplicateRule(_))
        ));
        let bad = filled.replacen("\tD2", "\tD7", 1);
        assert!(matches!(
            load_labelsheet(&t, &d, &bad).unwrap_err().core(),
            Some(CoreError::UnknownIdentifier(_))
        ));
    }

    #[test]
    fn weights() {
        let (t, d) = regs();
        let body =
            "weight\tt1\tD1\t0.7\nweight\tt2\tD2\t1\nweight\tt3\tD1\t2\nweight\tt4\tD1\t1\nweight\tt5\tD2\t0.5\n";
        let w = load_weights(&t, &d, body).unwrap();
        assert_eq!(w.get(0, 0), 0.7);
        assert_eq!(w.get(0, 1), 0.0);
        assert_eq!(load_weights(&t, &d, &write_weights(&t, &d, &w)).unwrap(), w);

        let missing = "weight\tt1\tD1\t0.7\n";
        assert!(matches!(
            load_weights(&t, &d, missing).unwrap_err().core(),
            Some(CoreError::MalformedConfig(_))
        ));
        let negative = body.replace("0.7", "-0.7");
        assert!(matches!(
            load_weights(&t, &d, &negative).unwrap_err().core(),
            Some(CoreError::InvalidConfidence(_))
        ));
        let twice = format!("{body}weight\tt1\tD1\t0.1\n");
        assert!(load_weights(&t, &d, &twice).is_err());
    }
}
