//! The shipped 7-tag / 3-domain reference configuration.
//!
//! The weight matrix is illustrative: the values were picked by hand to
//! reflect which domain each tag usually signals, not fitted to data.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use sqiis_core::{
    compile_handcrafted, generate_rulebase, DomainRegistry, ExclusionSet, LexiconSet, RuleBase, TagRegistry,
    WeightMatrix,
};

use crate::format::{self, FormatError};

pub const REGISTRY: &str = include_str!("../reference/registry.tsv");
pub const LEXICONS: &str = include_str!("../reference/lexicons.tsv");
pub const WEIGHTS: &str = include_str!("../reference/weights.tsv");
pub const EXCLUSIONS: &str = include_str!("../reference/exclusions.tsv");
pub const LABELS: &str = include_str!("../reference/labels.tsv");

pub const REGISTRY_FILE: &str = "registry.tsv";
pub const LEXICONS_FILE: &str = "lexicons.tsv";
pub const WEIGHTS_FILE: &str = "weights.tsv";
pub const EXCLUSIONS_FILE: &str = "exclusions.tsv";
pub const LABELS_FILE: &str = "labels.tsv";
/// Hand-crafted rule base compiled from the label sheet.
pub const RULEBASE_FILE: &str = "rulebase.tsv";
/// System-generated rule base from the weights and exclusions.
pub const SYSTEM_RULEBASE_FILE: &str = "rulebase-system.tsv";

#[derive(Debug, Clone)]
pub struct Reference {
    pub tags: TagRegistry,
    pub domains: DomainRegistry,
    pub lexicon: LexiconSet,
    pub weights: WeightMatrix,
    pub exclusions: ExclusionSet,
    pub handcrafted: RuleBase,
    pub system: RuleBase,
}

pub fn load() -> Result<Reference, FormatError> {
    let (tags, domains) = format::load_registries(REGISTRY)?;
    let lexicon = format::load_lexicons(&tags, LEXICONS)?;
    let weights = format::load_weights(&tags, &domains, WEIGHTS)?;
    let exclusions = format::load_exclusions(&tags, EXCLUSIONS)?;
    let sheet = format::load_labelsheet(&tags, &domains, LABELS)?;
    let handcrafted = compile_handcrafted(&sheet)?;
    let system = generate_rulebase(&weights, &exclusions)?;
    Ok(Reference {
        tags,
        domains,
        lexicon,
        weights,
        exclusions,
        handcrafted,
        system,
    })
}

/// Writes the reference configuration into `dir`, creating it if needed.
pub fn seed(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let r = load()?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let files = [
        (REGISTRY_FILE, REGISTRY.to_string()),
        (LEXICONS_FILE, LEXICONS.to_string()),
        (WEIGHTS_FILE, WEIGHTS.to_string()),
        (EXCLUSIONS_FILE, EXCLUSIONS.to_string()),
        (LABELS_FILE, LABELS.to_string()),
        (
            RULEBASE_FILE,
            format::write_rulebase(&r.tags, &r.domains, &r.handcrafted),
        ),
        (
            SYSTEM_RULEBASE_FILE,
            format::write_rulebase(&r.tags, &r.domains, &r.system),
        ),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}
