use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use sqiis_core::tagger::DEFAULT_CANDIDATE_CAP;
use sqiis_core::{DomainRegistry, Engine, ExclusionSet, LexiconSet, RuleBase, TagRegistry, WeightMatrix};

use crate::format;
use crate::reference::{LEXICONS_FILE, REGISTRY_FILE, RULEBASE_FILE, WEIGHTS_FILE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Structured,
}

/// File locations. Unset paths fall back to well-known names under `root`,
/// except exclusions, which are only read when given explicitly.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub root: PathBuf,
    pub registry: Option<PathBuf>,
    pub lexicons: Option<PathBuf>,
    pub rulebase: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub exclusions: Option<PathBuf>,
    pub candidate_cap: usize,
    pub format: OutputFormat,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            root: PathBuf::from("."),
            registry: None,
            lexicons: None,
            rulebase: None,
            weights: None,
            exclusions: None,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            format: OutputFormat::Table,
        }
    }
}

pub fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

impl EngineConfig {
    fn resolve(&self, explicit: &Option<PathBuf>, name: &str) -> PathBuf {
        explicit.clone().unwrap_or_else(|| self.root.join(name))
    }

    pub fn registries(&self) -> anyhow::Result<(TagRegistry, DomainRegistry)> {
        let path = self.resolve(&self.registry, REGISTRY_FILE);
        format::load_registries(&read(&path)?).with_context(|| path.display().to_string())
    }

    pub fn lexicon(&self, tags: &TagRegistry) -> anyhow::Result<LexiconSet> {
        let path = self.resolve(&self.lexicons, LEXICONS_FILE);
        format::load_lexicons(tags, &read(&path)?).with_context(|| path.display().to_string())
    }

    pub fn rulebase(&self, tags: &TagRegistry, domains: &DomainRegistry) -> anyhow::Result<RuleBase> {
        let path = self.resolve(&self.rulebase, RULEBASE_FILE);
        format::load_rulebase(tags, domains, &read(&path)?).with_context(|| path.display().to_string())
    }

    pub fn weights(&self, tags: &TagRegistry, domains: &DomainRegistry) -> anyhow::Result<WeightMatrix> {
        let path = self.resolve(&self.weights, WEIGHTS_FILE);
        format::load_weights(tags, domains, &read(&path)?).with_context(|| path.display().to_string())
    }

    pub fn exclusions(&self, tags: &TagRegistry) -> anyhow::Result<ExclusionSet> {
        match &self.exclusions {
            None => Ok(ExclusionSet::default()),
            Some(path) => format::load_exclusions(tags, &read(path)?).with_context(|| path.display().to_string()),
        }
    }

    pub fn engine(&self) -> anyhow::Result<Engine> {
        let (tags, domains) = self.registries()?;
        let lexicon = self.lexicon(&tags)?;
        let rulebase = self.rulebase(&tags, &domains)?;
        Ok(Engine::new(tags, domains, lexicon, rulebase)?.with_candidate_cap(self.candidate_cap))
    }
}
