//! Per-tag lookup tables of surface phrases.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::registry::TagRegistry;
use crate::tagset::TagSet;

const TRIM: &[char] = &['.', ',', '!', '?', ';', ':', '\'', '"'];

/// Lowercases, splits on whitespace and strips surrounding punctuation from
/// every word. Words that are pure punctuation disappear.
pub fn normalize_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(TRIM).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

pub fn normalize(text: &str) -> String {
    normalize_words(text).join(" ")
}

/// One lookup table per tag, stored as phrase → tags containing it.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconSet {
    tag_count: usize,
    phrases: BTreeMap<String, TagSet>,
    max_phrase_words: usize,
}

impl LexiconSet {
    pub fn builder(tags: &TagRegistry) -> LexiconBuilder<'_> {
        LexiconBuilder {
            tags,
            phrases: BTreeMap::new(),
        }
    }

    pub fn tag_count(&self) -> usize {
        self.tag_count
    }

    /// Longest stored phrase, in words. At least 1.
    pub fn max_phrase_words(&self) -> usize {
        self.max_phrase_words
    }

    /// Number of (tag, phrase) entries.
    pub fn len(&self) -> usize {
        self.phrases.values().map(|t| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    /// Tags whose table holds `phrase` after normalization. Empty on a miss.
    pub fn lookup(&self, phrase: &str) -> TagSet {
        self.lookup_normalized(&normalize(phrase))
    }

    pub(crate) fn lookup_normalized(&self, phrase: &str) -> TagSet {
        self.phrases
            .get(phrase)
            .copied()
            .unwrap_or_else(|| TagSet::empty(self.tag_count))
    }

    /// Phrases stored under one tag, in sorted order.
    pub fn phrases_for(&self, tag: usize) -> impl Iterator<Item = &str> + '_ {
        self.phrases
            .iter()
            .filter(move |(_, t)| t.contains(tag))
            .map(|(p, _)| p.as_str())
    }

    /// All `(tag position, phrase)` entries, tag-major.
    pub fn entries(&self) -> Vec<(usize, &str)> {
        (0..self.tag_count)
            .flat_map(|t| self.phrases_for(t).map(move |p| (t, p)))
            .collect()
    }
}

#[derive(Debug)]
pub struct LexiconBuilder<'a> {
    tags: &'a TagRegistry,
    phrases: BTreeMap<String, TagSet>,
}

impl LexiconBuilder<'_> {
    pub fn add(&mut self, tag_id: &str, phrase: &str) -> Result<&mut Self> {
        let tag = self
            .tags
            .position(tag_id)
            .ok_or_else(|| Error::UnknownTag(tag_id.to_string()))?;
        self.add_position(tag, phrase)
    }

    pub fn add_position(&mut self, tag: usize, phrase: &str) -> Result<&mut Self> {
        if tag >= self.tags.len() {
            return Err(Error::UnknownTag(alloc::format!("position {tag}")));
        }
        let norm = normalize(phrase);
        if norm.is_empty() {
            return Err(Error::MalformedConfig(alloc::format!(
                "empty phrase for tag `{}`",
                self.tags.id(tag).unwrap_or_default()
            )));
        }
        let width = self.tags.len();
        let slot = self.phrases.entry(norm).or_insert_with(|| TagSet::empty(width));
        *slot = slot.with(tag);
        Ok(self)
    }

    pub fn build(&self) -> LexiconSet {
        let max_phrase_words = self.phrases.keys().map(|p| p.split(' ').count()).max().unwrap_or(1);
        LexiconSet {
            tag_count: self.tags.len(),
            phrases: self.phrases.clone(),
            max_phrase_words,
        }
    }
}
