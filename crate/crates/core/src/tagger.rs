//! N-gram segmentation of a query into tagged tokens, and projection of the
//! tagged query onto candidate tag combinations.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lexicon::{normalize_words, LexiconSet};
use crate::tagset::TagSet;

pub const DEFAULT_CANDIDATE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    /// Normalized token text.
    pub surface: String,
    /// Index of the first word of the token in the normalized query.
    pub start: usize,
    pub word_count: usize,
    pub tags: TagSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedQuery {
    pub raw: String,
    pub tokens: Vec<TaggedToken>,
}

impl TaggedQuery {
    pub fn word_count(&self) -> usize {
        self.tokens.iter().map(|t| t.word_count).sum()
    }

    /// Union of every token's tags.
    pub fn all_tags(&self, width: usize) -> TagSet {
        self.tokens
            .iter()
            .fold(TagSet::empty(width), |acc, t| acc.union(t.tags))
    }
}

/// Greedy longest-match segmentation.
///
/// At each word position the n-grams from `min(max_phrase_words, remaining)`
/// down to 1 are looked up; the longest hit becomes a token carrying all of
/// its tags. A word with no hit becomes a single untagged token.
pub fn tokenize_and_tag(query: &str, lex: &LexiconSet) -> Result<TaggedQuery> {
    let words = normalize_words(query);
    if words.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < words.len() {
        let longest = lex.max_phrase_words().min(words.len() - pos);
        let mut token = None;
        for n in (1..=longest).rev() {
            let surface = words[pos..pos + n].join(" ");
            let tags = lex.lookup_normalized(&surface);
            if !tags.is_empty() {
                token = Some(TaggedToken {
                    surface,
                    start: pos,
                    word_count: n,
                    tags,
                });
                break;
            }
        }
        let token = token.unwrap_or_else(|| TaggedToken {
            surface: words[pos].clone(),
            start: pos,
            word_count: 1,
            tags: TagSet::empty(lex.tag_count()),
        });
        pos += token.word_count;
        tokens.push(token);
    }
    Ok(TaggedQuery {
        raw: query.to_string(),
        tokens,
    })
}

/// Expands per-token tag choices into distinct candidate combinations.
///
/// Untagged tokens are dropped. Choices are taken in registry order with the
/// first token as the most significant digit; the output keeps first-seen
/// order and stops after `cap` distinct sets.
pub fn candidate_tag_sets(tq: &TaggedQuery, cap: usize) -> Result<Vec<TagSet>> {
    if cap == 0 {
        return Err(Error::RangeError("candidate cap must be at least 1".into()));
    }
    let choices: Vec<Vec<usize>> = tq
        .tokens
        .iter()
        .filter(|t| !t.tags.is_empty())
        .map(|t| t.tags.iter().collect())
        .collect();
    let Some(width) = tq.tokens.iter().find(|t| !t.tags.is_empty()).map(|t| t.tags.width()) else {
        return Err(Error::NoTagsFound);
    };

    // Depth-first walk in mixed-radix order. A (depth, partial union) state
    // seen before can only lead to unions that were already emitted.
    let mut visited: BTreeSet<(usize, u64)> = BTreeSet::new();
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut out = Vec::new();
    let mut stack = vec![(0usize, TagSet::empty(width))];
    while let Some((depth, acc)) = stack.pop() {
        if out.len() >= cap {
            break;
        }
        if !visited.insert((depth, acc.bits())) {
            continue;
        }
        if depth == choices.len() {
            if seen.insert(acc.bits()) {
                out.push(acc);
            }
            continue;
        }
        for &tag in choices[depth].iter().rev() {
            stack.push((depth + 1, acc.with(tag)));
        }
    }
    Ok(out)
}
