//! Closed universes of tags and domains.
//!
//! Every other module refers to tags and domains by their 0-based position
//! in these registries. A registry never changes after construction, since
//! rule combinations are positional bit vectors.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::marker::PhantomData;

use crate::error::{Error, Result};
use crate::tagset::MAX_TAGS;

/// Sentinel used by label sheets for "no domain"; never a valid domain id.
pub const NO_DOMAIN: &str = "NO_DOMAIN";

/// Marker trait distinguishing tag registries from domain registries.
pub trait RegistryKind {
    const NAME: &'static str;
    const MAX_LEN: usize;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tags;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Domains;

impl RegistryKind for Tags {
    const NAME: &'static str = "tag";
    const MAX_LEN: usize = MAX_TAGS;
}

impl RegistryKind for Domains {
    const NAME: &'static str = "domain";
    const MAX_LEN: usize = usize::MAX;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub id: String,
    pub description: String,
}

/// An ordered, immutable list of identifiers with a reverse index.
pub struct Registry<K> {
    entries: Vec<Entry>,
    index: BTreeMap<String, usize>,
    _kind: PhantomData<K>,
}

pub type TagRegistry = Registry<Tags>;
pub type DomainRegistry = Registry<Domains>;

/// Identifiers are non-empty ASCII made of letters, digits, `_`, `-` and `.`.
///
/// The rule-base format joins ids with `+`, `:` and whitespace, so those
/// characters are excluded.
pub fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
}

impl<K: RegistryKind> Registry<K> {
    pub fn new<I, S, D>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, D)>,
        S: Into<String>,
        D: Into<String>,
    {
        let mut list = Vec::new();
        let mut index = BTreeMap::new();
        for (id, description) in entries {
            let id: String = id.into();
            if !is_valid_id(&id) {
                return Err(Error::MalformedConfig(alloc::format!(
                    "invalid {} identifier `{id}`",
                    K::NAME
                )));
            }
            if id == NO_DOMAIN {
                return Err(Error::MalformedConfig(alloc::format!("`{NO_DOMAIN}` is reserved")));
            }
            if index.contains_key(&id) {
                return Err(Error::DuplicateIdentifier { kind: K::NAME, id });
            }
            index.insert(id.clone(), list.len());
            list.push(Entry {
                id,
                description: description.into(),
            });
        }
        if list.is_empty() {
            return Err(Error::MalformedConfig(alloc::format!("no {}s declared", K::NAME)));
        }
        if list.len() > K::MAX_LEN {
            return Err(Error::RangeError(alloc::format!(
                "at most {} {}s are supported, got {}",
                K::MAX_LEN,
                K::NAME,
                list.len()
            )));
        }
        Ok(Registry {
            entries: list,
            index,
            _kind: PhantomData,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Like [`position`](Self::position) but reports the miss as [`Error::UnknownIdentifier`].
    pub fn require(&self, id: &str) -> Result<usize> {
        self.position(id)
            .ok_or_else(|| Error::UnknownIdentifier(id.to_string()))
    }

    pub fn id(&self, position: usize) -> Option<&str> {
        self.entries.get(position).map(|e| e.id.as_str())
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(|e| e.id.as_str())
    }
}

impl<K> Clone for Registry<K> {
    fn clone(&self) -> Self {
        Registry {
            entries: self.entries.clone(),
            index: self.index.clone(),
            _kind: PhantomData,
        }
    }
}

impl<K> PartialEq for Registry<K> {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl<K> fmt::Debug for Registry<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.iter().map(|e| &e.id)).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn positions_follow_declaration_order() {
        let reg = TagRegistry::new(vec![("b", ""), ("a", ""), ("c", "")]).unwrap();
        assert_eq!(reg.position("b"), Some(0));
        assert_eq!(reg.position("a"), Some(1));
        assert_eq!(reg.id(2), Some("c"));
        for (i, id) in reg.ids().enumerate() {
            assert_eq!(reg.position(id), Some(i));
        }
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let err = TagRegistry::new(vec![("x", ""), ("x", "again")]).unwrap_err();
        assert_eq!(
            err,
            Error::DuplicateIdentifier {
                kind: "tag",
                id: "x".into()
            }
        );
    }

    #[test]
    fn empty_and_malformed() {
        let none: Vec<(&str, &str)> = Vec::new();
        assert!(matches!(DomainRegistry::new(none), Err(Error::MalformedConfig(_))));
        assert!(matches!(
            DomainRegistry::new(vec![("", "")]),
            Err(Error::MalformedConfig(_))
        ));
        assert!(matches!(
            DomainRegistry::new(vec![("a+b", "")]),
            Err(Error::MalformedConfig(_))
        ));
        assert!(matches!(
            DomainRegistry::new(vec![(NO_DOMAIN, "")]),
            Err(Error::MalformedConfig(_))
        ));
    }

    #[test]
    fn ids_are_case_sensitive() {
        let reg = DomainRegistry::new(vec![("movie", ""), ("Movie", "")]).unwrap();
        assert_eq!(reg.len(), 2);
        assert!(reg.require("MOVIE").is_err());
    }

    #[test]
    fn tag_count_is_capped() {
        let ids: Vec<_> = (0..MAX_TAGS + 1)
            .map(|i| (alloc::format!("t{i}"), String::new()))
            .collect();
        assert!(matches!(TagRegistry::new(ids), Err(Error::RangeError(_))));
    }
}
