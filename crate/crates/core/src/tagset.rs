use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::registry::TagRegistry;

/// Largest tag universe a [`TagSet`] can represent.
pub const MAX_TAGS: usize = 64;

/// Binary membership vector over the tag registry.
///
/// Bit `i` is tag position `i`. Ordering compares the bit pattern as an
/// unsigned integer, which is the enumeration order of combinations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TagSet {
    bits: u64,
    width: u8,
}

impl TagSet {
    pub fn empty(width: usize) -> Self {
        assert!(width <= MAX_TAGS, "tag width {width} exceeds {MAX_TAGS}");
        TagSet {
            bits: 0,
            width: width as u8,
        }
    }

    pub fn from_bits(width: usize, bits: u64) -> Result<Self> {
        if width > MAX_TAGS {
            return Err(Error::RangeError(alloc::format!(
                "tag width {width} exceeds {MAX_TAGS}"
            )));
        }
        if width < MAX_TAGS && bits >> width != 0 {
            return Err(Error::DimensionError {
                expected: width,
                found: 64 - bits.leading_zeros() as usize,
            });
        }
        Ok(TagSet {
            bits,
            width: width as u8,
        })
    }

    pub fn from_positions<I: IntoIterator<Item = usize>>(width: usize, positions: I) -> Result<Self> {
        let mut set = TagSet::empty(width);
        for p in positions {
            if p >= width {
                return Err(Error::UnknownIdentifier(alloc::format!("tag position {p}")));
            }
            set.bits |= 1 << p;
        }
        Ok(set)
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    /// Size of the tag universe this set lives in.
    pub fn width(self) -> usize {
        self.width as usize
    }

    /// Number of tags present.
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, position: usize) -> bool {
        position < self.width() && self.bits & (1 << position) != 0
    }

    #[must_use]
    pub fn with(self, position: usize) -> Self {
        debug_assert!(position < self.width());
        TagSet {
            bits: self.bits | (1 << position),
            ..self
        }
    }

    #[must_use]
    pub fn without(self, position: usize) -> Self {
        TagSet {
            bits: self.bits & !(1 << position),
            ..self
        }
    }

    #[must_use]
    pub fn union(self, other: TagSet) -> Self {
        debug_assert_eq!(self.width, other.width);
        TagSet {
            bits: self.bits | other.bits,
            ..self
        }
    }

    /// Set positions in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.bits;
        core::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(p)
        })
    }

    /// `+`-joined tag ids, as used in rule-base files.
    pub fn render(self, tags: &TagRegistry) -> String {
        let ids: Vec<&str> = self.iter().map(|p| tags.id(p).unwrap_or("?")).collect();
        ids.join("+")
    }
}

impl fmt::Debug for TagSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TagSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "t{p}")?;
        }
        f.write_str("}")
    }
}
