//! Bundles of items as bitmasks.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest item count any valuation accepts.
pub const MAX_ITEMS: usize = 24;

/// A subset of the items `0..m`, stored as a bitmask.
///
/// A bundle does not know `m`; validity against a particular item count is
/// checked by [`Bundle::validate`] at the API boundary.
#[derive(Copy, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bundle(u32);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub const fn from_bits(bits: u32) -> Self {
        Bundle(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// All items `0..m`.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_ITEMS);
        Bundle(((1u64 << m) - 1) as u32)
    }

    pub fn singleton(item: usize) -> Self {
        debug_assert!(item < 32);
        Bundle(1 << item)
    }

    pub fn from_items<I: IntoIterator<Item = usize>>(items: I) -> Self {
        Bundle(items.into_iter().fold(0, |acc, j| acc | (1 << j)))
    }

    pub fn validate(self, m: usize) -> Result<Self> {
        if m < 32 && self.0 >> m != 0 {
            Err(Error::InvalidBundle { bundle: self, items: m })
        } else {
            Ok(self)
        }
    }

    pub fn contains(self, item: usize) -> bool {
        self.0 >> item & 1 == 1
    }

    pub fn with(self, item: usize) -> Self {
        Bundle(self.0 | 1 << item)
    }

    pub fn without(self, item: usize) -> Self {
        Bundle(self.0 & !(1 << item))
    }

    pub fn union(self, other: Bundle) -> Self {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Self {
        Bundle(self.0 & other.0)
    }

    pub fn difference(self, other: Bundle) -> Self {
        Bundle(self.0 & !other.0)
    }

    /// Items of `0..m` not in `self`.
    pub fn complement(self, m: usize) -> Self {
        Bundle::full(m).difference(self)
    }

    pub fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Items in ascending order.
    pub fn items(self) -> Items {
        Items(self.0)
    }

    /// Every subset of `0..m`, in ascending bitmask order.
    pub fn all(m: usize) -> impl Iterator<Item = Bundle> {
        (0..1u32 << m).map(Bundle)
    }

    /// Every subset of `self`, in ascending bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Bundle> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(Bundle(cur))
        })
    }
}

pub struct Items(u32);

impl Iterator for Items {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let j = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(j)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Items {}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, j) in self.items().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{j}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Bundles travel as sorted arrays of item indices.
impl Serialize for Bundle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.items())
    }
}

impl<'de> Deserialize<'de> for Bundle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&j) = items.iter().find(|&&j| j >= MAX_ITEMS) {
            return Err(serde::de::Error::custom(format!("item index {j} exceeds {}", MAX_ITEMS - 1)));
        }
        Ok(Bundle::from_items(items))
    }
}
