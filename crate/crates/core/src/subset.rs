//! Subsets of the simple roots, stored as bit masks over 0-based indices.
//!
//! Serialized as sorted 1-based index lists, matching the usual α₁, α₂, ...
//! numbering.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleSet(u64);

pub const MAX_SIMPLE: usize = 64;

impl SimpleSet {
    pub const EMPTY: SimpleSet = SimpleSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            SimpleSet(u64::MAX)
        } else {
            SimpleSet((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut s = 0u64;
        for i in it {
            assert!(i < MAX_SIMPLE, "simple root index {i} too large");
            s |= 1 << i;
        }
        SimpleSet(s)
    }

    /// Builds a set from 1-based indices; `None` if an index is 0 or too large.
    pub fn from_one_based(idx: &[usize]) -> Option<Self> {
        if idx.iter().any(|&i| i == 0 || i > MAX_SIMPLE) {
            return None;
        }
        Some(Self::from_indices(idx.iter().map(|i| i - 1)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_SIMPLE && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: SimpleSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: SimpleSet) -> SimpleSet {
        SimpleSet(self.0 | other.0)
    }

    pub fn intersection(self, other: SimpleSet) -> SimpleSet {
        SimpleSet(self.0 & other.0)
    }

    pub fn difference(self, other: SimpleSet) -> SimpleSet {
        SimpleSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_SIMPLE).filter(move |&i| self.contains(i))
    }

    pub fn one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// All subsets of `self`, in increasing order of their bit masks.
    pub fn subsets(self) -> Vec<SimpleSet> {
        let mut out = Vec::new();
        let mut s = 0u64;
        loop {
            out.push(SimpleSet(s));
            if s == self.0 {
                break;
            }
            s = (s.wrapping_sub(self.0)) & self.0;
        }
        out
    }
}

impl fmt::Display for SimpleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SimpleSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimpleSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        SimpleSet::from_one_based(&v).ok_or_else(|| {
            serde::de::Error::custom("simple root indices are 1-based and at most 64")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_power_set() {
        let s = SimpleSet::from_indices([0, 2, 3]);
        let subs = s.subsets();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|t| t.is_subset(s)));
    }

    #[test]
    fn one_based_round_trip() {
        let s = SimpleSet::from_one_based(&[1, 3]).unwrap();
        assert_eq!(s.one_based(), vec![1, 3]);
        assert_eq!(s.to_string(), "{1,3}");
        assert!(SimpleSet::from_one_based(&[0]).is_none());
    }
}
