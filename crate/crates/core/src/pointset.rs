//! Bitset of carrier points.
//!
//! Carriers of up to 64 points use a single inline word, so union,
//! intersection and subset tests are single word operations. Larger carriers
//! spill to additional words transparently.

use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

const WORD: usize = 64;

/// A finite set of point indices.
///
/// Trailing zero words are always trimmed, so structural equality is set
/// equality regardless of how the set was built.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    words: SmallVec<[u64; 1]>,
}

impl PointSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut words: SmallVec<[u64; 1]> = SmallVec::new();
        let mut left = n;
        while left >= WORD {
            words.push(u64::MAX);
            left -= WORD;
        }
        if left > 0 {
            words.push((1u64 << left) - 1);
        }
        Self { words }
    }

    pub fn singleton(x: usize) -> Self {
        let mut s = Self::new();
        s.insert(x);
        s
    }

    /// Builds a set from a single-word mask (points 0..=63).
    pub fn from_mask(mask: u64) -> Self {
        let mut s = Self { words: SmallVec::from_elem(mask, 1) };
        s.trim();
        s
    }

    /// The single-word mask; `None` when the set reaches past point 63.
    pub fn as_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, x: usize) {
        let (w, b) = (x / WORD, x % WORD);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1u64 << b;
    }

    pub fn remove(&mut self, x: usize) {
        let (w, b) = (x / WORD, x % WORD);
        if let Some(word) = self.words.get_mut(w) {
            *word &= !(1u64 << b);
            self.trim();
        }
    }

    pub fn contains(&self, x: usize) -> bool {
        let (w, b) = (x / WORD, x % WORD);
        self.words.get(w).is_some_and(|word| word >> b & 1 == 1)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words.iter().enumerate().all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &PointSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        self.words.truncate(other.words.len());
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
        self.trim();
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
        out.trim();
        out
    }

    /// Smallest element, if any.
    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * WORD + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// True iff every element is `< n`.
    pub fn within(&self, n: usize) -> bool {
        self.is_subset(&PointSet::full(n))
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::new();
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl<'a> FromIterator<&'a usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = &'a usize>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

impl BitOr for &PointSet {
    type Output = PointSet;
    fn bitor(self, rhs: &PointSet) -> PointSet {
        self.union(rhs)
    }
}

impl BitAnd for &PointSet {
    type Output = PointSet;
    fn bitand(self, rhs: &PointSet) -> PointSet {
        self.intersection(rhs)
    }
}

impl Sub for &PointSet {
    type Output = PointSet;
    fn sub(self, rhs: &PointSet) -> PointSet {
        self.difference(rhs)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        Ok(v.into_iter().collect())
    }
}
