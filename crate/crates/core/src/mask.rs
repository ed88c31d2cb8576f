//! Dense subsets of a ground set `0..n`.
//!
//! Sets of up to 128 elements live inline; larger ground sets (up to
//! [`MAX_GROUND_SIZE`]) spill to the heap. Trailing zero words are always
//! trimmed so that equality and hashing do not depend on history.

use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

pub const MAX_GROUND_SIZE: usize = 1024;

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    words: SmallVec<[u64; 2]>,
}

impl SubsetMask {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: u64) -> Self {
        let mut m = SubsetMask { words: SmallVec::from_slice(&[bits]) };
        m.trim();
        m
    }

    /// The whole ground set `0..n`.
    pub fn full(n: usize) -> Self {
        let mut words: SmallVec<[u64; 2]> = SmallVec::from_elem(u64::MAX, n / 64);
        if n % 64 != 0 {
            words.push((1u64 << (n % 64)) - 1);
        }
        SubsetMask { words }
    }

    pub fn singleton(i: usize) -> Self {
        let mut m = Self::new();
        m.insert(i);
        m
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The set as a single word, when every element is below 64.
    pub fn as_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn insert(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if let Some(word) = self.words.get_mut(i / 64) {
            *word &= !(1 << (i % 64));
            self.trim();
        }
    }

    pub fn with(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.insert(i);
        m
    }

    pub fn without(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.remove(i);
        m
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w & (1 << (i % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Least element.
    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Greatest element.
    pub fn last(&self) -> Option<usize> {
        let w = self.words.len().checked_sub(1)?;
        Some(w * 64 + 63 - self.words[w].leading_zeros() as usize)
    }

    /// True when every element is below `n`.
    pub fn fits(&self, n: usize) -> bool {
        self.last().is_none_or(|l| l < n)
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { words: &self.words, idx: 0, cur: self.words.first().copied().unwrap_or(0) }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(&short.words) {
            *w |= s;
        }
        SubsetMask { words }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut m = SubsetMask {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        };
        m.trim();
        m
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut words = self.words.clone();
        for (w, o) in words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
        let mut m = SubsetMask { words };
        m.trim();
        m
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn complement(&self, n: usize) -> Self {
        Self::full(n).difference(self)
    }

    /// Elements below `at`, and the elements at or above it shifted down by `at`.
    pub fn split_at(&self, at: usize) -> (Self, Self) {
        let mut low = Self::new();
        let mut high = Self::new();
        for i in self.iter() {
            if i < at {
                low.insert(i);
            } else {
                high.insert(i - at);
            }
        }
        (low, high)
    }

    pub fn shifted_up(&self, by: usize) -> Self {
        self.iter().map(|i| i + by).collect()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + tz);
            }
            self.idx += 1;
            self.cur = *self.words.get(self.idx)?;
        }
    }
}

impl<'a> IntoIterator for &'a SubsetMask {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<usize> for SubsetMask {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut m = Self::new();
        for i in iter {
            m.insert(i);
        }
        m
    }
}

impl BitOr for &SubsetMask {
    type Output = SubsetMask;
    fn bitor(self, rhs: Self) -> SubsetMask {
        self.union(rhs)
    }
}

impl BitAnd for &SubsetMask {
    type Output = SubsetMask;
    fn bitand(self, rhs: Self) -> SubsetMask {
        self.intersection(rhs)
    }
}

impl Sub for &SubsetMask {
    type Output = SubsetMask;
    fn sub(self, rhs: Self) -> SubsetMask {
        self.difference(rhs)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for SubsetMask {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = v.iter().find(|&&i| i >= MAX_GROUND_SIZE) {
            return Err(serde::de::Error::custom(format!("index {bad} exceeds {MAX_GROUND_SIZE}")));
        }
        Ok(v.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_and_complement() {
        assert_eq!(SubsetMask::full(0), SubsetMask::new());
        assert_eq!(SubsetMask::full(3).to_vec(), vec![0, 1, 2]);
        assert_eq!(SubsetMask::full(64).len(), 64);
        assert_eq!(SubsetMask::full(130).len(), 130);
        let a: SubsetMask = [1, 70].into_iter().collect();
        assert_eq!(a.complement(72).len(), 70);
    }

    #[test]
    fn trimming_keeps_equality_canonical() {
        let mut a = SubsetMask::singleton(200);
        a.remove(200);
        assert_eq!(a, SubsetMask::new());
        assert!(a.is_empty());
        assert_eq!(a.last(), None);
    }

    #[test]
    fn split_and_shift() {
        let a: SubsetMask = [0, 3, 5, 9].into_iter().collect();
        let (lo, hi) = a.split_at(5);
        assert_eq!(lo.to_vec(), vec![0, 3]);
        assert_eq!(hi.to_vec(), vec![0, 4]);
        assert_eq!(hi.shifted_up(5).union(&lo), a);
    }

    #[test]
    fn serde_as_index_list() {
        let a: SubsetMask = [2, 65].into_iter().collect();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[2,65]");
        assert_eq!(serde_json::from_str::<SubsetMask>(&s).unwrap(), a);
        assert!(serde_json::from_str::<SubsetMask>("[5000]").is_err());
    }

    fn mask_strategy() -> impl Strategy<Value = (Vec<usize>, SubsetMask)> {
        proptest::collection::vec(0usize..300, 0..40).prop_map(|v| {
            let m: SubsetMask = v.iter().copied().collect();
            let mut v = v;
            v.sort();
            v.dedup();
            (v, m)
        })
    }

    proptest! {
        #[test]
        fn set_algebra_matches_btreeset((va, a) in mask_strategy(), (vb, b) in mask_strategy()) {
            use std::collections::BTreeSet;
            let sa: BTreeSet<usize> = va.into_iter().collect();
            let sb: BTreeSet<usize> = vb.into_iter().collect();
            prop_assert_eq!(a.union(&b).to_vec(), sa.union(&sb).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.intersection(&b).to_vec(), sa.intersection(&sb).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.difference(&b).to_vec(), sa.difference(&sb).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.is_subset(&b), sa.is_subset(&sb));
            prop_assert_eq!(a.is_disjoint(&b), sa.is_disjoint(&sb));
            prop_assert_eq!(a.len(), sa.len());
            prop_assert_eq!(a.first(), sa.first().copied());
            prop_assert_eq!(a.last(), sa.last().copied());
        }
    }
}
