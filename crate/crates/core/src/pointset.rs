//! Subsets of a finite ground set, stored as packed bit words.

use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

const WORD: usize = 64;

/// A subset of the ground set `{0, .., universe - 1}` of some causality.
///
/// Ordering is lexicographic on the packed words, which for ground sets of at
/// most 64 points is the ascending bit-mask order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    universe: usize,
    words: Vec<u64>,
}

fn word_count(universe: usize) -> usize {
    universe.div_ceil(WORD).max(1)
}

impl PointSet {
    pub fn empty(universe: usize) -> Self {
        PointSet {
            universe,
            words: vec![0; word_count(universe)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn singleton(universe: usize, i: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(i);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> Self {
        let mut s = Self::empty(universe);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Builds a set from a single-word mask. Panics if the mask has bits at or
    /// above `universe`, or if `universe > 64`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        assert!(universe <= WORD, "mask sets hold at most 64 points");
        assert!(
            universe == WORD || mask >> universe == 0,
            "mask {mask:#x} exceeds ground set of {universe} points"
        );
        PointSet {
            universe,
            words: vec![mask],
        }
    }

    /// The single-word mask, when the ground set fits in one word.
    pub fn to_mask(&self) -> Option<u64> {
        (self.universe <= WORD).then(|| self.words[0])
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe, "point {i} outside ground set of {}", self.universe);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.universe, "point {i} outside ground set of {}", self.universe);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.check_same(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        self.check_same(other);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// True iff the three sets share at least one point.
    pub fn intersects3(&self, b: &PointSet, c: &PointSet) -> bool {
        self.check_same(b);
        self.check_same(c);
        self.words
            .iter()
            .zip(&b.words)
            .zip(&c.words)
            .any(|((x, y), z)| x & y & z != 0)
    }

    pub fn union_with(&mut self, other: &PointSet) {
        self.check_same(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        self.check_same(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    fn check_same(&self, other: &PointSet) {
        assert_eq!(
            self.universe, other.universe,
            "point sets belong to ground sets of different sizes"
        );
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl BitAnd for &PointSet {
    type Output = PointSet;
    fn bitand(self, rhs: &PointSet) -> PointSet {
        let mut out = self.clone();
        out.intersect_with(rhs);
        out
    }
}

impl BitOr for &PointSet {
    type Output = PointSet;
    fn bitor(self, rhs: &PointSet) -> PointSet {
        let mut out = self.clone();
        out.union_with(rhs);
        out
    }
}

impl Sub for &PointSet {
    type Output = PointSet;
    fn sub(self, rhs: &PointSet) -> PointSet {
        self.check_same(rhs);
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&rhs.words) {
            *a &= !b;
        }
        out
    }
}

/// Iterates the indices of the set bits of a mask in ascending order.
pub(crate) fn mask_bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let bit = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(bit)
    })
}
