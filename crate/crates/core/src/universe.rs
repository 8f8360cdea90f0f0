//! Finite universes of alternatives, subsets of them and families of choice sets.
//!
//! Alternatives are addressed by their index in the universe. The universe
//! keeps its labels sorted, so index order coincides with lexicographic
//! label order and every iteration below is deterministic.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest universe representable by the bitset encoding.
pub const MAX_ALTERNATIVES: usize = 64;

/// Largest universe for which the all-subsets family is materialized.
pub const MAX_ALL_SUBSETS: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Universe {
    labels: Arc<[String]>,
}

impl Universe {
    /// Builds a universe from labels in any order; they are sorted.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        if labels.len() > MAX_ALTERNATIVES {
            return Err(Error::UniverseTooLarge {
                size: labels.len(),
                max: MAX_ALTERNATIVES,
            });
        }
        for label in &labels {
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(Error::InvalidLabel(label.clone()));
            }
        }
        labels.sort();
        for pair in labels.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateLabel(pair[0].clone()));
            }
        }
        Ok(Self {
            labels: labels.into(),
        })
    }

    /// Universe labelled `a`, `b`, `c`, ... (then `x26`, `x27`, ... past `z`).
    pub fn alphabetic(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("x{i}")
            }
        }))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .binary_search_by(|probe| probe.as_str().cmp(label))
            .map_err(|_| Error::UnknownAlternative(label.to_string()))
    }

    pub fn full(&self) -> ChoiceSet {
        ChoiceSet(AltSet::full(self.len()))
    }

    /// Parses a set of labels into a choice set of this universe.
    pub fn choice_set<S: AsRef<str>>(&self, labels: &[S]) -> Result<ChoiceSet> {
        let mut set = AltSet::empty();
        for label in labels {
            let index = self.index_of(label.as_ref())?;
            if set.contains(index) {
                return Err(Error::DuplicateLabel(label.as_ref().to_string()));
            }
            set.insert(index);
        }
        ChoiceSet::new(set)
    }

    pub fn set_labels(&self, set: AltSet) -> Vec<String> {
        set.iter().map(|i| self.labels[i].clone()).collect()
    }

    pub fn format_set(&self, set: AltSet) -> String {
        format!("{{{}}}", self.set_labels(set).join(","))
    }
}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

/// Any subset of a universe, possibly empty.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AltSet(u64);

impl AltSet {
    pub const fn empty() -> Self {
        AltSet(0)
    }

    pub fn full(size: usize) -> Self {
        if size >= 64 {
            AltSet(u64::MAX)
        } else {
            AltSet((1u64 << size) - 1)
        }
    }

    pub fn singleton(index: usize) -> Self {
        AltSet(1u64 << index)
    }

    pub fn pair(a: usize, b: usize) -> Self {
        AltSet((1u64 << a) | (1u64 << b))
    }

    pub fn from_bits(bits: u64) -> Self {
        AltSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut set = AltSet::empty();
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn insert(&mut self, index: usize) {
        self.0 |= 1u64 << index;
    }

    pub fn remove(&mut self, index: usize) {
        self.0 &= !(1u64 << index);
    }

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 & (1u64 << index) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: AltSet) -> AltSet {
        AltSet(self.0 | other.0)
    }

    pub fn intersection(self, other: AltSet) -> AltSet {
        AltSet(self.0 & other.0)
    }

    pub fn difference(self, other: AltSet) -> AltSet {
        AltSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: AltSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest index in the set.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Rank of `index` among the members, i.e. its position in [`AltSet::iter`].
    pub fn position(self, index: usize) -> Option<usize> {
        if !self.contains(index) {
            return None;
        }
        let below = self.0 & ((1u64 << index) - 1);
        Some(below.count_ones() as usize)
    }

    /// Members in ascending index order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// Every subset of `self`, the empty set included, in increasing bit order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Compresses a subset of `self` into the low `self.len()` bits.
    pub fn compress(self, subset: AltSet) -> usize {
        let mut out = 0usize;
        for (k, i) in self.iter().enumerate() {
            if subset.contains(i) {
                out |= 1 << k;
            }
        }
        out
    }
}

impl Ord for AltSet {
    /// Canonical order: by cardinality, then lexicographically on the sorted members.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for AltSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for AltSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for AltSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        AltSet::from_indices(iter)
    }
}

pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = AltSet;

    fn next(&mut self) -> Option<AltSet> {
        let current = self.next?;
        self.next = if current == self.mask {
            None
        } else {
            Some(current.wrapping_sub(self.mask) & self.mask)
        };
        Some(AltSet(current))
    }
}

/// A nonempty subset of a universe.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChoiceSet(AltSet);

impl ChoiceSet {
    pub fn new(set: AltSet) -> Result<Self> {
        if set.is_empty() {
            Err(Error::EmptyChoiceSet)
        } else {
            Ok(ChoiceSet(set))
        }
    }

    pub fn singleton(index: usize) -> Self {
        ChoiceSet(AltSet::singleton(index))
    }

    pub fn pair(a: usize, b: usize) -> Self {
        ChoiceSet(AltSet::pair(a, b))
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        Self::new(AltSet::from_indices(indices))
    }

    pub fn as_set(self) -> AltSet {
        self.0
    }
}

impl Deref for ChoiceSet {
    type Target = AltSet;

    fn deref(&self) -> &AltSet {
        &self.0
    }
}

impl fmt::Debug for ChoiceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<ChoiceSet> for AltSet {
    fn from(set: ChoiceSet) -> AltSet {
        set.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Completeness {
    /// Every nonempty subset of the universe is present.
    AllSubsets,
    Partial,
}

/// A duplicate-free collection of choice sets in canonical order.
#[derive(Clone)]
pub struct ChoiceFamily {
    inner: Arc<FamilyInner>,
}

struct FamilyInner {
    universe_size: usize,
    sets: Vec<ChoiceSet>,
    index: HashMap<AltSet, usize>,
}

impl ChoiceFamily {
    pub fn from_sets<I>(universe_size: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = ChoiceSet>,
    {
        if universe_size == 0 {
            return Err(Error::EmptyUniverse);
        }
        let full = AltSet::full(universe_size);
        let mut sets: Vec<ChoiceSet> = sets.into_iter().collect();
        if sets.iter().any(|s| !s.is_subset(full)) {
            return Err(Error::OutsideUniverse);
        }
        sets.sort();
        if sets.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSet);
        }
        let index = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_set(), i))
            .collect();
        Ok(Self {
            inner: Arc::new(FamilyInner {
                universe_size,
                sets,
                index,
            }),
        })
    }

    /// Every nonempty subset of a universe of `universe_size` alternatives.
    pub fn all_subsets(universe_size: usize) -> Result<Self> {
        if universe_size > MAX_ALL_SUBSETS {
            return Err(Error::SizeLimit {
                what: "the all-subsets family",
                size: universe_size,
                max: MAX_ALL_SUBSETS,
            });
        }
        let full = AltSet::full(universe_size);
        Self::from_sets(
            universe_size,
            full.subsets().filter(|s| !s.is_empty()).map(ChoiceSet),
        )
    }

    /// Every two-element set plus the full universe.
    pub fn pairs(universe_size: usize) -> Result<Self> {
        let mut sets = Vec::new();
        for a in 0..universe_size {
            for b in a + 1..universe_size {
                sets.push(ChoiceSet::pair(a, b));
            }
        }
        let full = ChoiceSet(AltSet::full(universe_size));
        if !sets.contains(&full) {
            sets.push(full);
        }
        Self::from_sets(universe_size, sets)
    }

    pub fn universe_size(&self) -> usize {
        self.inner.universe_size
    }

    pub fn sets(&self) -> &[ChoiceSet] {
        &self.inner.sets
    }

    pub fn len(&self) -> usize {
        self.inner.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.sets.is_empty()
    }

    pub fn get(&self, index: usize) -> ChoiceSet {
        self.inner.sets[index]
    }

    pub fn index_of(&self, set: AltSet) -> Option<usize> {
        self.inner.index.get(&set).copied()
    }

    pub fn contains(&self, set: AltSet) -> bool {
        self.inner.index.contains_key(&set)
    }

    pub fn completeness(&self) -> Completeness {
        let n = self.inner.universe_size;
        if n < 64 && self.inner.sets.len() as u128 == (1u128 << n) - 1 {
            Completeness::AllSubsets
        } else {
            Completeness::Partial
        }
    }

    /// Whether every two-element subset of the universe is present.
    pub fn has_all_pairs(&self) -> bool {
        self.missing_pair().is_none()
    }

    pub fn missing_pair(&self) -> Option<(usize, usize)> {
        let n = self.universe_size();
        for a in 0..n {
            for b in a + 1..n {
                if !self.contains(AltSet::pair(a, b)) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Indices of the family members that are subsets of the set at `outer`,
    /// in canonical order (`outer` itself included).
    pub fn subsets_of(&self, outer: usize) -> Vec<usize> {
        let a = self.get(outer).as_set();
        let mut found: Vec<usize> = if a.len() < 20 && (1usize << a.len()) < self.len() {
            a.subsets().filter_map(|s| self.index_of(s)).collect()
        } else {
            (0..self.len())
                .filter(|&i| self.get(i).is_subset(a))
                .collect()
        };
        found.sort_unstable();
        found
    }

    /// All `(inner, outer)` index pairs with `inner ⊆ outer`, ordered by outer then inner.
    pub fn nested_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for outer in 0..self.len() {
            for inner in self.subsets_of(outer) {
                pairs.push((inner, outer));
            }
        }
        pairs
    }
}

impl PartialEq for ChoiceFamily {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.universe_size == other.inner.universe_size
                && self.inner.sets == other.inner.sets)
    }
}

impl Eq for ChoiceFamily {}

impl fmt::Debug for ChoiceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChoiceFamily")
            .field("universe_size", &self.inner.universe_size)
            .field("sets", &self.inner.sets)
            .finish()
    }
}
