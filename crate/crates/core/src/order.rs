//! Weak orders as rank levels: lower rank is better, equal ranks are indifferent.

use std::cmp::Ordering;

use crate::correspondence::ChoiceCorrespondence;
use crate::error::{Error, Result};
use crate::universe::{AltSet, ChoiceFamily, ChoiceSet, Universe};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakOrder {
    universe: Universe,
    /// Dense ranks `0..levels`.
    ranks: Vec<usize>,
}

impl WeakOrder {
    /// Accepts arbitrary integer levels; they are compressed to dense ranks.
    pub fn from_ranks(universe: Universe, levels: &[i64]) -> Result<Self> {
        if levels.len() != universe.len() {
            return Err(Error::InvalidOrder);
        }
        let mut distinct: Vec<i64> = levels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let ranks = levels
            .iter()
            .map(|l| distinct.binary_search(l).expect("level present"))
            .collect();
        Ok(Self { universe, ranks })
    }

    /// Ordered partition, best class first.
    pub fn from_classes(universe: Universe, classes: &[AltSet]) -> Result<Self> {
        let mut ranks = vec![usize::MAX; universe.len()];
        for (level, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::InvalidOrder);
            }
            for a in class.iter() {
                if a >= ranks.len() || ranks[a] != usize::MAX {
                    return Err(Error::InvalidOrder);
                }
                ranks[a] = level;
            }
        }
        if ranks.contains(&usize::MAX) {
            return Err(Error::InvalidOrder);
        }
        Ok(Self { universe, ranks })
    }

    pub fn indifferent(universe: Universe) -> Self {
        let ranks = vec![0; universe.len()];
        Self { universe, ranks }
    }

    /// Strict chain with `best_first[0]` on top.
    pub fn chain(universe: Universe, best_first: &[usize]) -> Result<Self> {
        let classes: Vec<AltSet> = best_first.iter().map(|&a| AltSet::singleton(a)).collect();
        Self::from_classes(universe, &classes)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn rank(&self, a: usize) -> usize {
        self.ranks[a]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn levels(&self) -> usize {
        self.ranks.iter().max().map_or(0, |m| m + 1)
    }

    /// Indifference classes, best first.
    pub fn classes(&self) -> Vec<AltSet> {
        let mut classes = vec![AltSet::empty(); self.levels()];
        for (a, &r) in self.ranks.iter().enumerate() {
            classes[r].insert(a);
        }
        classes
    }

    /// `a ≻ b`.
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.ranks[a] < self.ranks[b]
    }

    /// `a ∼ b`.
    pub fn indifferent_between(&self, a: usize, b: usize) -> bool {
        self.ranks[a] == self.ranks[b]
    }

    pub fn compare(&self, a: usize, b: usize) -> Ordering {
        self.ranks[b].cmp(&self.ranks[a])
    }

    /// Rank-minimal members of `set`.
    pub fn maximizers(&self, set: ChoiceSet) -> ChoiceSet {
        let best = set.iter().map(|a| self.ranks[a]).min().expect("nonempty");
        let top: AltSet = set.iter().filter(|&a| self.ranks[a] == best).collect();
        ChoiceSet::new(top).expect("nonempty")
    }

    /// `Γ(A) = maximizers(A)` on every set of `family`.
    pub fn correspondence(&self, family: &ChoiceFamily) -> Result<ChoiceCorrespondence> {
        if family.universe_size() != self.universe.len() {
            return Err(Error::Mismatch);
        }
        let values = family.sets().iter().map(|&s| self.maximizers(s)).collect();
        ChoiceCorrespondence::new(self.universe.clone(), family.clone(), values)
    }

    /// `u(x) = -rank(x)`; `argmax_A u` equals [`WeakOrder::maximizers`].
    pub fn utility(&self) -> Vec<f64> {
        self.ranks.iter().map(|&r| -(r as f64)).collect()
    }

    /// Lexicographic composition: rank by `self`, break ties by `second`.
    pub fn lex_compose(&self, second: &WeakOrder) -> Result<WeakOrder> {
        if self.universe != second.universe {
            return Err(Error::Mismatch);
        }
        let levels: Vec<i64> = self
            .ranks
            .iter()
            .zip(&second.ranks)
            .map(|(&r1, &r2)| (r1 * (second.levels() + 1) + r2) as i64)
            .collect();
        WeakOrder::from_ranks(self.universe.clone(), &levels)
    }
}

/// Free-function forms of the order queries.
pub fn maximizers(order: &WeakOrder, set: ChoiceSet) -> ChoiceSet {
    order.maximizers(set)
}

pub fn correspondence_from_order(
    order: &WeakOrder,
    family: &ChoiceFamily,
) -> Result<ChoiceCorrespondence> {
    order.correspondence(family)
}

pub fn utility_from_order(order: &WeakOrder) -> Vec<f64> {
    order.utility()
}

pub fn lex_compose(first: &WeakOrder, second: &WeakOrder) -> Result<WeakOrder> {
    first.lex_compose(second)
}
