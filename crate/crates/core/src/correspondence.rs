use crate::error::{Error, Result};
use crate::universe::{AltSet, ChoiceFamily, ChoiceSet, Universe};

/// A choice correspondence `Γ` on a family: `∅ ≠ Γ(A) ⊆ A`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceCorrespondence {
    universe: Universe,
    family: ChoiceFamily,
    values: Vec<ChoiceSet>,
}

impl ChoiceCorrespondence {
    /// `values[i]` is `Γ(family.get(i))`.
    pub fn new(universe: Universe, family: ChoiceFamily, values: Vec<ChoiceSet>) -> Result<Self> {
        if family.universe_size() != universe.len() || values.len() != family.len() {
            return Err(Error::Mismatch);
        }
        for (i, value) in values.iter().enumerate() {
            if !value.is_subset(*family.get(i)) {
                return Err(Error::InvalidCorrespondence);
            }
        }
        Ok(Self {
            universe,
            family,
            values,
        })
    }

    pub fn from_fn<F>(universe: Universe, family: ChoiceFamily, mut choose: F) -> Result<Self>
    where
        F: FnMut(ChoiceSet) -> AltSet,
    {
        let values = family
            .sets()
            .iter()
            .map(|&set| ChoiceSet::new(choose(set)).map_err(|_| Error::InvalidCorrespondence))
            .collect::<Result<Vec<_>>>()?;
        Self::new(universe, family, values)
    }

    /// `Γ(A) = A` for every set of the family.
    pub fn identity(universe: Universe, family: ChoiceFamily) -> Self {
        let values = family.sets().to_vec();
        Self {
            universe,
            family,
            values,
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn family(&self) -> &ChoiceFamily {
        &self.family
    }

    pub fn value_at(&self, set: usize) -> ChoiceSet {
        self.values[set]
    }

    pub fn values(&self) -> &[ChoiceSet] {
        &self.values
    }

    pub fn get(&self, set: AltSet) -> Result<ChoiceSet> {
        self.family
            .index_of(set)
            .map(|i| self.values[i])
            .ok_or(Error::UnknownChoiceSet)
    }

    /// Replaces `Γ(A)` for one set; used to build mutated correspondences.
    pub fn with_value(&self, set: AltSet, value: ChoiceSet) -> Result<Self> {
        let idx = self.family.index_of(set).ok_or(Error::UnknownChoiceSet)?;
        let mut values = self.values.clone();
        values[idx] = value;
        Self::new(self.universe.clone(), self.family.clone(), values)
    }
}
