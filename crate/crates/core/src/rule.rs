//! Random choice rules and their primitive queries.

use crate::correspondence::ChoiceCorrespondence;
use crate::error::{Error, Result};
use crate::prob::{ExtendedRatio, Mode, Prob};
use crate::universe::{AltSet, ChoiceFamily, ChoiceSet, Universe};

/// A probability distribution over every choice set of a family.
///
/// Distributions are stored per set, aligned with the members of the set in
/// ascending index order.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomChoiceRule {
    universe: Universe,
    family: ChoiceFamily,
    mode: Mode,
    table: Vec<Vec<Prob>>,
}

impl RandomChoiceRule {
    /// Validates and builds a rule. `table[i]` is the distribution on `family.get(i)`.
    pub fn new(
        universe: Universe,
        family: ChoiceFamily,
        mode: Mode,
        table: Vec<Vec<Prob>>,
    ) -> Result<Self> {
        if family.universe_size() != universe.len() || table.len() != family.len() {
            return Err(Error::Mismatch);
        }
        let table: Vec<Vec<Prob>> = table
            .into_iter()
            .map(|dist| dist.iter().map(|p| mode.convert(p)).collect())
            .collect();
        for (i, dist) in table.iter().enumerate() {
            validate_distribution(&universe, family.get(i), dist, mode)?;
        }
        Ok(Self {
            universe,
            family,
            mode,
            table,
        })
    }

    /// Builds a rule from `(set, distribution)` entries in any order.
    pub fn from_entries<I>(universe: Universe, mode: Mode, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ChoiceSet, Vec<Prob>)>,
    {
        let mut entries: Vec<(ChoiceSet, Vec<Prob>)> = entries.into_iter().collect();
        entries.sort_by_key(|a| a.0);
        let family = ChoiceFamily::from_sets(universe.len(), entries.iter().map(|e| e.0))?;
        let table = entries.into_iter().map(|e| e.1).collect();
        Self::new(universe, family, mode, table)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn family(&self) -> &ChoiceFamily {
        &self.family
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Distribution on the set with family index `set`.
    pub fn distribution(&self, set: usize) -> &[Prob] {
        &self.table[set]
    }

    pub fn set_index(&self, set: AltSet) -> Result<usize> {
        self.family.index_of(set).ok_or(Error::UnknownChoiceSet)
    }

    /// `p(a, A)` by family index; zero-cost lookup.
    pub fn prob_at(&self, set: usize, a: usize) -> Option<&Prob> {
        let pos = self.family.get(set).position(a)?;
        Some(&self.table[set][pos])
    }

    /// `p(a, A)`.
    pub fn prob(&self, a: usize, set: AltSet) -> Result<&Prob> {
        let idx = self.set_index(set)?;
        self.prob_at(idx, a).ok_or(Error::NotAMember)
    }

    /// `p_A(B)`: the mass of `event ∩ A` under `p_A`.
    pub fn mass_at(&self, set: usize, event: AltSet) -> Prob {
        let members = self.family.get(set);
        let mut total = Prob::zero(self.mode);
        for (pos, a) in members.iter().enumerate() {
            if event.contains(a) {
                total = &total + &self.table[set][pos];
            }
        }
        total
    }

    pub fn mass(&self, event: AltSet, set: AltSet) -> Result<Prob> {
        Ok(self.mass_at(self.set_index(set)?, event))
    }

    pub fn support_at(&self, set: usize) -> ChoiceSet {
        let members = self.family.get(set);
        let support: AltSet = members
            .iter()
            .zip(&self.table[set])
            .filter(|(_, p)| self.mode.is_positive(p))
            .map(|(a, _)| a)
            .collect();
        ChoiceSet::new(support).expect("validated distributions have nonempty support")
    }

    /// `supp p_A = {a in A : p(a, A) > 0}`.
    pub fn support(&self, set: AltSet) -> Result<ChoiceSet> {
        Ok(self.support_at(self.set_index(set)?))
    }

    /// The support correspondence `A -> supp p_A` on the rule's family.
    pub fn support_correspondence(&self) -> ChoiceCorrespondence {
        let values = (0..self.family.len()).map(|i| self.support_at(i)).collect();
        ChoiceCorrespondence::new(self.universe.clone(), self.family.clone(), values)
            .expect("supports are nonempty subsets")
    }

    /// Odds `r_A(B, C) = p_A(B) / p_A(C)` for `B, C ⊆ A`.
    pub fn odds(&self, set: AltSet, b: AltSet, c: AltSet) -> Result<ExtendedRatio> {
        let idx = self.set_index(set)?;
        if !b.is_subset(set) || !c.is_subset(set) {
            return Err(Error::SubsetViolation);
        }
        Ok(ExtendedRatio::of(
            &self.mass_at(idx, b),
            &self.mass_at(idx, c),
            self.mode,
        ))
    }

    /// Binary odds `r(b, c)` on the pair `{b, c}`.
    pub fn binary_odds(&self, b: usize, c: usize) -> Result<ExtendedRatio> {
        self.odds(
            AltSet::pair(b, c),
            AltSet::singleton(b),
            AltSet::singleton(c),
        )
    }

    /// The same rule in float mode with tolerance `epsilon`.
    pub fn to_float(&self, epsilon: f64) -> RandomChoiceRule {
        let mode = Mode::Float { epsilon };
        RandomChoiceRule {
            universe: self.universe.clone(),
            family: self.family.clone(),
            mode,
            table: self
                .table
                .iter()
                .map(|d| d.iter().map(Prob::to_float).collect())
                .collect(),
        }
    }

    /// Sup-norm distance to another rule on the same family.
    pub fn sup_distance(&self, other: &RandomChoiceRule) -> Result<f64> {
        if self.family != other.family {
            return Err(Error::Mismatch);
        }
        let mut worst: f64 = 0.0;
        for (d1, d2) in self.table.iter().zip(&other.table) {
            for (p, q) in d1.iter().zip(d2) {
                worst = worst.max((p.to_f64() - q.to_f64()).abs());
            }
        }
        Ok(worst)
    }

    /// Entrywise equality under this rule's mode.
    pub fn approx_eq(&self, other: &RandomChoiceRule) -> bool {
        self.family == other.family
            && self.universe == other.universe
            && self
                .table
                .iter()
                .zip(&other.table)
                .all(|(d1, d2)| d1.iter().zip(d2).all(|(p, q)| self.mode.approx_eq(p, q)))
    }
}

fn validate_distribution(
    universe: &Universe,
    set: ChoiceSet,
    dist: &[Prob],
    mode: Mode,
) -> Result<()> {
    let label = || universe.format_set(*set);
    if dist.len() != set.len() {
        return Err(Error::InvalidDistribution(format!(
            "{} has {} members but {} probabilities",
            label(),
            set.len(),
            dist.len()
        )));
    }
    let eps = mode.epsilon();
    let mut total = Prob::zero(mode);
    for p in dist {
        if p.to_f64().is_nan() {
            return Err(Error::InvalidDistribution(format!("NaN on {}", label())));
        }
        if mode.is_exact() && !p.is_exact() {
            return Err(Error::InvalidDistribution(format!(
                "float probability {p} in an exact rule on {}",
                label()
            )));
        }
        let out_of_range = match mode {
            Mode::Exact => p.is_negative() || p.to_f64() > 1.0,
            Mode::Float { .. } => p.to_f64() < -eps || p.to_f64() > 1.0 + eps,
        };
        if out_of_range {
            return Err(Error::InvalidDistribution(format!(
                "probability {p} outside [0, 1] on {}",
                label()
            )));
        }
        total = &total + p;
    }
    let normalized = match mode {
        Mode::Exact => total == Prob::one(mode),
        Mode::Float { .. } => (total.to_f64() - 1.0).abs() <= eps * set.len() as f64,
    };
    if !normalized {
        return Err(Error::InvalidDistribution(format!(
            "masses on {} sum to {total}",
            label()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::running_example;

    fn u3() -> Universe {
        Universe::new(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn support_examples() {
        let rule = running_example();
        let u = rule.universe().clone();
        assert_eq!(
            rule.support(*u.full()).unwrap(),
            u.choice_set(&["a", "b"]).unwrap()
        );
        assert_eq!(
            rule.support(AltSet::singleton(0)).unwrap(),
            ChoiceSet::singleton(0)
        );
        let corr = rule.support_correspondence();
        assert_eq!(
            corr.get(AltSet::pair(0, 2)).unwrap(),
            ChoiceSet::singleton(0)
        );
        assert_eq!(
            corr.get(AltSet::pair(1, 2)).unwrap(),
            ChoiceSet::singleton(1)
        );
        assert_eq!(corr.get(AltSet::pair(0, 1)).unwrap(), ChoiceSet::pair(0, 1));
    }

    #[test]
    fn uniform_rule_has_full_support() {
        let u = u3();
        let third = Prob::ratio(1, 3);
        let rule = RandomChoiceRule::from_entries(
            u.clone(),
            Mode::Exact,
            [(u.full(), vec![third.clone(), third.clone(), third])],
        )
        .unwrap();
        assert_eq!(rule.support(*u.full()).unwrap(), u.full());
        assert_eq!(
            rule.support(AltSet::pair(0, 1)).unwrap_err(),
            Error::UnknownChoiceSet
        );
    }

    #[test]
    fn odds_examples() {
        let rule = running_example();
        assert_eq!(
            rule.binary_odds(0, 1).unwrap(),
            ExtendedRatio::Finite(Prob::ratio(2, 1))
        );
        assert_eq!(rule.binary_odds(0, 2).unwrap(), ExtendedRatio::Infinite);
        assert_eq!(
            rule.binary_odds(2, 0).unwrap(),
            ExtendedRatio::Finite(Prob::ratio(0, 1))
        );
        let c = AltSet::singleton(2);
        assert_eq!(
            rule.odds(AltSet::pair(0, 2), c, c).unwrap(),
            ExtendedRatio::Indeterminate
        );
        assert_eq!(
            rule.odds(AltSet::pair(0, 2), AltSet::singleton(1), c)
                .unwrap_err(),
            Error::SubsetViolation
        );
    }

    #[test]
    fn rejects_bad_distributions() {
        let u = u3();
        let bad_sum = RandomChoiceRule::from_entries(
            u.clone(),
            Mode::Exact,
            [(
                ChoiceSet::pair(0, 1),
                vec![Prob::ratio(1, 2), Prob::ratio(1, 3)],
            )],
        );
        assert!(matches!(bad_sum, Err(Error::InvalidDistribution(_))));
        let negative = RandomChoiceRule::from_entries(
            u.clone(),
            Mode::Exact,
            [(
                ChoiceSet::pair(0, 1),
                vec![Prob::ratio(3, 2), Prob::ratio(-1, 2)],
            )],
        );
        assert!(matches!(negative, Err(Error::InvalidDistribution(_))));
        let wrong_len = RandomChoiceRule::from_entries(
            u.clone(),
            Mode::Exact,
            [(ChoiceSet::pair(0, 1), vec![Prob::ratio(1, 1)])],
        );
        assert!(matches!(wrong_len, Err(Error::InvalidDistribution(_))));
        let float_ok = RandomChoiceRule::from_entries(
            u,
            Mode::float(),
            [(
                ChoiceSet::pair(0, 1),
                vec![Prob::Float(0.5 + 1e-10), Prob::Float(0.5)],
            )],
        );
        assert!(float_ok.is_ok());
    }
}
