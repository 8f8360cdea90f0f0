//! Decision procedures for the choice axioms, each returning violation witnesses.
//!
//! Every checker quantifies only over sets present in the rule's family and
//! records the family's completeness in its report, so a vacuous pass on a
//! sparse family is visible. Witnesses are emitted in canonical order (outer
//! set, then inner set, then alternatives) and capped at [`WITNESS_CAP`].

use std::collections::BTreeMap;
use std::fmt;

use crate::correspondence::ChoiceCorrespondence;
use crate::error::{Error, Result};
use crate::prob::{ExtendedRatio, Prob};
use crate::rule::RandomChoiceRule;
use crate::universe::{AltSet, Completeness, Universe, MAX_ALL_SUBSETS};

pub const WITNESS_CAP: usize = 100;

/// Subset-mass tables are built for sets up to this size.
const MASS_TABLE_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    ChoiceAxiom,
    OddsIndependence,
    ProductRule,
    SetChoiceAxiom,
    SetIntersectionRule,
    Positivity,
    FullSupport,
    Warp,
    RenyiConditioning,
}

impl Axiom {
    pub const ALL: [Axiom; 9] = [
        Axiom::ChoiceAxiom,
        Axiom::OddsIndependence,
        Axiom::ProductRule,
        Axiom::SetChoiceAxiom,
        Axiom::SetIntersectionRule,
        Axiom::Positivity,
        Axiom::FullSupport,
        Axiom::Warp,
        Axiom::RenyiConditioning,
    ];

    /// The five conditions that are equivalent for every random choice rule.
    pub const EQUIVALENT_FORMS: [Axiom; 5] = [
        Axiom::ChoiceAxiom,
        Axiom::SetChoiceAxiom,
        Axiom::ProductRule,
        Axiom::OddsIndependence,
        Axiom::SetIntersectionRule,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::ChoiceAxiom => "choice-axiom",
            Axiom::OddsIndependence => "odds-independence",
            Axiom::ProductRule => "product-rule",
            Axiom::SetChoiceAxiom => "set-choice-axiom",
            Axiom::SetIntersectionRule => "set-intersection-rule",
            Axiom::Positivity => "positivity",
            Axiom::FullSupport => "full-support",
            Axiom::Warp => "warp",
            Axiom::RenyiConditioning => "renyi-conditioning",
        }
    }

    pub fn from_name(name: &str) -> Option<Axiom> {
        Axiom::ALL.into_iter().find(|a| a.name() == name)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
}

/// One side of a violated identity.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    Prob(Prob),
    Ratio(ExtendedRatio),
    Set(AltSet),
}

/// A concrete violation.
///
/// Roles by axiom: `outer` is the larger set `A`, `inner` the subset `B`
/// (the pair `{a, b}` for odds independence), and `event` the tested subset
/// (`C` for the set form, `Y` for the intersection rule, `Γ(A)` for WARP).
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub axiom: Axiom,
    pub outer: AltSet,
    pub inner: Option<AltSet>,
    pub event: Option<AltSet>,
    pub alternatives: Vec<usize>,
    pub lhs: Quantity,
    pub rhs: Quantity,
}

impl Witness {
    pub fn describe(&self, universe: &Universe) -> String {
        let mut parts = vec![format!("A={}", universe.format_set(self.outer))];
        if let Some(b) = self.inner {
            parts.push(format!("B={}", universe.format_set(b)));
        }
        if let Some(y) = self.event {
            parts.push(format!("Y={}", universe.format_set(y)));
        }
        if !self.alternatives.is_empty() {
            let alts: Vec<&str> = self
                .alternatives
                .iter()
                .map(|&a| universe.label(a))
                .collect();
            parts.push(format!("alternatives={}", alts.join(",")));
        }
        let show = |q: &Quantity| match q {
            Quantity::Prob(p) => p.to_string(),
            Quantity::Ratio(r) => r.to_string(),
            Quantity::Set(s) => universe.format_set(*s),
        };
        format!(
            "{}: {}: {} != {}",
            self.axiom,
            parts.join(" "),
            show(&self.lhs),
            show(&self.rhs)
        )
    }

    /// Re-evaluates the witness against the raw definitions of the rule's
    /// axiom and returns whether it is a genuine violation.
    pub fn replay_on_rule(&self, rule: &RandomChoiceRule) -> bool {
        replay(self, rule).unwrap_or(false)
    }

    /// WARP witnesses are replayed against a correspondence.
    pub fn replay_on_correspondence(&self, corr: &ChoiceCorrespondence) -> bool {
        if self.axiom != Axiom::Warp {
            return false;
        }
        let (Some(b), Ok(gamma_a)) = (self.inner, corr.get(self.outer)) else {
            return false;
        };
        let Ok(gamma_b) = corr.get(b) else {
            return false;
        };
        let restricted = gamma_a.intersection(b);
        b.is_subset(self.outer) && !restricted.is_empty() && restricted != *gamma_b
    }
}

fn replay(w: &Witness, rule: &RandomChoiceRule) -> Result<bool> {
    let mode = rule.mode();
    let p = |a: usize, set: AltSet| rule.prob(a, set).cloned();
    let mass = |event: AltSet, set: AltSet| rule.mass(event, set);
    let a_set = w.outer;
    let inner = || w.inner.ok_or(Error::SubsetViolation);
    let alt = |k: usize| w.alternatives.get(k).copied().ok_or(Error::NotAMember);
    Ok(match w.axiom {
        Axiom::ChoiceAxiom => {
            let (b_set, a) = (inner()?, alt(0)?);
            let lhs = p(a, a_set)?;
            let rhs = &p(a, b_set)? * &mass(b_set, a_set)?;
            b_set.is_subset(a_set) && !mode.approx_eq(&lhs, &rhs)
        }
        Axiom::OddsIndependence => {
            let (a, b) = (alt(0)?, alt(1)?);
            let pair = AltSet::pair(a, b);
            let lhs = ExtendedRatio::of(&p(a, pair)?, &p(b, pair)?, mode);
            let rhs = ExtendedRatio::of(&p(a, a_set)?, &p(b, a_set)?, mode);
            !rhs.is_indeterminate() && !lhs.approx_eq(&rhs, mode)
        }
        Axiom::ProductRule => {
            let (b_set, a, b) = (inner()?, alt(0)?, alt(1)?);
            let lhs = &p(b, b_set)? * &p(a, a_set)?;
            let rhs = &p(a, b_set)? * &p(b, a_set)?;
            b_set.is_subset(a_set) && !mode.approx_eq(&lhs, &rhs)
        }
        Axiom::SetChoiceAxiom => {
            let b_set = inner()?;
            let c = w.event.ok_or(Error::SubsetViolation)?;
            let lhs = mass(c, a_set)?;
            let rhs = &mass(c, b_set)? * &mass(b_set, a_set)?;
            c.is_subset(b_set) && b_set.is_subset(a_set) && !mode.approx_eq(&lhs, &rhs)
        }
        Axiom::SetIntersectionRule => {
            let b_set = inner()?;
            let y = w.event.ok_or(Error::SubsetViolation)?;
            let lhs = mass(y.intersection(b_set), a_set)?;
            let rhs = &mass(y, b_set)? * &mass(b_set, a_set)?;
            b_set.is_subset(a_set) && !mode.approx_eq(&lhs, &rhs)
        }
        Axiom::Positivity => {
            let a = alt(0)?;
            a_set.len() == 2 && !mode.is_positive(&p(a, a_set)?)
        }
        Axiom::FullSupport => *rule.support(a_set)? != a_set,
        Axiom::Warp => {
            let corr = rule.support_correspondence();
            w.replay_on_correspondence(&corr)
        }
        Axiom::RenyiConditioning => {
            let (b_set, a) = (inner()?, alt(0)?);
            let p_a_outer = p(a, a_set)?;
            if !b_set.is_subset(a_set) || !mode.is_positive(&p_a_outer) {
                return Ok(false);
            }
            let lhs = p(a, b_set)?;
            let rhs = &p_a_outer / &mass(b_set, a_set)?;
            !mode.approx_eq(&lhs, &rhs)
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub verdict: Verdict,
    /// At most [`WITNESS_CAP`] witnesses, the canonically first ones.
    pub witnesses: Vec<Witness>,
    /// Total number of violations found, including those not stored.
    pub violations: usize,
    pub pairs_checked: usize,
    pub completeness: Completeness,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

struct Collector {
    axiom: Axiom,
    witnesses: Vec<Witness>,
    violations: usize,
    pairs_checked: usize,
}

impl Collector {
    fn new(axiom: Axiom) -> Self {
        Self {
            axiom,
            witnesses: Vec::new(),
            violations: 0,
            pairs_checked: 0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn violation(
        &mut self,
        outer: AltSet,
        inner: Option<AltSet>,
        event: Option<AltSet>,
        alternatives: Vec<usize>,
        lhs: Quantity,
        rhs: Quantity,
    ) {
        self.violations += 1;
        if self.witnesses.len() < WITNESS_CAP {
            self.witnesses.push(Witness {
                axiom: self.axiom,
                outer,
                inner,
                event,
                alternatives,
                lhs,
                rhs,
            });
        }
    }

    fn finish(self, completeness: Completeness) -> AxiomReport {
        AxiomReport {
            axiom: self.axiom,
            verdict: if self.violations == 0 {
                Verdict::Holds
            } else {
                Verdict::Fails
            },
            witnesses: self.witnesses,
            violations: self.violations,
            pairs_checked: self.pairs_checked,
            completeness,
        }
    }
}

/// Masses `p_A(S)` for every `S ⊆ A`, indexed by [`AltSet::compress`].
struct SubsetMasses {
    tables: Vec<Option<Vec<Prob>>>,
}

impl SubsetMasses {
    fn new(rule: &RandomChoiceRule) -> Self {
        let family = rule.family();
        let tables = (0..family.len())
            .map(|i| {
                let set = family.get(i);
                (set.len() <= MASS_TABLE_LIMIT).then(|| {
                    let dist = rule.distribution(i);
                    let size = 1usize << set.len();
                    let mut table = Vec::with_capacity(size);
                    table.push(Prob::zero(rule.mode()));
                    for sub in 1..size {
                        let low = sub.trailing_zeros() as usize;
                        let value = &table[sub & (sub - 1)] + &dist[low];
                        table.push(value);
                    }
                    table
                })
            })
            .collect();
        Self { tables }
    }

    fn mass(&self, rule: &RandomChoiceRule, set: usize, event: AltSet) -> Prob {
        match &self.tables[set] {
            Some(table) => {
                let members = rule.family().get(set);
                table[members.compress(event.intersection(*members))].clone()
            }
            None => rule.mass_at(set, event),
        }
    }
}

/// `p(a, A) = p(a, B) p(B, A)` for all `B ⊆ A` in the family and `a ∈ B`.
pub fn check_choice_axiom(rule: &RandomChoiceRule) -> AxiomReport {
    let mode = rule.mode();
    let family = rule.family();
    let mut out = Collector::new(Axiom::ChoiceAxiom);
    for (inner, outer) in family.nested_pairs() {
        out.pairs_checked += 1;
        let (b_set, a_set) = (family.get(inner).as_set(), family.get(outer).as_set());
        let p_b_in_a = rule.mass_at(outer, b_set);
        for a in b_set.iter() {
            let lhs = rule.prob_at(outer, a).expect("member");
            let rhs = rule.prob_at(inner, a).expect("member") * &p_b_in_a;
            if !mode.approx_eq(lhs, &rhs) {
                out.violation(
                    a_set,
                    Some(b_set),
                    None,
                    vec![a],
                    Quantity::Prob(lhs.clone()),
                    Quantity::Prob(rhs),
                );
            }
        }
    }
    out.finish(family.completeness())
}

/// Pairwise odds equal menu odds whenever the menu odds are not `0/0`.
///
/// Triples whose pair `{a, b}` is absent from the family are skipped.
pub fn check_odds_independence(rule: &RandomChoiceRule) -> AxiomReport {
    let mode = rule.mode();
    let family = rule.family();
    let mut out = Collector::new(Axiom::OddsIndependence);
    for outer in 0..family.len() {
        let a_set = family.get(outer).as_set();
        for a in a_set.iter() {
            for b in a_set.iter().filter(|&b| b != a) {
                let pair = AltSet::pair(a, b);
                let Some(pair_idx) = family.index_of(pair) else {
                    continue;
                };
                out.pairs_checked += 1;
                let rhs = ExtendedRatio::of(
                    rule.prob_at(outer, a).expect("member"),
                    rule.prob_at(outer, b).expect("member"),
                    mode,
                );
                if rhs.is_indeterminate() {
                    continue;
                }
                let lhs = ExtendedRatio::of(
                    rule.prob_at(pair_idx, a).expect("member"),
                    rule.prob_at(pair_idx, b).expect("member"),
                    mode,
                );
                if !lhs.approx_eq(&rhs, mode) {
                    out.violation(
                        a_set,
                        Some(pair),
                        None,
                        vec![a, b],
                        Quantity::Ratio(lhs),
                        Quantity::Ratio(rhs),
                    );
                }
            }
        }
    }
    out.finish(family.completeness())
}

/// `p(b, B) p(a, A) = p(a, B) p(b, A)` for all `B ⊆ A` and `a, b ∈ B`.
pub fn check_product_rule(rule: &RandomChoiceRule) -> AxiomReport {
    let mode = rule.mode();
    let family = rule.family();
    let mut out = Collector::new(Axiom::ProductRule);
    for (inner, outer) in family.nested_pairs() {
        out.pairs_checked += 1;
        let (b_set, a_set) = (family.get(inner).as_set(), family.get(outer).as_set());
        for a in b_set.iter() {
            for b in b_set.iter().filter(|&b| b != a) {
                let p = |set: usize, x: usize| rule.prob_at(set, x).expect("member");
                let lhs = p(inner, b) * p(outer, a);
                let rhs = p(inner, a) * p(outer, b);
                if !mode.approx_eq(&lhs, &rhs) {
                    out.violation(
                        a_set,
                        Some(b_set),
                        None,
                        vec![a, b],
                        Quantity::Prob(lhs),
                        Quantity::Prob(rhs),
                    );
                }
            }
        }
    }
    out.finish(family.completeness())
}

/// `p_A(C) = p_B(C) p_A(B)` for all `C ⊆ B ⊆ A`, with `C` any nonempty
/// subset of `B` (present in the family or not).
pub fn check_set_choice_axiom(rule: &RandomChoiceRule) -> AxiomReport {
    let mode = rule.mode();
    let family = rule.family();
    let masses = SubsetMasses::new(rule);
    let mut out = Collector::new(Axiom::SetChoiceAxiom);
    for (inner, outer) in family.nested_pairs() {
        out.pairs_checked += 1;
        let (b_set, a_set) = (family.get(inner).as_set(), family.get(outer).as_set());
        let p_b_in_a = masses.mass(rule, outer, b_set);
        let mut events: Vec<AltSet> = b_set.subsets().filter(|c| !c.is_empty()).collect();
        events.sort();
        for c in events {
            let lhs = masses.mass(rule, outer, c);
            let rhs = &masses.mass(rule, inner, c) * &p_b_in_a;
            if !mode.approx_eq(&lhs, &rhs) {
                out.violation(
                    a_set,
                    Some(b_set),
                    Some(c),
                    Vec::new(),
                    Quantity::Prob(lhs),
                    Quantity::Prob(rhs),
                );
            }
        }
    }
    out.finish(family.completeness())
}

/// `p(Y ∩ B, A) = p(Y, B) p(B, A)` for all `B ⊆ A` and every `Y ⊆ X`.
///
/// `Y` ranges over all `2^|X|` subsets of the universe, so universes larger
/// than [`MAX_ALL_SUBSETS`] are refused.
pub fn check_set_intersection_rule(rule: &RandomChoiceRule) -> Result<AxiomReport> {
    let n = rule.universe().len();
    if n > MAX_ALL_SUBSETS {
        return Err(Error::SizeLimit {
            what: "the set-intersection check",
            size: n,
            max: MAX_ALL_SUBSETS,
        });
    }
    let mode = rule.mode();
    let family = rule.family();
    let masses = SubsetMasses::new(rule);
    let mut events: Vec<AltSet> = AltSet::full(n).subsets().collect();
    events.sort();
    let mut out = Collector::new(Axiom::SetIntersectionRule);
    for (inner, outer) in family.nested_pairs() {
        out.pairs_checked += 1;
        let (b_set, a_set) = (family.get(inner).as_set(), family.get(outer).as_set());
        let p_b_in_a = masses.mass(rule, outer, b_set);
        for &y in &events {
            let lhs = masses.mass(rule, outer, y.intersection(b_set));
            let rhs = &masses.mass(rule, inner, y) * &p_b_in_a;
            if !mode.approx_eq(&lhs, &rhs) {
                out.violation(
                    a_set,
                    Some(b_set),
                    Some(y),
                    Vec::new(),
                    Quantity::Prob(lhs),
                    Quantity::Prob(rhs),
                );
            }
        }
    }
    Ok(out.finish(family.completeness()))
}

/// `p(a, {a, b}) > 0` for every pair in the family.
pub fn check_positivity(rule: &RandomChoiceRule) -> AxiomReport {
    let mode = rule.mode();
    let family = rule.family();
    let mut out = Collector::new(Axiom::Positivity);
    for idx in 0..family.len() {
        let pair = family.get(idx).as_set();
        if pair.len() != 2 {
            continue;
        }
        out.pairs_checked += 1;
        for a in pair.iter() {
            let p = rule.prob_at(idx, a).expect("member");
            if !mode.is_positive(p) {
                out.violation(
                    pair,
                    None,
                    None,
                    vec![a],
                    Quantity::Prob(p.clone()),
                    Quantity::Prob(Prob::zero(mode)),
                );
            }
        }
    }
    out.finish(family.completeness())
}

/// `supp p_A = A` for every set in the family.
pub fn check_full_support(rule: &RandomChoiceRule) -> AxiomReport {
    let family = rule.family();
    let mut out = Collector::new(Axiom::FullSupport);
    for idx in 0..family.len() {
        out.pairs_checked += 1;
        let set = family.get(idx).as_set();
        let support = rule.support_at(idx).as_set();
        if support != set {
            out.violation(
                set,
                None,
                None,
                set.difference(support).iter().collect(),
                Quantity::Set(support),
                Quantity::Set(set),
            );
        }
    }
    out.finish(family.completeness())
}

/// Arrow's WARP: `Γ(B) = Γ(A) ∩ B` whenever `B ⊆ A` and `Γ(A) ∩ B ≠ ∅`.
pub fn check_warp(corr: &ChoiceCorrespondence) -> AxiomReport {
    let family = corr.family();
    let mut out = Collector::new(Axiom::Warp);
    for (inner, outer) in family.nested_pairs() {
        let (b_set, a_set) = (family.get(inner).as_set(), family.get(outer).as_set());
        let gamma_a = corr.value_at(outer).as_set();
        let restricted = gamma_a.intersection(b_set);
        if restricted.is_empty() {
            continue;
        }
        out.pairs_checked += 1;
        let gamma_b = corr.value_at(inner).as_set();
        if gamma_b != restricted {
            out.violation(
                a_set,
                Some(b_set),
                Some(gamma_a),
                Vec::new(),
                Quantity::Set(restricted),
                Quantity::Set(gamma_b),
            );
        }
    }
    out.finish(family.completeness())
}

/// Rényi conditioning: `p_B(a) = p_A(a) / p_A(B)` for `B ⊆ A` and
/// `a ∈ B ∩ supp p_A`.
pub fn check_renyi_conditioning(rule: &RandomChoiceRule) -> AxiomReport {
    let mode = rule.mode();
    let family = rule.family();
    let mut out = Collector::new(Axiom::RenyiConditioning);
    for (inner, outer) in family.nested_pairs() {
        out.pairs_checked += 1;
        let (b_set, a_set) = (family.get(inner).as_set(), family.get(outer).as_set());
        let p_b_in_a = rule.mass_at(outer, b_set);
        for a in b_set.iter() {
            let p_a_outer = rule.prob_at(outer, a).expect("member");
            if !mode.is_positive(p_a_outer) {
                continue;
            }
            let lhs = rule.prob_at(inner, a).expect("member");
            let rhs = p_a_outer / &p_b_in_a;
            if !mode.approx_eq(lhs, &rhs) {
                out.violation(
                    a_set,
                    Some(b_set),
                    None,
                    vec![a],
                    Quantity::Prob(lhs.clone()),
                    Quantity::Prob(rhs),
                );
            }
        }
    }
    out.finish(family.completeness())
}

/// Runs one checker; WARP is evaluated on the support correspondence.
pub fn check(rule: &RandomChoiceRule, axiom: Axiom) -> Result<AxiomReport> {
    Ok(match axiom {
        Axiom::ChoiceAxiom => check_choice_axiom(rule),
        Axiom::OddsIndependence => check_odds_independence(rule),
        Axiom::ProductRule => check_product_rule(rule),
        Axiom::SetChoiceAxiom => check_set_choice_axiom(rule),
        Axiom::SetIntersectionRule => check_set_intersection_rule(rule)?,
        Axiom::Positivity => check_positivity(rule),
        Axiom::FullSupport => check_full_support(rule),
        Axiom::Warp => check_warp(&rule.support_correspondence()),
        Axiom::RenyiConditioning => check_renyi_conditioning(rule),
    })
}

/// Every checker, keyed by axiom.
pub fn check_all(rule: &RandomChoiceRule) -> Result<BTreeMap<Axiom, AxiomReport>> {
    Axiom::ALL
        .into_iter()
        .map(|axiom| Ok((axiom, check(rule, axiom)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{abc, cyclic_rule, failing_rule, luce_123, running_example};
    use crate::order::WeakOrder;
    use crate::prob::Mode;
    use crate::universe::{ChoiceFamily, ChoiceSet};

    fn verdicts(rule: &RandomChoiceRule) -> BTreeMap<Axiom, Verdict> {
        check_all(rule)
            .unwrap()
            .into_iter()
            .map(|(k, r)| (k, r.verdict))
            .collect()
    }

    fn assert_witnesses_replay(rule: &RandomChoiceRule) {
        for report in check_all(rule).unwrap().values() {
            assert_eq!(
                report.verdict == Verdict::Fails,
                !report.witnesses.is_empty()
            );
            for w in &report.witnesses {
                assert!(w.replay_on_rule(rule), "{}", w.describe(rule.universe()));
            }
        }
    }

    #[test]
    fn running_example_satisfies_the_equivalent_forms() {
        let rule = running_example();
        let v = verdicts(&rule);
        for axiom in Axiom::EQUIVALENT_FORMS {
            assert_eq!(v[&axiom], Verdict::Holds, "{axiom}");
        }
        assert_eq!(v[&Axiom::Warp], Verdict::Holds);
        assert_eq!(v[&Axiom::RenyiConditioning], Verdict::Holds);
        assert_eq!(v[&Axiom::Positivity], Verdict::Fails);
        assert_eq!(v[&Axiom::FullSupport], Verdict::Fails);
    }

    #[test]
    fn failing_rule_witnesses() {
        let rule = failing_rule();
        let u = rule.universe().clone();
        let ab = *u.choice_set(&["a", "b"]).unwrap();
        let abc_set = *u.full();

        let ca = check_choice_axiom(&rule);
        assert_eq!(ca.verdict, Verdict::Fails);
        let w = &ca.witnesses[0];
        assert_eq!(
            (w.outer, w.inner, w.alternatives.clone()),
            (abc_set, Some(ab), vec![0])
        );
        assert_eq!(w.lhs, Quantity::Prob(Prob::ratio(1, 2)));
        assert_eq!(w.rhs, Quantity::Prob(Prob::ratio(2, 5)));

        let oi = check_odds_independence(&rule);
        assert_eq!(oi.verdict, Verdict::Fails);
        let w = &oi.witnesses[0];
        assert_eq!(w.alternatives, vec![0, 1]);
        assert_eq!(
            w.lhs,
            Quantity::Ratio(ExtendedRatio::Finite(Prob::ratio(1, 1)))
        );
        assert_eq!(
            w.rhs,
            Quantity::Ratio(ExtendedRatio::Finite(Prob::ratio(5, 3)))
        );

        let pr = check_product_rule(&rule);
        let w = &pr.witnesses[0];
        assert_eq!(
            (w.outer, w.inner, w.alternatives.clone()),
            (abc_set, Some(ab), vec![0, 1])
        );
        assert_eq!(w.lhs, Quantity::Prob(Prob::ratio(1, 4)));
        assert_eq!(w.rhs, Quantity::Prob(Prob::ratio(3, 20)));

        let sc = check_set_choice_axiom(&rule);
        assert_eq!(sc.verdict, Verdict::Fails);
        assert!(sc
            .witnesses
            .iter()
            .any(|w| w.event == Some(AltSet::singleton(0))
                && w.inner == Some(ab)
                && w.outer == abc_set));

        for axiom in Axiom::EQUIVALENT_FORMS {
            assert_eq!(verdicts(&rule)[&axiom], Verdict::Fails, "{axiom}");
        }
        assert_witnesses_replay(&rule);
    }

    #[test]
    fn luce_rule_satisfies_everything() {
        let rule = luce_123();
        for (axiom, verdict) in verdicts(&rule) {
            assert_eq!(verdict, Verdict::Holds, "{axiom}");
        }
    }

    #[test]
    fn singleton_family_holds_vacuously() {
        let u = abc();
        let rule = RandomChoiceRule::from_entries(
            u,
            Mode::Exact,
            (0..3).map(|i| (ChoiceSet::singleton(i), vec![Prob::ratio(1, 1)])),
        )
        .unwrap();
        let reports = check_all(&rule).unwrap();
        for report in reports.values() {
            assert!(report.holds());
            assert_eq!(report.completeness, Completeness::Partial);
        }
        assert_eq!(reports[&Axiom::ChoiceAxiom].pairs_checked, 3);
        assert_eq!(reports[&Axiom::Positivity].pairs_checked, 0);
    }

    #[test]
    fn odds_independence_skips_indeterminate_menus() {
        // p(b, A) = p(c, A) = 0 on A = {a,b,c}; the (b, c, A) triples are 0/0.
        let u = abc();
        let one = || Prob::ratio(1, 1);
        let half = || Prob::ratio(1, 2);
        let zero = || Prob::ratio(0, 1);
        let rule = RandomChoiceRule::from_entries(
            u.clone(),
            Mode::Exact,
            [
                (u.choice_set(&["a", "b"]).unwrap(), vec![one(), zero()]),
                (u.choice_set(&["a", "c"]).unwrap(), vec![one(), zero()]),
                (u.choice_set(&["b", "c"]).unwrap(), vec![half(), half()]),
                (u.full(), vec![one(), zero(), zero()]),
            ],
        )
        .unwrap();
        let report = check_odds_independence(&rule);
        assert!(report.holds());
    }

    #[test]
    fn set_intersection_edge_cases() {
        let rule = running_example();
        let report = check_set_intersection_rule(&rule).unwrap();
        assert!(report.holds());
        // Disjoint Y and Y = X are among the enumerated events.
        let masses_b = rule.mass(AltSet::empty(), AltSet::pair(0, 1)).unwrap();
        assert!(masses_b.is_exactly_zero());
        let big = Universe::alphabetic(17).unwrap();
        let big_rule = RandomChoiceRule::from_entries(
            big,
            Mode::Exact,
            [(ChoiceSet::singleton(0), vec![Prob::ratio(1, 1)])],
        )
        .unwrap();
        assert!(matches!(
            check_set_intersection_rule(&big_rule),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn positivity_witness_on_dominated_alternative() {
        let rule = running_example();
        let report = check_positivity(&rule);
        let w = &report.witnesses[0];
        assert_eq!(w.outer, AltSet::pair(0, 2));
        assert_eq!(w.alternatives, vec![2]);
        assert_eq!(w.lhs, Quantity::Prob(Prob::ratio(0, 1)));
        let single = RandomChoiceRule::from_entries(
            Universe::new(["z"]).unwrap(),
            Mode::Exact,
            [(ChoiceSet::singleton(0), vec![Prob::ratio(1, 1)])],
        )
        .unwrap();
        assert!(check_positivity(&single).holds());
        assert!(check_full_support(&single).holds());
    }

    #[test]
    fn warp_examples() {
        let u = abc();
        let fam = ChoiceFamily::all_subsets(3).unwrap();
        let identity = ChoiceCorrespondence::identity(u.clone(), fam.clone());
        assert!(check_warp(&identity).holds());

        let broken = identity
            .with_value(AltSet::pair(0, 1), ChoiceSet::singleton(0))
            .unwrap()
            .with_value(*u.full(), ChoiceSet::singleton(1))
            .unwrap();
        let report = check_warp(&broken);
        assert_eq!(report.verdict, Verdict::Fails);
        let w = report
            .witnesses
            .iter()
            .find(|w| w.inner == Some(AltSet::pair(0, 1)))
            .unwrap();
        assert_eq!(w.outer, *u.full());
        assert_eq!(w.lhs, Quantity::Set(AltSet::singleton(1)));
        assert_eq!(w.rhs, Quantity::Set(AltSet::singleton(0)));
        assert!(report
            .witnesses
            .iter()
            .all(|w| w.replay_on_correspondence(&broken)));
    }

    #[test]
    fn warp_holds_for_every_order_induced_correspondence() {
        // Exhaustive over all weak orders on up to 4 alternatives (rank vectors in 0..n).
        for n in 1..=4usize {
            let u = Universe::alphabetic(n).unwrap();
            let fam = ChoiceFamily::all_subsets(n).unwrap();
            let total = n.pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let levels: Vec<i64> = (0..n)
                    .map(|_| {
                        let r = (c % n) as i64;
                        c /= n;
                        r
                    })
                    .collect();
                let order = WeakOrder::from_ranks(u.clone(), &levels).unwrap();
                let report = check_warp(&order.correspondence(&fam).unwrap());
                assert!(report.holds(), "{levels:?}");
            }
        }
    }

    #[test]
    fn renyi_conditioning_examples() {
        assert!(check_renyi_conditioning(&running_example()).holds());
        let report = check_renyi_conditioning(&failing_rule());
        assert_eq!(report.verdict, Verdict::Fails);
        assert_witnesses_replay(&failing_rule());
    }

    #[test]
    fn cyclic_supports_fail_warp() {
        let rule = cyclic_rule();
        let report = check_warp(&rule.support_correspondence());
        assert_eq!(report.verdict, Verdict::Fails);
        assert!(!check_choice_axiom(&rule).holds());
        assert_witnesses_replay(&rule);
    }

    #[test]
    fn witness_cap_is_enforced() {
        // Every pair is (1, 0) but the 6-set is uniform: many violations.
        let n = 6;
        let u = Universe::alphabetic(n).unwrap();
        let fam = ChoiceFamily::all_subsets(n).unwrap();
        let table = fam
            .sets()
            .iter()
            .map(|s| {
                if s.len() == n {
                    vec![Prob::ratio(1, n as i64); n]
                } else {
                    let mut d = vec![Prob::ratio(0, 1); s.len()];
                    d[0] = Prob::ratio(1, 1);
                    d
                }
            })
            .collect();
        let rule = RandomChoiceRule::new(u, fam, Mode::Exact, table).unwrap();
        let report = check_set_intersection_rule(&rule).unwrap();
        assert_eq!(report.witnesses.len(), WITNESS_CAP);
        assert!(report.violations > WITNESS_CAP);
        let mut sorted = report.witnesses.clone();
        sorted.sort_by_key(|x| (x.outer, x.inner));
        assert_eq!(
            sorted
                .iter()
                .map(|w| (w.outer, w.inner))
                .collect::<Vec<_>>(),
            report
                .witnesses
                .iter()
                .map(|w| (w.outer, w.inner))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn float_mode_uses_relative_tolerance() {
        let rule = luce_123().to_float(1e-9);
        assert!(check_choice_axiom(&rule).holds());
        let v = verdicts(&rule);
        assert!(v.values().all(|&x| x == Verdict::Holds));
    }
}
