//! Recovering `(Γ, α)` from a rule that satisfies the Choice Axiom.

use crate::axioms::{check_choice_axiom, check_warp};
use crate::correspondence::ChoiceCorrespondence;
use crate::error::{Error, Result};
use crate::order::WeakOrder;
use crate::prob::{ExtendedRatio, Mode, Prob};
use crate::rule::RandomChoiceRule;
use crate::synthesize::{general_luce_rule, ln_rational, LuceWeights};
use crate::universe::{AltSet, ChoiceSet};

#[derive(Clone, Debug, PartialEq)]
pub struct IndifferenceClass {
    pub members: AltSet,
    /// Smallest member; its weight is pinned to 1.
    pub representative: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LuceDecomposition {
    pub gamma: ChoiceCorrespondence,
    pub order: WeakOrder,
    /// Best class first.
    pub classes: Vec<IndifferenceClass>,
    /// Weights relative to the class representative.
    pub v: Vec<Prob>,
    /// `ln v`.
    pub alpha: Vec<f64>,
}

impl LuceDecomposition {
    /// Weights usable for resynthesis: exact when `v` is exact.
    pub fn weights(&self) -> Result<LuceWeights> {
        let universe = self.gamma.universe().clone();
        let exact: Option<Vec<_>> = self.v.iter().map(|p| p.as_exact().cloned()).collect();
        match exact {
            Some(v) => LuceWeights::exact(universe, v),
            None => LuceWeights::from_alpha(universe, self.alpha.clone()),
        }
    }

    pub fn class_of(&self, a: usize) -> &IndifferenceClass {
        &self.classes[self.order.rank(a)]
    }
}

/// The revealed weak order: `b ≿ a` iff `p(b, {a, b}) > 0`.
pub fn revealed_order(rule: &RandomChoiceRule) -> Result<WeakOrder> {
    let family = rule.family();
    if let Some((a, b)) = family.missing_pair() {
        return Err(Error::MissingPairs(vec![a, b]));
    }
    let warp = check_warp(&rule.support_correspondence());
    if let Some(w) = warp.witnesses.into_iter().next() {
        return Err(Error::NotRational(Some(Box::new(w))));
    }

    let n = rule.universe().len();
    let mode = rule.mode();
    let weakly_better = |b: usize, a: usize| -> bool {
        b == a || {
            let p = rule.prob(b, AltSet::pair(a, b)).expect("all pairs present");
            mode.is_positive(p)
        }
    };
    // Rank by the number of strictly better alternatives, then confirm that
    // the induced order reproduces every pairwise comparison.
    let levels: Vec<i64> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| weakly_better(b, a) && !weakly_better(a, b))
                .count() as i64
        })
        .collect();
    let order = WeakOrder::from_ranks(rule.universe().clone(), &levels)?;
    for a in 0..n {
        for b in 0..n {
            if weakly_better(b, a) != (order.rank(b) <= order.rank(a)) {
                return Err(Error::NotRational(None));
            }
        }
    }
    Ok(order)
}

/// `v(x) = r(x, a_i)` for `x` in the class with representative `a_i`.
pub fn recover_v(rule: &RandomChoiceRule, order: &WeakOrder) -> Result<Vec<Prob>> {
    let mode = rule.mode();
    let mut v = vec![Prob::one(mode); rule.universe().len()];
    for class in order.classes() {
        let rep = class.first().expect("classes are nonempty");
        for x in class.iter().filter(|&x| x != rep) {
            match rule.binary_odds(x, rep)? {
                ExtendedRatio::Finite(r) if mode.is_positive(&r) => v[x] = r,
                _ => return Err(Error::DegenerateOdds(x, rep)),
            }
        }
    }
    Ok(v)
}

fn ln_prob(p: &Prob) -> f64 {
    match p {
        Prob::Exact(r) => ln_rational(r),
        Prob::Float(x) => x.ln(),
    }
}

/// Splits a Choice-Axiom rule into its support correspondence and weights,
/// then verifies that resynthesis reproduces the rule on its family.
pub fn decompose(rule: &RandomChoiceRule) -> Result<LuceDecomposition> {
    let order = revealed_order(rule)?;
    let ca = check_choice_axiom(rule);
    if let Some(w) = ca.witnesses.into_iter().next() {
        return Err(Error::ChoiceAxiomFails(Box::new(w)));
    }
    let gamma = rule.support_correspondence();
    let family = rule.family();
    for (i, &set) in family.sets().iter().enumerate() {
        if gamma.value_at(i) != order.maximizers(set) {
            return Err(Error::ReconstructionMismatch);
        }
    }
    let v = recover_v(rule, &order)?;
    let alpha = v.iter().map(ln_prob).collect();
    let classes = order
        .classes()
        .into_iter()
        .map(|members| IndifferenceClass {
            members,
            representative: members.first().expect("nonempty"),
        })
        .collect();
    let decomposition = LuceDecomposition {
        gamma,
        order,
        classes,
        v,
        alpha,
    };
    let rebuilt = resynthesize(&decomposition, rule.mode())?;
    let same = match rule.mode() {
        Mode::Exact => rebuilt == *rule,
        Mode::Float { .. } => rule.approx_eq(&rebuilt),
    };
    if !same {
        return Err(Error::ReconstructionMismatch);
    }
    Ok(decomposition)
}

/// Rebuilds the general Luce rule from a decomposition.
pub fn resynthesize(decomposition: &LuceDecomposition, mode: Mode) -> Result<RandomChoiceRule> {
    let rule = general_luce_rule(&decomposition.gamma, &decomposition.weights()?)?;
    Ok(match mode {
        Mode::Exact => rule,
        Mode::Float { epsilon } => rule.to_float(epsilon),
    })
}

/// Checks a candidate `(Γ', v')` against a rule; used to exercise uniqueness.
pub fn reconstructs(
    rule: &RandomChoiceRule,
    gamma: &ChoiceCorrespondence,
    weights: &LuceWeights,
) -> bool {
    match general_luce_rule(gamma, weights) {
        Ok(candidate) => match rule.mode() {
            Mode::Exact => candidate == *rule,
            Mode::Float { .. } => rule.approx_eq(&candidate),
        },
        Err(_) => false,
    }
}

/// Members of `Γ(A)` all share one indifference class.
pub fn support_within_one_class(decomposition: &LuceDecomposition, set: ChoiceSet) -> Result<bool> {
    let support = decomposition.gamma.get(*set)?;
    let rank = decomposition.order.rank(support.first().expect("nonempty"));
    Ok(support.iter().all(|a| decomposition.order.rank(a) == rank))
}
