//! Random instances for property tests and benchmarks.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::Result;
use crate::order::WeakOrder;
use crate::prob::{Mode, Prob};
use crate::rule::RandomChoiceRule;
use crate::synthesize::{general_luce_rule, LuceWeights};
use crate::universe::{ChoiceFamily, Universe};

/// Levels drawn uniformly from `0..n`, so every weak order shape can occur.
pub fn random_weak_order<R: Rng + ?Sized>(universe: &Universe, rng: &mut R) -> WeakOrder {
    let n = universe.len();
    let levels: Vec<i64> = (0..n).map(|_| rng.random_range(0..n as i64)).collect();
    WeakOrder::from_ranks(universe.clone(), &levels).expect("one level per alternative")
}

/// Weights `p/q` with `p, q` in `1..=9`.
pub fn random_exact_weights<R: Rng + ?Sized>(universe: &Universe, rng: &mut R) -> LuceWeights {
    let v = (0..universe.len())
        .map(|_| {
            BigRational::new(
                BigInt::from(rng.random_range(1..=9)),
                BigInt::from(rng.random_range(1..=9)),
            )
        })
        .collect();
    LuceWeights::exact(universe.clone(), v).expect("positive")
}

/// Log-weights uniform on `[-spread, spread]`.
pub fn random_alpha<R: Rng + ?Sized>(universe: &Universe, spread: f64, rng: &mut R) -> LuceWeights {
    let alpha = (0..universe.len())
        .map(|_| rng.random_range(-spread..=spread))
        .collect();
    LuceWeights::from_alpha(universe.clone(), alpha).expect("finite")
}

/// A general Luce rule on all subsets from a random order and exact weights.
#[derive(Clone, Debug)]
pub struct Instance {
    pub order: WeakOrder,
    pub weights: LuceWeights,
    pub rule: RandomChoiceRule,
}

pub fn random_luce_instance<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Result<Instance> {
    let universe = Universe::alphabetic(size)?;
    let family = ChoiceFamily::all_subsets(size)?;
    let order = random_weak_order(&universe, rng);
    let weights = random_exact_weights(&universe, rng);
    let rule = general_luce_rule(&order.correspondence(&family)?, &weights)?;
    Ok(Instance {
        order,
        weights,
        rule,
    })
}

/// Moves a fraction `1/k` (`k` in `2..=5`) of one member's mass to another
/// member of a random set with at least two members. Exact rules stay exact.
pub fn perturb<R: Rng + ?Sized>(rule: &RandomChoiceRule, rng: &mut R) -> RandomChoiceRule {
    let family = rule.family();
    let candidates: Vec<usize> = (0..family.len())
        .filter(|&i| family.get(i).len() >= 2)
        .collect();
    let Some(&target) = candidates.choose(rng) else {
        return rule.clone();
    };
    let mut dist = rule.distribution(target).to_vec();
    let mode = rule.mode();
    let donors: Vec<usize> = (0..dist.len())
        .filter(|&i| mode.is_positive(&dist[i]))
        .collect();
    let donor = *donors.choose(rng).expect("distributions have support");
    let receivers: Vec<usize> = (0..dist.len()).filter(|&i| i != donor).collect();
    let receiver = *receivers.choose(rng).expect("at least two members");
    let k = rng.random_range(2..=5);
    let delta = match &dist[donor] {
        Prob::Exact(p) => Prob::Exact(p / BigRational::from_integer(BigInt::from(k))),
        Prob::Float(p) => Prob::Float(p / k as f64),
    };
    dist[donor] = &dist[donor] - &delta;
    dist[receiver] = &dist[receiver] + &delta;

    let table = (0..family.len())
        .map(|i| {
            if i == target {
                dist.clone()
            } else {
                rule.distribution(i).to_vec()
            }
        })
        .collect();
    RandomChoiceRule::new(rule.universe().clone(), family.clone(), mode, table)
        .expect("mass moved within a distribution")
}

/// Shifts one entry of one set by `magnitude` and renormalizes that set.
/// Float mode only; used for detection-sensitivity tests.
pub fn perturb_entry<R: Rng + ?Sized>(
    rule: &RandomChoiceRule,
    magnitude: f64,
    rng: &mut R,
) -> RandomChoiceRule {
    let family = rule.family();
    let candidates: Vec<usize> = (0..family.len())
        .filter(|&i| family.get(i).len() >= 2)
        .collect();
    let target = *candidates.choose(rng).expect("a set with two members");
    let mut dist: Vec<f64> = rule.distribution(target).iter().map(Prob::to_f64).collect();
    let pos = rng.random_range(0..dist.len());
    dist[pos] += magnitude;
    let total: f64 = dist.iter().sum();
    let table = (0..family.len())
        .map(|i| {
            if i == target {
                dist.iter().map(|p| Prob::Float(p / total)).collect()
            } else {
                rule.distribution(i).iter().map(Prob::to_float).collect()
            }
        })
        .collect();
    RandomChoiceRule::new(
        rule.universe().clone(),
        family.clone(),
        Mode::float(),
        table,
    )
    .expect("renormalized")
}
