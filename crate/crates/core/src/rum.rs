//! Random preference models and the empirical choice rules they induce.

use std::fmt;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gumbel};

use crate::error::{Error, Result};
use crate::order::WeakOrder;
use crate::prob::{Mode, Prob, DEFAULT_EPSILON};
use crate::rule::RandomChoiceRule;
use crate::synthesize::{LuceWeights, UtilitySpec};
use crate::universe::{AltSet, ChoiceFamily, Universe};

/// A strict ranking of the whole universe, best first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl Ranking {
    pub fn new(best_first: Vec<usize>) -> Result<Self> {
        let n = best_first.len();
        let mut position = vec![usize::MAX; n];
        for (pos, &a) in best_first.iter().enumerate() {
            if a >= n || position[a] != usize::MAX {
                return Err(Error::InvalidOrder);
            }
            position[a] = pos;
        }
        Ok(Self {
            order: best_first,
            position,
        })
    }

    /// Descending by score; exact ties go to the smaller index.
    pub fn by_scores(scores: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        Self::new(order).expect("permutation")
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, a: usize) -> usize {
        self.position[a]
    }

    /// Best-ranked member of a nonempty set.
    pub fn top_of(&self, set: AltSet) -> usize {
        set.iter()
            .min_by_key(|&a| self.position[a])
            .expect("nonempty set")
    }

    pub fn to_weak_order(&self, universe: Universe) -> Result<WeakOrder> {
        WeakOrder::chain(universe, &self.order)
    }
}

/// One draw of a random preference.
pub trait PreferenceModel: Send + Sync + fmt::Debug {
    fn universe(&self) -> &Universe;
    fn draw(&self, rng: &mut dyn RngCore) -> Ranking;
}

fn standard_gumbel() -> Gumbel<f64> {
    Gumbel::new(0.0, 1.0).expect("valid parameters")
}

/// Ranks by `α(x) + G_x` with independent standard Gumbel `G_x`.
#[derive(Clone, Debug)]
pub struct GumbelLuce {
    universe: Universe,
    alpha: Vec<f64>,
}

impl GumbelLuce {
    pub fn new(weights: &LuceWeights) -> Self {
        Self {
            universe: weights.universe().clone(),
            alpha: weights.alpha(),
        }
    }

    pub fn draw_scores(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let gumbel = standard_gumbel();
        self.alpha.iter().map(|a| a + gumbel.sample(rng)).collect()
    }
}

impl PreferenceModel for GumbelLuce {
    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Ranking {
        Ranking::by_scores(&self.draw_scores(rng))
    }
}

/// Ranks by `first`, breaking its ties with a draw from `base`.
#[derive(Clone, Debug)]
pub struct Lexicographic {
    first: WeakOrder,
    base: Arc<dyn PreferenceModel>,
}

impl Lexicographic {
    pub fn new(first: WeakOrder, base: Arc<dyn PreferenceModel>) -> Result<Self> {
        if first.universe() != base.universe() {
            return Err(Error::Mismatch);
        }
        Ok(Self { first, base })
    }

    pub fn first(&self) -> &WeakOrder {
        &self.first
    }

    /// The composition of `first` with a fixed base ranking.
    pub fn compose(&self, base: &Ranking) -> Ranking {
        let mut order = base.order().to_vec();
        order.sort_by_key(|&a| self.first.rank(a));
        Ranking::new(order).expect("permutation")
    }
}

impl PreferenceModel for Lexicographic {
    fn universe(&self) -> &Universe {
        self.first.universe()
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Ranking {
        let base = self.base.draw(rng);
        self.compose(&base)
    }
}

/// `U_x = u(x) + r V_x` with `V_x = (2/π) atan(α(x) + G_x)`.
#[derive(Clone, Debug)]
pub struct IndependentRum {
    universe: Universe,
    u: Vec<f64>,
    alpha: Vec<f64>,
    radius: f64,
}

impl IndependentRum {
    pub fn new(u: &UtilitySpec, weights: &LuceWeights) -> Result<Self> {
        if u.universe() != weights.universe() {
            return Err(Error::Mismatch);
        }
        Ok(Self {
            universe: u.universe().clone(),
            u: u.values().to_vec(),
            alpha: weights.alpha(),
            // A third of the smallest gap keeps utility levels apart; a
            // constant utility needs no separation.
            radius: u.min_gap().map_or(1.0, |g| g / 3.0),
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn utility(&self) -> &[f64] {
        &self.u
    }

    pub fn draw_utilities(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let gumbel = standard_gumbel();
        self.u
            .iter()
            .zip(&self.alpha)
            .map(|(u, a)| {
                let noise = std::f64::consts::FRAC_2_PI * (a + gumbel.sample(rng)).atan();
                u + self.radius * noise
            })
            .collect()
    }
}

impl PreferenceModel for IndependentRum {
    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Ranking {
        Ranking::by_scores(&self.draw_utilities(rng))
    }
}

/// Always the same ranking.
#[derive(Clone, Debug)]
pub struct FixedRanking {
    universe: Universe,
    ranking: Ranking,
}

impl FixedRanking {
    pub fn new(universe: Universe, ranking: Ranking) -> Result<Self> {
        if ranking.order().len() != universe.len() {
            return Err(Error::Mismatch);
        }
        Ok(Self { universe, ranking })
    }
}

impl PreferenceModel for FixedRanking {
    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn draw(&self, _rng: &mut dyn RngCore) -> Ranking {
        self.ranking.clone()
    }
}

/// A model paired with a master seed. Stream `k` is an independent,
/// reproducible ChaCha substream.
#[derive(Clone, Debug)]
pub struct PreferenceSampler {
    model: Arc<dyn PreferenceModel>,
    seed: u64,
}

impl PreferenceSampler {
    pub fn new(model: Arc<dyn PreferenceModel>, seed: u64) -> Self {
        Self { model, seed }
    }

    pub fn model(&self) -> &Arc<dyn PreferenceModel> {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn universe(&self) -> &Universe {
        self.model.universe()
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// The first `count` draws of a stream.
    pub fn draws(&self, stream: u64, count: usize) -> Vec<Ranking> {
        let mut rng = self.rng(stream);
        (0..count).map(|_| self.model.draw(&mut rng)).collect()
    }
}

pub fn gumbel_luce_sampler(weights: &LuceWeights, seed: u64) -> PreferenceSampler {
    PreferenceSampler::new(Arc::new(GumbelLuce::new(weights)), seed)
}

/// Composes `first` with the base model; the base sampler's seed is kept.
pub fn lex_sampler(first: &WeakOrder, base: &PreferenceSampler) -> Result<PreferenceSampler> {
    let model = Lexicographic::new(first.clone(), base.model.clone())?;
    Ok(PreferenceSampler::new(Arc::new(model), base.seed))
}

pub fn independent_rum_sampler(
    u: &UtilitySpec,
    weights: &LuceWeights,
    seed: u64,
) -> Result<PreferenceSampler> {
    Ok(PreferenceSampler::new(
        Arc::new(IndependentRum::new(u, weights)?),
        seed,
    ))
}

/// Top-choice tallies per choice set.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalRule {
    universe: Universe,
    family: ChoiceFamily,
    /// `counts[i]` is aligned with the members of `family.get(i)`.
    counts: Vec<Vec<u64>>,
    draws: u64,
}

impl EmpiricalRule {
    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn family(&self) -> &ChoiceFamily {
        &self.family
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn frequency(&self, a: usize, set: AltSet) -> Result<f64> {
        let idx = self.family.index_of(set).ok_or(Error::UnknownChoiceSet)?;
        let pos = set.position(a).ok_or(Error::NotAMember)?;
        Ok(self.counts[idx][pos] as f64 / self.draws as f64)
    }

    pub fn to_rule(&self) -> RandomChoiceRule {
        self.to_rule_with_epsilon(DEFAULT_EPSILON)
    }

    pub fn to_rule_with_epsilon(&self, epsilon: f64) -> RandomChoiceRule {
        let n = self.draws as f64;
        let table = self
            .counts
            .iter()
            .map(|c| c.iter().map(|&k| Prob::Float(k as f64 / n)).collect())
            .collect();
        RandomChoiceRule::new(
            self.universe.clone(),
            self.family.clone(),
            Mode::Float { epsilon },
            table,
        )
        .expect("frequencies form distributions")
    }
}

/// Tallies the top member of each set over `draws` independent draws; set
/// `i` uses stream `i`.
pub fn empirical_rule(
    sampler: &PreferenceSampler,
    family: &ChoiceFamily,
    draws: u64,
) -> Result<EmpiricalRule> {
    if draws == 0 {
        return Err(Error::EmptyObservation);
    }
    if family.universe_size() != sampler.universe().len() {
        return Err(Error::Mismatch);
    }
    let counts = family
        .sets()
        .iter()
        .enumerate()
        .map(|(i, set)| {
            let mut rng = sampler.rng(i as u64);
            let mut tally = vec![0u64; set.len()];
            for _ in 0..draws {
                let top = sampler.model.draw(&mut rng).top_of(set.as_set());
                tally[set.position(top).expect("member")] += 1;
            }
            tally
        })
        .collect();
    Ok(EmpiricalRule {
        universe: sampler.universe().clone(),
        family: family.clone(),
        counts,
        draws,
    })
}
