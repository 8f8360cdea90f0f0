//! Rule constructors: Luce, general Luce on a rational correspondence, and the
//! noise-smoothed logit whose small-noise limit is the general Luce rule.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::axioms::check_warp;
use crate::correspondence::ChoiceCorrespondence;
use crate::error::{Error, Result};
use crate::prob::{Mode, Prob};
use crate::rule::RandomChoiceRule;
use crate::universe::{AltSet, ChoiceFamily, ChoiceSet, Universe};

/// Tie-breaking weights: exact positive `v`, or log-weights `α` with `v = e^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct LuceWeights {
    universe: Universe,
    values: WeightValues,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightValues {
    Exact(Vec<BigRational>),
    Log(Vec<f64>),
}

impl LuceWeights {
    pub fn exact(universe: Universe, v: Vec<BigRational>) -> Result<Self> {
        if v.len() != universe.len() {
            return Err(Error::InvalidWeights(format!(
                "expected {} weights, got {}",
                universe.len(),
                v.len()
            )));
        }
        if let Some(bad) = v.iter().find(|x| !x.is_positive()) {
            return Err(Error::InvalidWeights(format!(
                "weight {bad} is not positive"
            )));
        }
        Ok(Self {
            universe,
            values: WeightValues::Exact(v),
        })
    }

    pub fn from_alpha(universe: Universe, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != universe.len() {
            return Err(Error::InvalidWeights(format!(
                "expected {} weights, got {}",
                universe.len(),
                alpha.len()
            )));
        }
        if let Some(bad) = alpha.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidWeights(format!("alpha {bad} is not finite")));
        }
        Ok(Self {
            universe,
            values: WeightValues::Log(alpha),
        })
    }

    /// All weights equal.
    pub fn uniform(universe: Universe) -> Self {
        let n = universe.len();
        Self {
            universe,
            values: WeightValues::Log(vec![0.0; n]),
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn values(&self) -> &WeightValues {
        &self.values
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, WeightValues::Exact(_))
    }

    /// `α = ln v`.
    pub fn alpha(&self) -> Vec<f64> {
        match &self.values {
            WeightValues::Exact(v) => v.iter().map(ln_rational).collect(),
            WeightValues::Log(alpha) => alpha.clone(),
        }
    }

    /// Adds `shift` to every `α`; exact weights are scaled by `e^shift` only
    /// when the result stays representable, so this returns log weights.
    pub fn shifted(&self, shift: f64) -> LuceWeights {
        LuceWeights {
            universe: self.universe.clone(),
            values: WeightValues::Log(self.alpha().into_iter().map(|a| a + shift).collect()),
        }
    }

    /// Multiplies exact weights by a positive rational (an exact shift of `α`).
    pub fn scaled(&self, factor: &BigRational) -> Result<LuceWeights> {
        match &self.values {
            WeightValues::Exact(v) => LuceWeights::exact(
                self.universe.clone(),
                v.iter().map(|x| x * factor).collect(),
            ),
            WeightValues::Log(_) => {
                let shift = ln_rational(factor);
                Ok(self.shifted(shift))
            }
        }
    }

    /// `v(a) / Σ_{b ∈ support} v(b)` for every member of `support`.
    fn distribution_on(&self, set: ChoiceSet, support: AltSet) -> Vec<Prob> {
        match &self.values {
            WeightValues::Exact(v) => {
                let total: BigRational = support.iter().map(|b| &v[b]).sum();
                set.iter()
                    .map(|a| {
                        if support.contains(a) {
                            Prob::Exact(&v[a] / &total)
                        } else {
                            Prob::Exact(BigRational::zero())
                        }
                    })
                    .collect()
            }
            WeightValues::Log(alpha) => {
                let scores: Vec<f64> = set
                    .iter()
                    .map(|a| {
                        if support.contains(a) {
                            alpha[a]
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect();
                softmax(&scores).into_iter().map(Prob::Float).collect()
            }
        }
    }
}

pub(crate) fn ln_rational(x: &BigRational) -> f64 {
    // ln(n/d) = ln n - ln d stays finite for large numerators and denominators.
    let ln_int = |n: &num_bigint::BigInt| {
        let bits = n.bits();
        if bits < 1000 {
            n.to_f64().expect("finite").ln()
        } else {
            let shift = bits - 900;
            (n >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
        }
    };
    ln_int(x.numer()) - ln_int(x.denom())
}

/// Numerically stable softmax; `-inf` scores receive exactly zero mass.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Systematic utility `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilitySpec {
    universe: Universe,
    values: Vec<f64>,
}

impl UtilitySpec {
    pub fn new(universe: Universe, values: Vec<f64>) -> Result<Self> {
        if values.len() != universe.len() || values.iter().any(|u| !u.is_finite()) {
            return Err(Error::InvalidUtility);
        }
        Ok(Self { universe, values })
    }

    pub fn constant(universe: Universe) -> Self {
        let n = universe.len();
        Self {
            universe,
            values: vec![0.0; n],
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn argmax(&self, set: ChoiceSet) -> ChoiceSet {
        let best = set
            .iter()
            .map(|a| self.values[a])
            .fold(f64::NEG_INFINITY, f64::max);
        ChoiceSet::new(set.iter().filter(|&a| self.values[a] == best).collect()).expect("nonempty")
    }

    /// `Γ(A) = argmax_A u` on `family`.
    pub fn correspondence(&self, family: &ChoiceFamily) -> Result<ChoiceCorrespondence> {
        if family.universe_size() != self.universe.len() {
            return Err(Error::Mismatch);
        }
        let values = family.sets().iter().map(|&s| self.argmax(s)).collect();
        ChoiceCorrespondence::new(self.universe.clone(), family.clone(), values)
    }

    /// Smallest gap between two distinct utility values, if any.
    pub fn min_gap(&self) -> Option<f64> {
        let mut levels = self.values.clone();
        levels.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        levels.dedup();
        levels.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseLevel(f64);

impl NoiseLevel {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda.is_finite() {
            Ok(NoiseLevel(lambda))
        } else {
            Err(Error::InvalidNoise(lambda))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `p(a, A) = v(a) / Σ_{b ∈ A} v(b)`.
pub fn luce_rule(weights: &LuceWeights, family: &ChoiceFamily) -> Result<RandomChoiceRule> {
    let gamma = ChoiceCorrespondence::identity(weights.universe.clone(), family.clone());
    build(&gamma, weights)
}

/// The general Luce rule: Luce weights restricted to `Γ(A)`, zero elsewhere.
///
/// `gamma` must satisfy WARP; other correspondences are refused.
pub fn general_luce_rule(
    gamma: &ChoiceCorrespondence,
    weights: &LuceWeights,
) -> Result<RandomChoiceRule> {
    let warp = check_warp(gamma);
    if let Some(w) = warp.witnesses.into_iter().next() {
        return Err(Error::WarpViolation(Box::new(w)));
    }
    build(gamma, weights)
}

fn build(gamma: &ChoiceCorrespondence, weights: &LuceWeights) -> Result<RandomChoiceRule> {
    if gamma.universe() != weights.universe() {
        return Err(Error::Mismatch);
    }
    let family = gamma.family();
    let table = family
        .sets()
        .iter()
        .zip(gamma.values())
        .map(|(&set, support)| weights.distribution_on(set, support.as_set()))
        .collect();
    let mode = if weights.is_exact() {
        Mode::Exact
    } else {
        Mode::float()
    };
    RandomChoiceRule::new(weights.universe.clone(), family.clone(), mode, table)
}

/// General Luce rule with `Γ(A) = argmax_A u`.
pub fn general_luce_rule_from_utility(
    u: &UtilitySpec,
    weights: &LuceWeights,
    family: &ChoiceFamily,
) -> Result<RandomChoiceRule> {
    build(&u.correspondence(family)?, weights)
}

/// Multinomial logit with scores `u/λ + α`.
pub fn lambda_smoothed_rule(
    u: &UtilitySpec,
    weights: &LuceWeights,
    lambda: NoiseLevel,
    family: &ChoiceFamily,
) -> Result<RandomChoiceRule> {
    if u.universe() != weights.universe() || family.universe_size() != u.universe().len() {
        return Err(Error::Mismatch);
    }
    let alpha = weights.alpha();
    let table = family
        .sets()
        .iter()
        .map(|set| {
            // Shifting u by its max on A keeps the large u/λ terms from
            // swamping α in floating point.
            let top = set
                .iter()
                .map(|a| u.values[a])
                .fold(f64::NEG_INFINITY, f64::max);
            let scores: Vec<f64> = set
                .iter()
                .map(|a| (u.values[a] - top) / lambda.value() + alpha[a])
                .collect();
            softmax(&scores).into_iter().map(Prob::Float).collect()
        })
        .collect();
    RandomChoiceRule::new(u.universe.clone(), family.clone(), Mode::float(), table)
}

/// Upper bound on the sup-norm distance between the smoothed rule at `lambda`
/// and its limit: `|X| e^{range(α)} e^{-g/λ}` with `g` the minimum positive
/// utility gap (zero when `u` is constant).
pub fn smoothing_error_bound(u: &UtilitySpec, weights: &LuceWeights, lambda: NoiseLevel) -> f64 {
    let Some(gap) = u.min_gap() else {
        return 0.0;
    };
    let alpha = weights.alpha();
    let max = alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = alpha.iter().copied().fold(f64::INFINITY, f64::min);
    u.universe().len() as f64 * (max - min).exp() * (-gap / lambda.value()).exp()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub lambdas: Vec<f64>,
    /// Sup-norm distance to the limit rule at each `λ`.
    pub distances: Vec<f64>,
    pub strictly_decreasing: bool,
    pub non_increasing: bool,
}

impl LimitReport {
    pub fn final_distance(&self) -> f64 {
        *self.distances.last().expect("nonempty schedule")
    }
}

/// Distances between the smoothed rules along a decreasing `λ` schedule and
/// the general Luce rule they converge to.
pub fn limit_check(
    u: &UtilitySpec,
    weights: &LuceWeights,
    schedule: &[f64],
    family: &ChoiceFamily,
) -> Result<LimitReport> {
    if schedule.is_empty()
        || schedule.iter().any(|&l| !(l > 0.0 && l.is_finite()))
        || schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidSchedule);
    }
    let log_weights = LuceWeights::from_alpha(weights.universe.clone(), weights.alpha())?;
    let target = general_luce_rule_from_utility(u, &log_weights, family)?;
    let distances = schedule
        .iter()
        .map(|&l| {
            let smoothed = lambda_smoothed_rule(u, weights, NoiseLevel::new(l)?, family)?;
            smoothed.sup_distance(&target)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LimitReport {
        lambdas: schedule.to_vec(),
        strictly_decreasing: distances.windows(2).all(|w| w[1] < w[0]),
        non_increasing: distances.windows(2).all(|w| w[1] <= w[0]),
        distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{check_choice_axiom, check_full_support, check_positivity};
    use crate::fixtures::{abc, luce_123, running_example};
    use crate::prob::parse_rational;

    fn exact(values: &[&str]) -> LuceWeights {
        LuceWeights::exact(
            abc(),
            values.iter().map(|s| parse_rational(s).unwrap()).collect(),
        )
        .unwrap()
    }

    fn running_u() -> UtilitySpec {
        UtilitySpec::new(abc(), vec![1.0, 1.0, 0.0]).unwrap()
    }

    fn running_alpha() -> LuceWeights {
        LuceWeights::from_alpha(abc(), vec![2f64.ln(), 0.0, 0.0]).unwrap()
    }

    #[test]
    fn luce_rule_examples() {
        let fam = ChoiceFamily::all_subsets(3).unwrap();
        let rule = luce_rule(&exact(&["1", "2", "3"]), &fam).unwrap();
        assert_eq!(rule, luce_123());
        let full = rule.universe().full();
        let d = rule.distribution(rule.set_index(*full).unwrap());
        assert_eq!(
            d,
            &[Prob::ratio(1, 6), Prob::ratio(1, 3), Prob::ratio(1, 2)]
        );

        let equal = luce_rule(&exact(&["5", "5", "5"]), &fam).unwrap();
        for i in 0..fam.len() {
            let d = equal.distribution(i);
            assert!(d.iter().all(|p| *p == Prob::ratio(1, d.len() as i64)));
        }
        assert_eq!(
            equal.prob(2, AltSet::singleton(2)).unwrap(),
            &Prob::ratio(1, 1)
        );
        assert!(check_positivity(&rule).holds());
        assert!(check_full_support(&rule).holds());
        assert!(check_choice_axiom(&rule).holds());
    }

    #[test]
    fn general_luce_rule_examples() {
        let fam = ChoiceFamily::all_subsets(3).unwrap();
        let gamma = running_u().correspondence(&fam).unwrap();
        // The weight on c never matters.
        for c in ["1", "7/2"] {
            let rule = general_luce_rule(&gamma, &exact(&["2", "1", c])).unwrap();
            assert_eq!(rule, running_example());
        }
        let identity = ChoiceCorrespondence::identity(abc(), fam.clone());
        let w = exact(&["1", "2", "3"]);
        assert_eq!(
            general_luce_rule(&identity, &w).unwrap(),
            luce_rule(&w, &fam).unwrap()
        );

        let chain = UtilitySpec::new(abc(), vec![3.0, 2.0, 1.0]).unwrap();
        let deterministic = general_luce_rule(&chain.correspondence(&fam).unwrap(), &w).unwrap();
        for (i, set) in fam.sets().iter().enumerate() {
            let best = set.first().unwrap();
            assert_eq!(deterministic.prob_at(i, best).unwrap(), &Prob::ratio(1, 1));
        }
    }

    #[test]
    fn non_rational_correspondence_is_refused() {
        let fam = ChoiceFamily::all_subsets(3).unwrap();
        let broken = ChoiceCorrespondence::identity(abc(), fam)
            .with_value(AltSet::pair(0, 1), ChoiceSet::singleton(0))
            .unwrap()
            .with_value(AltSet::full(3), ChoiceSet::singleton(1))
            .unwrap();
        assert!(matches!(
            general_luce_rule(&broken, &exact(&["1", "1", "1"])),
            Err(Error::WarpViolation(_))
        ));
    }

    #[test]
    fn utility_constructor_examples() {
        let fam = ChoiceFamily::all_subsets(3).unwrap();
        let w = exact(&["2", "1", "1"]);
        assert_eq!(
            general_luce_rule_from_utility(&running_u(), &w, &fam).unwrap(),
            running_example()
        );
        assert_eq!(
            general_luce_rule_from_utility(&UtilitySpec::constant(abc()), &w, &fam).unwrap(),
            luce_rule(&w, &fam).unwrap()
        );
        // Increasing along labels: the last label wins every set.
        let up = UtilitySpec::new(abc(), vec![0.0, 1.0, 2.0]).unwrap();
        let rule = general_luce_rule_from_utility(&up, &w, &fam).unwrap();
        for (i, set) in fam.sets().iter().enumerate() {
            let last = set.iter().last().unwrap();
            assert_eq!(rule.prob_at(i, last).unwrap(), &Prob::ratio(1, 1));
        }
    }

    #[test]
    fn smoothed_rule_examples() {
        let fam = ChoiceFamily::all_subsets(3).unwrap();
        let alpha = running_alpha();

        let huge = lambda_smoothed_rule(&running_u(), &alpha, NoiseLevel::new(1e9).unwrap(), &fam)
            .unwrap();
        let luce = luce_rule(&alpha, &fam).unwrap();
        assert!(huge.sup_distance(&luce).unwrap() <= 1e-6);

        for lambda in [0.01, 1.0, 100.0] {
            let flat = lambda_smoothed_rule(
                &UtilitySpec::constant(abc()),
                &alpha,
                NoiseLevel::new(lambda).unwrap(),
                &fam,
            )
            .unwrap();
            assert!(flat.sup_distance(&luce).unwrap() <= 1e-15);
        }

        let sharp =
            lambda_smoothed_rule(&running_u(), &alpha, NoiseLevel::new(0.05).unwrap(), &fam)
                .unwrap();
        let full = *abc().full();
        assert!(sharp.prob(2, full).unwrap().to_f64() <= 1e-6);
        assert!((sharp.prob(0, full).unwrap().to_f64() - 2.0 / 3.0).abs() <= 1e-6);
        assert!(check_choice_axiom(&sharp).holds());
        assert!(check_positivity(&sharp).holds());
    }

    #[test]
    fn overflow_safe_at_tiny_noise() {
        let fam = ChoiceFamily::all_subsets(3).unwrap();
        let rule = lambda_smoothed_rule(
            &running_u(),
            &running_alpha(),
            NoiseLevel::new(1e-6).unwrap(),
            &fam,
        )
        .unwrap();
        let target = general_luce_rule_from_utility(&running_u(), &running_alpha(), &fam).unwrap();
        assert!(rule.sup_distance(&target).unwrap() < 1e-12);
        assert!(NoiseLevel::new(0.0).is_err());
        assert!(NoiseLevel::new(f64::NAN).is_err());
    }

    #[test]
    fn limit_check_examples() {
        let fam = ChoiceFamily::all_subsets(3).unwrap();
        let report =
            limit_check(&running_u(), &running_alpha(), &[1.0, 0.5, 0.1, 0.05], &fam).unwrap();
        assert!(report.strictly_decreasing);
        assert!(report.final_distance() <= 1e-6);

        let flat = limit_check(
            &UtilitySpec::constant(abc()),
            &running_alpha(),
            &[1.0, 0.1],
            &fam,
        )
        .unwrap();
        assert!(flat.distances.iter().all(|&d| d <= 1e-15));
        assert!(flat.non_increasing);

        let single = Universe::new(["z"]).unwrap();
        let report = limit_check(
            &UtilitySpec::constant(single.clone()),
            &LuceWeights::uniform(single),
            &[1.0, 0.5],
            &ChoiceFamily::all_subsets(1).unwrap(),
        )
        .unwrap();
        assert_eq!(report.distances, vec![0.0, 0.0]);

        assert_eq!(
            limit_check(&running_u(), &running_alpha(), &[0.1, 0.5], &fam).unwrap_err(),
            Error::InvalidSchedule
        );
    }

    #[test]
    fn smoothing_bound_dominates_distance() {
        let fam = ChoiceFamily::all_subsets(3).unwrap();
        let target = general_luce_rule_from_utility(&running_u(), &running_alpha(), &fam).unwrap();
        for lambda in [0.05, 0.04, 0.02] {
            let noise = NoiseLevel::new(lambda).unwrap();
            let bound = smoothing_error_bound(&running_u(), &running_alpha(), noise);
            assert!(bound < 1e-6);
            let rule = lambda_smoothed_rule(&running_u(), &running_alpha(), noise, &fam).unwrap();
            // Allow for rounding in the softmax itself.
            let d = rule.sup_distance(&target).unwrap();
            assert!(d <= bound + 1e-15, "{lambda}: {d} > {bound}");
        }
    }

    #[test]
    fn exact_translation_invariance() {
        let fam = ChoiceFamily::all_subsets(3).unwrap();
        let w = exact(&["1", "2", "3"]);
        let scaled = w.scaled(&parse_rational("7/3").unwrap()).unwrap();
        assert_eq!(
            luce_rule(&w, &fam).unwrap(),
            luce_rule(&scaled, &fam).unwrap()
        );
    }

    #[test]
    fn ln_of_huge_rationals_is_finite() {
        let big = parse_rational(&format!("{}/3", "9".repeat(400))).unwrap();
        let ln = ln_rational(&big);
        assert!((ln - (400.0 * 10f64.ln() - 3f64.ln())).abs() < 1e-9);
    }
}
