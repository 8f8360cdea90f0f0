//! Estimating `(Γ, α)` from choice counts.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::axioms::{check_warp, AxiomReport};
use crate::correspondence::ChoiceCorrespondence;
use crate::error::{Error, Result};
use crate::rule::RandomChoiceRule;
use crate::rum::EmpiricalRule;
use crate::synthesize::{general_luce_rule, LuceWeights};
use crate::universe::{AltSet, ChoiceFamily, ChoiceSet, Universe};

/// Observed top-choice counts on a family of choice sets.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceDataset {
    universe: Universe,
    family: ChoiceFamily,
    /// Aligned with the members of each set.
    counts: Vec<Vec<u64>>,
}

impl ChoiceDataset {
    pub fn new<I>(universe: Universe, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ChoiceSet, Vec<u64>)>,
    {
        let mut entries: Vec<(ChoiceSet, Vec<u64>)> = entries.into_iter().collect();
        entries.sort_by_key(|a| a.0);
        for (set, counts) in &entries {
            if counts.len() != set.len() {
                return Err(Error::Mismatch);
            }
            if counts.iter().sum::<u64>() == 0 {
                return Err(Error::EmptyObservation);
            }
        }
        let family = ChoiceFamily::from_sets(universe.len(), entries.iter().map(|e| e.0))?;
        Ok(Self {
            universe,
            family,
            counts: entries.into_iter().map(|e| e.1).collect(),
        })
    }

    pub fn from_empirical(rule: &EmpiricalRule) -> Self {
        Self {
            universe: rule.universe().clone(),
            family: rule.family().clone(),
            counts: rule.counts().to_vec(),
        }
    }

    /// Counts `N p(a, A)`; every such product must be an integer.
    pub fn from_exact_frequencies(rule: &RandomChoiceRule, draws: u64) -> Result<Self> {
        let n = BigRational::from_integer(BigInt::from(draws));
        let counts = (0..rule.family().len())
            .map(|i| {
                rule.distribution(i)
                    .iter()
                    .map(|p| {
                        let scaled = p.as_exact().map(|r| r * &n).filter(|c| c.is_integer());
                        scaled.and_then(|c| c.to_integer().to_u64()).ok_or_else(|| {
                            Error::InvalidDistribution(format!("{p} times {draws} is not a count"))
                        })
                    })
                    .collect::<Result<Vec<u64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            universe: rule.universe().clone(),
            family: rule.family().clone(),
            counts,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn family(&self) -> &ChoiceFamily {
        &self.family
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn count(&self, a: usize, set: AltSet) -> Result<u64> {
        let idx = self.family.index_of(set).ok_or(Error::UnknownChoiceSet)?;
        let pos = set.position(a).ok_or(Error::NotAMember)?;
        Ok(self.counts[idx][pos])
    }
}

/// `Γ̂(A) = {a : count(a, A) > 0}` and its WARP report.
pub fn support_from_counts(data: &ChoiceDataset) -> (ChoiceCorrespondence, AxiomReport) {
    let values = data
        .family
        .sets()
        .iter()
        .zip(&data.counts)
        .map(|(set, counts)| {
            let chosen: AltSet = set
                .iter()
                .zip(counts)
                .filter(|(_, &c)| c > 0)
                .map(|(a, _)| a)
                .collect();
            ChoiceSet::new(chosen).expect("observations have a positive count")
        })
        .collect();
    let gamma = ChoiceCorrespondence::new(data.universe.clone(), data.family.clone(), values)
        .expect("supports lie inside their sets");
    let report = check_warp(&gamma);
    (gamma, report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitOptions {
    /// Added to every count inside `Γ(A)` for each observed `A`.
    pub pseudo_count: f64,
    pub max_iterations: usize,
    /// Bound on `|α̂|`.
    pub clamp: f64,
    /// Starting point; defaults to zero.
    pub initial: Option<Vec<f64>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            pseudo_count: 0.0,
            max_iterations: 200,
            clamp: 30.0,
            initial: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub gamma_hat: ChoiceCorrespondence,
    /// Absent when `Γ̂` fails WARP.
    pub alpha_hat: Option<Vec<f64>>,
    pub log_likelihood: Option<f64>,
    pub converged: bool,
    /// Some `|α̂|` reached the clamp.
    pub diverged: bool,
    pub warp_report: AxiomReport,
    pub iterations: usize,
    /// Log-likelihood at the start and after every accepted step.
    pub trace: Vec<f64>,
}

impl FitResult {
    /// The general Luce rule at `(Γ̂, α̂)`.
    pub fn fitted_rule(&self) -> Option<RandomChoiceRule> {
        let alpha = self.alpha_hat.clone()?;
        let weights = LuceWeights::from_alpha(self.gamma_hat.universe().clone(), alpha).ok()?;
        general_luce_rule(&self.gamma_hat, &weights).ok()
    }
}

struct Problem<'a> {
    gamma: &'a ChoiceCorrespondence,
    /// Per observed set: `(members of Γ(A), their effective counts)`.
    cells: Vec<(Vec<usize>, Vec<f64>)>,
}

impl<'a> Problem<'a> {
    fn new(
        data: &ChoiceDataset,
        gamma: &'a ChoiceCorrespondence,
        pseudo_count: f64,
    ) -> Result<Self> {
        if gamma.family() != &data.family || gamma.universe() != &data.universe {
            return Err(Error::Mismatch);
        }
        if !(pseudo_count >= 0.0 && pseudo_count.is_finite()) {
            return Err(Error::InvalidWeights(format!(
                "pseudo-count {pseudo_count}"
            )));
        }
        let mut cells = Vec::with_capacity(data.family.len());
        for (i, set) in data.family.sets().iter().enumerate() {
            let support = gamma.value_at(i);
            let mut members = Vec::new();
            let mut counts = Vec::new();
            for (a, &c) in set.iter().zip(&data.counts[i]) {
                if support.contains(a) {
                    members.push(a);
                    counts.push(c as f64 + pseudo_count);
                } else if c > 0 {
                    return Err(Error::CountsOffSupport);
                }
            }
            cells.push((members, counts));
        }
        Ok(Self { gamma, cells })
    }

    fn log_likelihood(&self, alpha: &[f64]) -> f64 {
        self.cells
            .iter()
            .map(|(members, counts)| {
                let lse = log_sum_exp(members.iter().map(|&a| alpha[a]));
                members
                    .iter()
                    .zip(counts)
                    .filter(|(_, &c)| c > 0.0)
                    .map(|(&a, &c)| c * (alpha[a] - lse))
                    .sum::<f64>()
            })
            .sum()
    }

    fn probabilities(members: &[usize], alpha: &[f64]) -> Vec<f64> {
        let lse = log_sum_exp(members.iter().map(|&a| alpha[a]));
        members.iter().map(|&a| (alpha[a] - lse).exp()).collect()
    }

    fn gradient(&self, alpha: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; alpha.len()];
        for (members, counts) in &self.cells {
            let total: f64 = counts.iter().sum();
            let p = Self::probabilities(members, alpha);
            for ((&a, &c), q) in members.iter().zip(counts).zip(p) {
                g[a] += c - total * q;
            }
        }
        g
    }

    /// Negative Hessian, positive semidefinite.
    fn information(&self, alpha: &[f64]) -> DMatrix<f64> {
        let n = alpha.len();
        let mut h = DMatrix::zeros(n, n);
        for (members, counts) in &self.cells {
            let total: f64 = counts.iter().sum();
            let p = Self::probabilities(members, alpha);
            for (i, &a) in members.iter().enumerate() {
                h[(a, a)] += total * p[i];
                for (j, &b) in members.iter().enumerate() {
                    h[(a, b)] -= total * p[i] * p[j];
                }
            }
        }
        h
    }

    /// For each alternative, the pinned member of its connected component of
    /// co-occurrence in some `Γ(A)`: the smallest member with a positive
    /// count. Alternatives that never share a support pin themselves.
    fn pins(&self) -> Vec<usize> {
        let n = self.gamma.universe().len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (members, _) in &self.cells {
            for w in members.windows(2) {
                let (ra, rb) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let chosen = self.chosen();
        let mut pin = vec![usize::MAX; n];
        for a in 0..n {
            let root = find(&mut parent, a);
            if chosen[a] && pin[root] == usize::MAX {
                pin[root] = a;
            }
        }
        (0..n)
            .map(|a| {
                let p = pin[find(&mut parent, a)];
                if p == usize::MAX {
                    a
                } else {
                    p
                }
            })
            .collect()
    }

    /// Whether each alternative has a positive count in some support.
    fn chosen(&self) -> Vec<bool> {
        let mut chosen = vec![false; self.gamma.universe().len()];
        for (members, counts) in &self.cells {
            for (&a, &c) in members.iter().zip(counts) {
                chosen[a] |= c > 0.0;
            }
        }
        chosen
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Log-likelihood of `alpha` for the counts inside `gamma`.
pub fn log_likelihood(
    data: &ChoiceDataset,
    gamma: &ChoiceCorrespondence,
    alpha: &[f64],
    pseudo_count: f64,
) -> Result<f64> {
    Ok(Problem::new(data, gamma, pseudo_count)?.log_likelihood(alpha))
}

/// Analytic gradient of [`log_likelihood`] in `alpha`.
pub fn gradient(
    data: &ChoiceDataset,
    gamma: &ChoiceCorrespondence,
    alpha: &[f64],
    pseudo_count: f64,
) -> Result<Vec<f64>> {
    Ok(Problem::new(data, gamma, pseudo_count)?.gradient(alpha))
}

const GRADIENT_TOLERANCE: f64 = 1e-8;
const RELATIVE_IMPROVEMENT: f64 = 1e-10;

/// Maximum-likelihood `α̂` on a fixed rational correspondence.
///
/// Each co-occurrence component has its smallest member pinned at zero;
/// the remaining coordinates are fitted by damped Newton steps, falling back
/// to gradient steps when the information matrix is singular.
pub fn fit_alpha_mle(
    data: &ChoiceDataset,
    gamma: &ChoiceCorrespondence,
    options: &FitOptions,
) -> Result<FitResult> {
    let warp_report = check_warp(gamma);
    if let Some(w) = warp_report.witnesses.first() {
        return Err(Error::WarpViolation(Box::new(w.clone())));
    }
    let problem = Problem::new(data, gamma, options.pseudo_count)?;
    let n = data.universe.len();
    let pins = problem.pins();
    let chosen = problem.chosen();
    let clamp = options.clamp;

    let mut alpha = vec![0.0; n];
    if let Some(start) = &options.initial {
        if start.len() != n || start.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidWeights("initial point".into()));
        }
        for a in 0..n {
            alpha[a] = (start[a] - start[pins[a]]).clamp(-clamp, clamp);
        }
    }
    // An alternative never chosen where it is available has its likelihood
    // maximized at -inf; it is held at the clamp.
    let mut free_base = Vec::new();
    for a in 0..n {
        if pins[a] == a {
            continue;
        }
        if chosen[a] {
            free_base.push(a);
        } else {
            alpha[a] = -clamp;
        }
    }
    let mut ll = problem.log_likelihood(&alpha);
    let mut trace = vec![ll];
    let mut converged = free_base.is_empty();
    let mut iterations = 0;

    while !converged && iterations < options.max_iterations {
        iterations += 1;
        let grad = problem.gradient(&alpha);
        // Coordinates pinned at the clamp with the gradient pushing outward
        // are held fixed.
        let free: Vec<usize> = free_base
            .iter()
            .copied()
            .filter(|&a| {
                !(alpha[a] >= clamp && grad[a] > 0.0) && !(alpha[a] <= -clamp && grad[a] < 0.0)
            })
            .collect();
        let g = DVector::from_iterator(free.len(), free.iter().map(|&a| grad[a]));
        if g.amax() < GRADIENT_TOLERANCE {
            converged = true;
            break;
        }
        let info = problem.information(&alpha);
        let sub = DMatrix::from_fn(free.len(), free.len(), |i, j| info[(free[i], free[j])]);
        let direction = sub
            .cholesky()
            .map(|c| c.solve(&g))
            .filter(|d| d.iter().all(|x| x.is_finite()))
            .unwrap_or_else(|| g.clone());

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut candidate = alpha.clone();
            for (k, &a) in free.iter().enumerate() {
                candidate[a] = (alpha[a] + step * direction[k]).clamp(-clamp, clamp);
            }
            let value = problem.log_likelihood(&candidate);
            if value.is_finite() && value >= ll {
                accepted = Some((candidate, value));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, value)) = accepted else {
            // No ascent along the search direction at machine precision.
            converged = true;
            break;
        };
        let improvement = (value - ll) / ll.abs().max(1.0);
        alpha = candidate;
        ll = value;
        trace.push(ll);
        if improvement < RELATIVE_IMPROVEMENT {
            converged = true;
        }
    }

    let diverged = alpha.iter().any(|a| a.abs() >= clamp);
    Ok(FitResult {
        gamma_hat: gamma.clone(),
        alpha_hat: Some(alpha),
        log_likelihood: Some(ll),
        converged,
        diverged,
        warp_report,
        iterations,
        trace,
    })
}

/// Estimates `Γ̂` from positive counts, then `α̂` on it. A positive
/// pseudo-count makes every member of an observed set count as chosen.
pub fn fit(data: &ChoiceDataset, options: &FitOptions) -> Result<FitResult> {
    let (gamma, report) = if options.pseudo_count > 0.0 {
        let gamma = ChoiceCorrespondence::identity(data.universe.clone(), data.family.clone());
        let report = check_warp(&gamma);
        (gamma, report)
    } else {
        support_from_counts(data)
    };
    if !report.holds() {
        return Ok(FitResult {
            gamma_hat: gamma,
            alpha_hat: None,
            log_likelihood: None,
            converged: false,
            diverged: false,
            warp_report: report,
            iterations: 0,
            trace: Vec::new(),
        });
    }
    fit_alpha_mle(data, &gamma, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{abc, running_example};

    fn dataset(entries: &[(&[usize], &[u64])]) -> ChoiceDataset {
        ChoiceDataset::new(
            abc(),
            entries.iter().map(|(s, c)| {
                (
                    ChoiceSet::from_indices(s.iter().copied()).unwrap(),
                    c.to_vec(),
                )
            }),
        )
        .unwrap()
    }

    #[test]
    fn support_examples() {
        let data = dataset(&[(&[0, 1, 2], &[10, 5, 0])]);
        let (gamma, report) = support_from_counts(&data);
        assert_eq!(gamma.get(AltSet::full(3)).unwrap(), ChoiceSet::pair(0, 1));
        assert!(report.holds());
        let data = dataset(&[(&[0, 1, 2], &[1, 5, 2]), (&[0, 1], &[3, 3])]);
        let (gamma, _) = support_from_counts(&data);
        assert_eq!(
            gamma,
            ChoiceCorrespondence::identity(abc(), data.family().clone())
        );
    }

    #[test]
    fn dataset_validation() {
        let bad = ChoiceDataset::new(abc(), [(ChoiceSet::pair(0, 1), vec![0, 0])]);
        assert_eq!(bad.unwrap_err(), Error::EmptyObservation);
        let bad = ChoiceDataset::new(abc(), [(ChoiceSet::pair(0, 1), vec![1])]);
        assert_eq!(bad.unwrap_err(), Error::Mismatch);
    }

    #[test]
    fn single_pair_closed_form() {
        let data = dataset(&[(&[0, 1], &[20, 10])]);
        let result = fit(&data, &FitOptions::default()).unwrap();
        let alpha = result.alpha_hat.unwrap();
        assert!(result.converged && !result.diverged);
        assert!((alpha[0] - alpha[1] - 2f64.ln()).abs() < 1e-9);
        assert_eq!(alpha[0], 0.0);
    }

    #[test]
    fn symmetric_counts_give_constant_alpha() {
        let data = dataset(&[(&[0, 1, 2], &[7, 7, 7]), (&[0, 2], &[4, 4])]);
        let alpha = fit(&data, &FitOptions::default())
            .unwrap()
            .alpha_hat
            .unwrap();
        assert!(alpha.iter().all(|a| a.abs() < 1e-9));
    }

    #[test]
    fn exact_frequencies_recover_generator() {
        let rule = running_example();
        let data = ChoiceDataset::from_exact_frequencies(&rule, 300).unwrap();
        let result = fit(&data, &FitOptions::default()).unwrap();
        let alpha = result.alpha_hat.clone().unwrap();
        assert!((alpha[1] - alpha[0] + 2f64.ln()).abs() < 1e-8);
        assert!(result.fitted_rule().unwrap().sup_distance(&rule).unwrap() < 1e-8);
        assert!(result.trace.windows(2).all(|w| w[1] >= w[0]));
        assert!(ChoiceDataset::from_exact_frequencies(&rule, 7).is_err());
    }

    #[test]
    fn cyclic_counts_block_the_fit() {
        let data = dataset(&[
            (&[0, 1], &[5, 0]),
            (&[1, 2], &[5, 0]),
            (&[0, 2], &[0, 5]),
            (&[0, 1, 2], &[2, 2, 2]),
        ]);
        let result = fit(&data, &FitOptions::default()).unwrap();
        assert!(!result.warp_report.holds());
        assert!(result.alpha_hat.is_none());
    }

    #[test]
    fn one_observation_per_set() {
        let data = dataset(&[
            (&[0, 1], &[1, 0]),
            (&[0, 1, 2], &[1, 0, 0]),
            (&[1, 2], &[0, 1]),
        ]);
        let result = fit(&data, &FitOptions::default()).unwrap();
        assert_eq!(result.alpha_hat.unwrap(), vec![0.0; 3]);
        assert!(result.converged);
    }

    #[test]
    fn separation_hits_the_clamp() {
        let data = dataset(&[(&[0, 1], &[10, 0])]);
        let gamma = ChoiceCorrespondence::identity(abc(), data.family().clone());
        let result = fit_alpha_mle(&data, &gamma, &FitOptions::default()).unwrap();
        assert!(result.diverged);
        assert_eq!(result.alpha_hat.unwrap()[1], -30.0);
        assert!(result.trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn counts_off_support_are_rejected() {
        let data = dataset(&[(&[0, 1], &[3, 1])]);
        let gamma =
            ChoiceCorrespondence::new(abc(), data.family().clone(), vec![ChoiceSet::singleton(0)])
                .unwrap();
        assert_eq!(
            fit_alpha_mle(&data, &gamma, &FitOptions::default()).unwrap_err(),
            Error::CountsOffSupport
        );
    }

    #[test]
    fn pseudo_counts_fill_the_support() {
        let data = dataset(&[(&[0, 1], &[10, 0])]);
        let options = FitOptions {
            pseudo_count: 1.0,
            ..FitOptions::default()
        };
        let result = fit(&data, &options).unwrap();
        let alpha = result.alpha_hat.unwrap();
        assert!((alpha[0] - alpha[1] - 11f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn refit_from_estimate_is_idempotent() {
        let data = dataset(&[
            (&[0, 1, 2], &[9, 4, 2]),
            (&[0, 1], &[5, 3]),
            (&[1, 2], &[6, 2]),
        ]);
        let first = fit(&data, &FitOptions::default()).unwrap();
        let alpha = first.alpha_hat.clone().unwrap();
        let shifted: Vec<f64> = alpha.iter().map(|a| a + 3.5).collect();
        let again = fit(
            &data,
            &FitOptions {
                initial: Some(shifted),
                ..FitOptions::default()
            },
        )
        .unwrap();
        let alpha2 = again.alpha_hat.unwrap();
        assert!(alpha.iter().zip(&alpha2).all(|(a, b)| (a - b).abs() < 1e-9));
    }
}
