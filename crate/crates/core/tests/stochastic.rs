use luce_core::estimate::{fit, gradient, log_likelihood, ChoiceDataset, FitOptions};
use luce_core::rum::{
    empirical_rule, gumbel_luce_sampler, independent_rum_sampler, lex_sampler, IndependentRum,
};
use luce_core::synthesize::{general_luce_rule, luce_rule};
use luce_core::{AltSet, ChoiceFamily, LuceWeights, Universe, UtilitySpec, WeakOrder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: u64 = 200_000;

fn bound(p: f64, n: u64) -> f64 {
    4.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn abc() -> Universe {
    Universe::new(["a", "b", "c"]).unwrap()
}

#[test]
fn gumbel_sampler_matches_logit() {
    let w = LuceWeights::from_alpha(abc(), vec![0.0, 2f64.ln(), 3f64.ln()]).unwrap();
    let fam = ChoiceFamily::all_subsets(3).unwrap();
    let emp = empirical_rule(&gumbel_luce_sampler(&w, 2024), &fam, N).unwrap();
    let target = luce_rule(&w, &fam).unwrap();
    for (i, set) in fam.sets().iter().enumerate() {
        for a in set.iter() {
            let p = target.prob_at(i, a).unwrap().to_f64();
            let f = emp.frequency(a, set.as_set()).unwrap();
            assert!(
                (f - p).abs() <= bound(p, N) + 1e-12,
                "{a} in {set:?}: {f} vs {p}"
            );
        }
    }
}

#[test]
fn lexicographic_sampler_matches_general_luce() {
    let u = abc();
    let fam = ChoiceFamily::all_subsets(3).unwrap();
    let w = LuceWeights::from_alpha(u.clone(), vec![2f64.ln(), 0.0, 0.0]).unwrap();
    let first = WeakOrder::from_ranks(u.clone(), &[0, 0, 1]).unwrap();
    let emp = empirical_rule(
        &lex_sampler(&first, &gumbel_luce_sampler(&w, 8)).unwrap(),
        &fam,
        N,
    )
    .unwrap();
    let target = general_luce_rule(&first.correspondence(&fam).unwrap(), &w).unwrap();
    let rule = emp.to_rule_with_epsilon(4.0 * (0.25 / N as f64).sqrt());
    assert!(luce_core::axioms::check_choice_axiom(&rule).holds());
    for (i, set) in fam.sets().iter().enumerate() {
        for a in set.iter() {
            let p = target.prob_at(i, a).unwrap().to_f64();
            let f = emp.frequency(a, set.as_set()).unwrap();
            assert!((f - p).abs() <= bound(p, N) + 1e-12);
        }
    }
}

#[test]
fn independent_rum_separates_and_ties_break_by_logit() {
    let u = abc();
    let util = UtilitySpec::new(u.clone(), vec![1.0, 1.0, 0.0]).unwrap();
    let w = LuceWeights::from_alpha(u.clone(), vec![2f64.ln(), 0.0, 0.0]).unwrap();
    let model = IndependentRum::new(&util, &w).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100_000 {
        let draw = model.draw_utilities(&mut rng);
        for x in 0..3 {
            for y in 0..3 {
                if util.values()[x] > util.values()[y] {
                    assert!(draw[x] > draw[y]);
                }
            }
        }
    }
    let fam = ChoiceFamily::all_subsets(3).unwrap();
    let emp = empirical_rule(&independent_rum_sampler(&util, &w, 5).unwrap(), &fam, N).unwrap();
    let full = AltSet::full(3);
    assert_eq!(emp.frequency(2, full).unwrap(), 0.0);
    assert!((emp.frequency(0, full).unwrap() - 2.0 / 3.0).abs() <= bound(2.0 / 3.0, N));

    let flat = UtilitySpec::constant(u.clone());
    let emp = empirical_rule(&independent_rum_sampler(&flat, &w, 6).unwrap(), &fam, N).unwrap();
    let target = luce_rule(&w, &fam).unwrap();
    for (i, set) in fam.sets().iter().enumerate() {
        for a in set.iter() {
            let p = target.prob_at(i, a).unwrap().to_f64();
            assert!((emp.frequency(a, set.as_set()).unwrap() - p).abs() <= bound(p, N) + 1e-12);
        }
    }
}

#[test]
fn gradient_matches_central_differences() {
    let u = Universe::alphabetic(4).unwrap();
    let fam = ChoiceFamily::all_subsets(4).unwrap();
    let w = LuceWeights::from_alpha(u.clone(), vec![0.0, 0.5, -0.3, 1.0]).unwrap();
    let emp = empirical_rule(&gumbel_luce_sampler(&w, 3), &fam, 500).unwrap();
    let data = ChoiceDataset::from_empirical(&emp);
    let gamma = luce_core::ChoiceCorrespondence::identity(u.clone(), fam);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = 1e-6;
    for _ in 0..10 {
        let alpha: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
        let g = gradient(&data, &gamma, &alpha, 0.0).unwrap();
        for k in 0..4 {
            let mut plus = alpha.clone();
            let mut minus = alpha.clone();
            plus[k] += h;
            minus[k] -= h;
            let fd = (log_likelihood(&data, &gamma, &plus, 0.0).unwrap()
                - log_likelihood(&data, &gamma, &minus, 0.0).unwrap())
                / (2.0 * h);
            assert!(
                (fd - g[k]).abs() <= 1e-5 * g[k].abs().max(1.0),
                "{fd} vs {}",
                g[k]
            );
        }
    }
}

#[test]
fn fit_recovers_simulated_model() {
    let u = Universe::alphabetic(4).unwrap();
    let fam = ChoiceFamily::all_subsets(4).unwrap();
    let order = WeakOrder::from_ranks(u.clone(), &[0, 0, 1, 1]).unwrap();
    let w = LuceWeights::from_alpha(u.clone(), vec![0.0, 0.7, -0.4, 0.3]).unwrap();
    let sampler = lex_sampler(&order, &gumbel_luce_sampler(&w, 99)).unwrap();
    let emp = empirical_rule(&sampler, &fam, 100_000).unwrap();
    let result = fit(&ChoiceDataset::from_empirical(&emp), &FitOptions::default()).unwrap();
    assert_eq!(result.gamma_hat, order.correspondence(&fam).unwrap());
    assert!(result.converged && !result.diverged);
    assert!(result.trace.windows(2).all(|p| p[1] >= p[0]));
    let alpha = result.alpha_hat.unwrap();
    assert!((alpha[1] - alpha[0] - 0.7).abs() <= 0.05);
    assert!((alpha[3] - alpha[2] - 0.7).abs() <= 0.05);
}

#[test]
fn exact_frequencies_are_a_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let inst = luce_core::instances::random_luce_instance(4, &mut rng).unwrap();
        // A common denominator for every probability of the rule.
        let mut lcm = num_bigint::BigInt::from(1);
        for i in 0..inst.rule.family().len() {
            for p in inst.rule.distribution(i) {
                let d = p.as_exact().unwrap().denom().clone();
                lcm = num_integer::Integer::lcm(&lcm, &d);
            }
        }
        let n: u64 = num_traits::ToPrimitive::to_u64(&lcm).unwrap();
        let data = ChoiceDataset::from_exact_frequencies(&inst.rule, n).unwrap();
        let result = fit(&data, &FitOptions::default()).unwrap();
        let fitted = result.fitted_rule().unwrap();
        assert!(fitted.sup_distance(&inst.rule).unwrap() <= 1e-8);
        let again = fit(
            &data,
            &FitOptions {
                initial: result.alpha_hat.clone(),
                ..FitOptions::default()
            },
        )
        .unwrap();
        let (a1, a2) = (result.alpha_hat.unwrap(), again.alpha_hat.unwrap());
        assert!(a1.iter().zip(&a2).all(|(x, y)| (x - y).abs() < 1e-8));
    }
}
