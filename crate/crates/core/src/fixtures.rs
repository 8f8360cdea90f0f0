//! Hand-built rules shared by unit tests.

use crate::prob::{Mode, Prob};
use crate::rule::RandomChoiceRule;
use crate::universe::Universe;

pub fn abc() -> Universe {
    Universe::new(["a", "b", "c"]).unwrap()
}

fn build(entries: &[(&[&str], &[(i64, i64)])]) -> RandomChoiceRule {
    let u = abc();
    RandomChoiceRule::from_entries(
        u.clone(),
        Mode::Exact,
        entries.iter().map(|(labels, probs)| {
            (
                u.choice_set(labels).unwrap(),
                probs.iter().map(|&(n, d)| Prob::ratio(n, d)).collect(),
            )
        }),
    )
    .unwrap()
}

/// General Luce rule with u = {a:1, b:1, c:0} and v = {a:2, b:1, c:1}.
pub fn running_example() -> RandomChoiceRule {
    build(&[
        (&["a"], &[(1, 1)]),
        (&["b"], &[(1, 1)]),
        (&["c"], &[(1, 1)]),
        (&["a", "b"], &[(2, 3), (1, 3)]),
        (&["a", "c"], &[(1, 1), (0, 1)]),
        (&["b", "c"], &[(1, 1), (0, 1)]),
        (&["a", "b", "c"], &[(2, 3), (1, 3), (0, 1)]),
    ])
}

/// Uniform pairs but p(., {a,b,c}) = (1/2, 3/10, 1/5).
pub fn failing_rule() -> RandomChoiceRule {
    build(&[
        (&["a"], &[(1, 1)]),
        (&["b"], &[(1, 1)]),
        (&["c"], &[(1, 1)]),
        (&["a", "b"], &[(1, 2), (1, 2)]),
        (&["a", "c"], &[(1, 2), (1, 2)]),
        (&["b", "c"], &[(1, 2), (1, 2)]),
        (&["a", "b", "c"], &[(1, 2), (3, 10), (1, 5)]),
    ])
}

/// Luce rule with v = {a:1, b:2, c:3}.
pub fn luce_123() -> RandomChoiceRule {
    build(&[
        (&["a"], &[(1, 1)]),
        (&["b"], &[(1, 1)]),
        (&["c"], &[(1, 1)]),
        (&["a", "b"], &[(1, 3), (2, 3)]),
        (&["a", "c"], &[(1, 4), (3, 4)]),
        (&["b", "c"], &[(2, 5), (3, 5)]),
        (&["a", "b", "c"], &[(1, 6), (1, 3), (1, 2)]),
    ])
}

/// Pairwise supports a > b > c > a.
pub fn cyclic_rule() -> RandomChoiceRule {
    build(&[
        (&["a"], &[(1, 1)]),
        (&["b"], &[(1, 1)]),
        (&["c"], &[(1, 1)]),
        (&["a", "b"], &[(1, 1), (0, 1)]),
        (&["a", "c"], &[(0, 1), (1, 1)]),
        (&["b", "c"], &[(1, 1), (0, 1)]),
        (&["a", "b", "c"], &[(1, 3), (1, 3), (1, 3)]),
    ])
}
