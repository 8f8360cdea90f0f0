//! Brute-force oracles written directly from the definitions, sharing no code
//! with the library beyond its public data accessors.
#![allow(dead_code)]

use std::collections::BTreeMap;

use luce_core::{Prob, RandomChoiceRule};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Table keyed by subset bitmask; each value maps member index to probability.
pub type Table = BTreeMap<u64, BTreeMap<usize, BigRational>>;

pub fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn table_of(rule: &RandomChoiceRule) -> Table {
    let mut table = Table::new();
    for (i, set) in rule.family().sets().iter().enumerate() {
        let row = set
            .iter()
            .zip(rule.distribution(i))
            .map(|(a, p)| match p {
                Prob::Exact(r) => (a, r.clone()),
                Prob::Float(_) => panic!("oracle works on exact rules"),
            })
            .collect();
        table.insert(set.bits(), row);
    }
    table
}

/// Eq. CA on every nonempty subset: weights restricted to the rank-minimal
/// members.
pub fn general_luce(ranks: &[usize], v: &[BigRational]) -> Table {
    let n = ranks.len();
    let mut table = Table::new();
    for mask in 1u64..(1 << n) {
        let m = members(mask);
        let best = m.iter().map(|&a| ranks[a]).min().unwrap();
        let total: BigRational = m
            .iter()
            .filter(|&&a| ranks[a] == best)
            .map(|&a| v[a].clone())
            .sum();
        let row = m
            .iter()
            .map(|&a| {
                let p = if ranks[a] == best {
                    &v[a] / &total
                } else {
                    BigRational::zero()
                };
                (a, p)
            })
            .collect();
        table.insert(mask, row);
    }
    table
}

fn mass(table: &Table, event: u64, set: u64) -> BigRational {
    table[&set]
        .iter()
        .filter(|(a, _)| event >> **a & 1 == 1)
        .map(|(_, p)| p.clone())
        .sum()
}

fn subset_pairs(table: &Table) -> Vec<(u64, u64)> {
    let keys: Vec<u64> = table.keys().copied().collect();
    let mut out = Vec::new();
    for &a in &keys {
        for &b in &keys {
            if b & !a == 0 && b != a {
                out.push((b, a));
            }
        }
    }
    out
}

/// p(a, A) = p(a, B) p(B, A) for a in B ⊊ A.
pub fn choice_axiom(table: &Table) -> bool {
    subset_pairs(table).into_iter().all(|(b, a)| {
        let pba = mass(table, b, a);
        members(b)
            .into_iter()
            .all(|x| table[&a][&x] == &table[&b][&x] * &pba)
    })
}

pub fn support(table: &Table, set: u64) -> u64 {
    table[&set]
        .iter()
        .filter(|(_, p)| !p.is_zero())
        .fold(0, |acc, (a, _)| acc | 1 << a)
}

/// Arrow's condition on the support correspondence.
pub fn warp(table: &Table) -> bool {
    subset_pairs(table).into_iter().all(|(b, a)| {
        let restricted = support(table, a) & b;
        restricted == 0 || support(table, b) == restricted
    })
}

/// p_B(x) = p_A(x) / p_A(B) for x in B with p_A(x) > 0.
pub fn renyi(table: &Table) -> bool {
    subset_pairs(table).into_iter().all(|(b, a)| {
        let pba = mass(table, b, a);
        members(b).into_iter().all(|x| {
            let pa = &table[&a][&x];
            pa.is_zero() || table[&b][&x] == pa / &pba
        })
    })
}

pub fn positivity(table: &Table) -> bool {
    table
        .iter()
        .filter(|(k, _)| k.count_ones() == 2)
        .all(|(_, row)| row.values().all(|p| !p.is_zero()))
}

pub fn full_support(table: &Table) -> bool {
    table.values().all(|row| row.values().all(|p| !p.is_zero()))
}

pub fn is_one(p: &BigRational) -> bool {
    p.is_one()
}
