//! `weyl_multiply` against rewriting of words in `x_j, ∂_j` by
//! `∂_j x_j -> x_j ∂_j + 1` until normal ordered.

use std::collections::BTreeMap;

use hyperloc::weyl::{weyl_multiply, CoefficientDomain, WeylElement};
use num_bigint::BigInt;
use proptest::prelude::*;

const Z: CoefficientDomain = CoefficientDomain::Integer;

/// Letter `(j, is_d)`.
type Word = Vec<(usize, bool)>;

fn word_of(n: usize, u: &[u32], w: &[u32]) -> Word {
    let mut out = Vec::new();
    for j in 0..n {
        out.extend(std::iter::repeat_n((j, false), u[j] as usize));
    }
    for j in 0..n {
        out.extend(std::iter::repeat_n((j, true), w[j] as usize));
    }
    out
}

/// Normal form of a linear combination of words.
fn rewrite(n: usize, start: Word) -> BTreeMap<(Vec<u32>, Vec<u32>), BigInt> {
    let mut todo: Vec<(Word, BigInt)> = vec![(start, BigInt::from(1))];
    let mut out: BTreeMap<(Vec<u32>, Vec<u32>), BigInt> = BTreeMap::new();
    while let Some((word, c)) = todo.pop() {
        // first adjacent pair that is out of order: ∂ before x, or letters of
        // different variables out of the canonical (x's then ∂'s, by index) order
        let bad = word.windows(2).position(|p| {
            let (a, b) = (p[0], p[1]);
            (a.1 && !b.1) || (a.1 == b.1 && a.0 > b.0)
        });
        match bad {
            None => {
                let mut u = vec![0u32; n];
                let mut w = vec![0u32; n];
                for (j, is_d) in word {
                    if is_d {
                        w[j] += 1;
                    } else {
                        u[j] += 1;
                    }
                }
                *out.entry((u, w)).or_default() += c;
            }
            Some(i) => {
                let (a, b) = (word[i], word[i + 1]);
                let mut swapped = word.clone();
                swapped.swap(i, i + 1);
                todo.push((swapped, c.clone()));
                if a.1 && !b.1 && a.0 == b.0 {
                    let mut dropped = word.clone();
                    dropped.drain(i..i + 2);
                    todo.push((dropped, c));
                }
            }
        }
    }
    out.retain(|_, c| *c != BigInt::from(0));
    out
}

fn as_map(e: &WeylElement) -> BTreeMap<(Vec<u32>, Vec<u32>), BigInt> {
    e.terms().map(|(u, w, c)| ((u.clone(), w.clone()), c.clone())).collect()
}

fn exps(n: usize, max: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=max, n)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn monomial_products_match_rewriting(
        (n, u1, w1, u2, w2) in (1usize..=2).prop_flat_map(|n| (Just(n), exps(n, 3), exps(n, 3), exps(n, 3), exps(n, 3)))
    ) {
        let a = WeylElement::monomial(n, Z, u1.clone(), w1.clone(), 1);
        let b = WeylElement::monomial(n, Z, u2.clone(), w2.clone(), 1);
        let mut word = word_of(n, &u1, &w1);
        word.extend(word_of(n, &u2, &w2));
        prop_assert_eq!(as_map(&weyl_multiply(&a, &b).unwrap()), rewrite(n, word));
    }

    #[test]
    fn associativity(
        (n, e) in (1usize..=2).prop_flat_map(|n| (Just(n), prop::collection::vec(exps(n, 2), 6)))
    ) {
        let m = |i: usize| WeylElement::monomial(n, Z, e[2 * i].clone(), e[2 * i + 1].clone(), 1 + i as i64);
        let (a, b, c) = (m(0), m(1), m(2));
        let left = weyl_multiply(&weyl_multiply(&a, &b).unwrap(), &c).unwrap();
        let right = weyl_multiply(&a, &weyl_multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn modular_reduction_commutes_with_products(
        u in exps(1, 5), w in exps(1, 5), u2 in exps(1, 5), w2 in exps(1, 5), p in prop::sample::select(vec![2u64, 3, 5, 7])
    ) {
        let fp = CoefficientDomain::Modular(p);
        let over_z = weyl_multiply(
            &WeylElement::monomial(1, Z, u.clone(), w.clone(), 1),
            &WeylElement::monomial(1, Z, u2.clone(), w2.clone(), 1),
        ).unwrap();
        let over_p = weyl_multiply(
            &WeylElement::monomial(1, fp, u, w, 1),
            &WeylElement::monomial(1, fp, u2, w2, 1),
        ).unwrap();
        let reduced: BTreeMap<_, _> = as_map(&over_z)
            .into_iter()
            .map(|(k, c)| (k, ((c % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p)))
            .filter(|(_, c)| *c != BigInt::from(0))
            .collect();
        prop_assert_eq!(as_map(&over_p), reduced);
    }
}

#[test]
fn canonical_commutators() {
    let n = 3;
    for i in 0..n {
        for j in 0..n {
            let d = WeylElement::d(n, Z, i, 1);
            let x = WeylElement::x(n, Z, j, 1);
            let comm = weyl_multiply(&d, &x).unwrap().sub(&weyl_multiply(&x, &d).unwrap()).unwrap();
            let expected = if i == j { WeylElement::one(n, Z) } else { WeylElement::zero(n, Z) };
            assert_eq!(comm, expected, "[d{i}, x{j}]");
            let xi = WeylElement::x(n, Z, i, 1);
            assert!(weyl_multiply(&x, &xi).unwrap() == weyl_multiply(&xi, &x).unwrap());
        }
    }
}
