//! Graded shape of the `m`-shifted Koszul complex on the vertex monomials.
//!
//! With `s` generators of weight 1, the summand indexed by a subset `T` of
//! `{0..s}` is twisted by `m + |T|` and sits in degree `|T| - s`, so the
//! full-subset term twisted by `m + s` is in degree zero. The differential
//! sends `T` to `Σ_{i ∉ T} (-1)^{#{t ∈ T : t < i}} f_i · (T ∪ {i})`.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polytope::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KoszulError {
    #[error("the Koszul complex needs at least one generator")]
    NoGenerators,
    #[error("{0} generators is too many to index subsets")]
    TooManyGenerators(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulTerm {
    pub degree: i64,
    pub subset_size: usize,
    pub rank: usize,
    /// Twist of each summand, in the order of `subsets`.
    pub twists: Vec<i64>,
    pub subsets: Vec<Vec<usize>>,
}

/// `sign · f_generator` from summand `col` of one term to summand `row` of
/// the next.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialEntry {
    pub row: usize,
    pub col: usize,
    pub sign: i8,
    pub generator: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Differential {
    pub from_degree: i64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<DifferentialEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulData {
    pub generators: usize,
    pub generator_weights: Vec<i64>,
    pub shift: i64,
    /// Generator exponent vectors in `x_1..x_n, ∂_1..∂_n`.
    pub monomials: Vec<Vec<i64>>,
    pub terms: Vec<KoszulTerm>,
    pub differentials: Vec<Differential>,
}

pub fn koszul_data(vertices: &[Vertex], m: i64) -> Result<KoszulData, KoszulError> {
    let s = vertices.len();
    if s == 0 {
        return Err(KoszulError::NoGenerators);
    }
    if s > 20 {
        return Err(KoszulError::TooManyGenerators(s));
    }
    let subsets: Vec<Vec<Vec<usize>>> = (0..=s).map(|k| (0..s).combinations(k).collect()).collect();
    let terms = subsets
        .iter()
        .enumerate()
        .map(|(k, subs)| KoszulTerm {
            degree: k as i64 - s as i64,
            subset_size: k,
            rank: subs.len(),
            twists: vec![m + k as i64; subs.len()],
            subsets: subs.clone(),
        })
        .collect();
    let differentials = (0..s)
        .map(|k| {
            let index: BTreeMap<&Vec<usize>, usize> =
                subsets[k + 1].iter().enumerate().map(|(i, t)| (t, i)).collect();
            let mut entries = Vec::new();
            for (col, t) in subsets[k].iter().enumerate() {
                for i in (0..s).filter(|i| !t.contains(i)) {
                    let below = t.iter().filter(|&&x| x < i).count();
                    let mut target = t.clone();
                    target.push(i);
                    target.sort_unstable();
                    entries.push(DifferentialEntry {
                        row: index[&target],
                        col,
                        sign: if below % 2 == 0 { 1 } else { -1 },
                        generator: i,
                    });
                }
            }
            entries.sort_by_key(|e| (e.row, e.col));
            Differential {
                from_degree: k as i64 - s as i64,
                rows: subsets[k + 1].len(),
                cols: subsets[k].len(),
                entries,
            }
        })
        .collect();
    Ok(KoszulData {
        generators: s,
        generator_weights: vec![1; s],
        shift: m,
        monomials: vertices.iter().map(|v| v.0.clone()).collect(),
        terms,
        differentials,
    })
}

/// Commutative polynomial: exponent vector to coefficient.
type Poly = BTreeMap<Vec<i64>, i64>;

fn poly_add_term(p: &mut Poly, exps: Vec<i64>, c: i64) {
    let entry = p.entry(exps.clone()).or_insert(0);
    *entry += c;
    if *entry == 0 {
        p.remove(&exps);
    }
}

fn matrix_of(diff: &Differential, monomials: &[Vec<i64>]) -> Vec<Vec<Poly>> {
    let mut m = vec![vec![Poly::new(); diff.cols]; diff.rows];
    for e in &diff.entries {
        poly_add_term(&mut m[e.row][e.col], monomials[e.generator].clone(), e.sign as i64);
    }
    m
}

/// Every composite of consecutive differentials vanishes as a matrix of
/// commutative polynomials in the `2n` symbols.
pub fn check_d_squared(data: &KoszulData) -> bool {
    data.differentials.windows(2).all(|w| {
        let first = matrix_of(&w[0], &data.monomials);
        let second = matrix_of(&w[1], &data.monomials);
        (0..w[1].rows).all(|i| {
            (0..w[0].cols).all(|j| {
                let mut acc = Poly::new();
                for (k, first_row) in first.iter().enumerate() {
                    for (ea, ca) in &second[i][k] {
                        for (eb, cb) in &first_row[j] {
                            let exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                            poly_add_term(&mut acc, exps, ca * cb);
                        }
                    }
                }
                acc.is_empty()
            })
        })
    })
}
