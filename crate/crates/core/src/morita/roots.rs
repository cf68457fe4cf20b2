//! Common roots over `𝔽_p` of a family of Euler factor systems.
//!
//! A system vanishes at `ξ` exactly when some coordinate `ξ_j` hits one of
//! its roots `R_j mod p`, so the common-root set is
//! `⋂_i ⋃_{j, r ∈ R_{i,j}} { ξ_j = r }`: a finite union of coordinate boxes.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fp::{checked_pow, reduce};
use crate::weyl::{eval_unchecked, EulerFactorSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("enumeration of {points} points exceeds the guard of {guard}; use common_roots_solve")]
pub struct GuardExceeded {
    pub points: String,
    pub guard: u64,
}

/// Union of boxes in `𝔽_p^n`; `None` marks a coordinate free to take any value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSet {
    pub n: usize,
    pub p: u64,
    pub boxes: BTreeSet<Vec<Option<u64>>>,
}

impl RootSet {
    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, xi: &[u64]) -> bool {
        self.boxes
            .iter()
            .any(|b| b.iter().zip(xi).all(|(c, x)| c.is_none_or(|c| c == *x)))
    }

    /// Visits every point of every box. Points covered by several boxes are
    /// visited more than once.
    pub fn for_each_point(&self, mut f: impl FnMut(&[u64])) {
        let mut point = vec![0u64; self.n];
        for b in &self.boxes {
            let free: Vec<usize> = (0..self.n).filter(|&j| b[j].is_none()).collect();
            for (j, c) in b.iter().enumerate() {
                if let Some(c) = c {
                    point[j] = *c;
                }
            }
            if free.is_empty() {
                f(&point);
                continue;
            }
            for values in free.iter().map(|_| 0..self.p).multi_cartesian_product() {
                for (&j, v) in free.iter().zip(values) {
                    point[j] = v;
                }
                f(&point);
            }
        }
    }

    pub fn points(&self) -> BTreeSet<Vec<u64>> {
        let mut out = BTreeSet::new();
        self.for_each_point(|x| {
            out.insert(x.to_vec());
        });
        out
    }
}

/// Enumerates all of `𝔽_p^n` and keeps the common zeros.
pub fn common_roots_brute(
    systems: &[EulerFactorSystem],
    n: usize,
    p: u64,
    guard: u64,
) -> Result<BTreeSet<Vec<u64>>, GuardExceeded> {
    match checked_pow(p, n) {
        Some(total) if total <= guard => {}
        _ => {
            return Err(GuardExceeded {
                points: format!("{}^{}", p, n),
                guard,
            })
        }
    }
    let mut out = BTreeSet::new();
    if n == 0 {
        if systems.iter().all(|s| eval_unchecked(s, &[], p) == 0) {
            out.insert(Vec::new());
        }
        return Ok(out);
    }
    for xi in (0..n).map(|_| 0..p).multi_cartesian_product() {
        if systems.iter().all(|s| eval_unchecked(s, &xi, p) == 0) {
            out.insert(xi);
        }
    }
    Ok(out)
}

/// Pinning search: each system is either already satisfied by a pinned
/// coordinate, or pins one of its unpinned coordinates to one of its roots.
/// Coordinates never pinned stay free.
pub fn common_roots_solve(systems: &[EulerFactorSystem], n: usize, p: u64) -> RootSet {
    let reduced: Vec<Vec<Vec<u64>>> = systems
        .iter()
        .map(|s| {
            s.roots
                .iter()
                .map(|rs| rs.iter().map(|&r| reduce(r, p)).sorted().dedup().collect())
                .collect()
        })
        .collect();
    let mut boxes = BTreeSet::new();
    let mut assignment = vec![None; n];
    pin(&reduced, 0, &mut assignment, &mut boxes);
    RootSet { n, p, boxes }
}

fn pin(
    systems: &[Vec<Vec<u64>>],
    i: usize,
    assignment: &mut Vec<Option<u64>>,
    out: &mut BTreeSet<Vec<Option<u64>>>,
) {
    let Some(sys) = systems.get(i) else {
        out.insert(assignment.clone());
        return;
    };
    let satisfied = sys
        .iter()
        .zip(assignment.iter())
        .any(|(rs, a)| a.is_some_and(|v| rs.binary_search(&v).is_ok()));
    if satisfied {
        pin(systems, i + 1, assignment, out);
        return;
    }
    for (j, rs) in sys.iter().enumerate() {
        if assignment[j].is_some() {
            continue;
        }
        for &r in rs {
            assignment[j] = Some(r);
            pin(systems, i + 1, assignment, out);
        }
        assignment[j] = None;
    }
}
