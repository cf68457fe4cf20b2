//! GIT semistability on `T*𝔸^n = 𝔸^{2n}` and the unstable-locus check.
//!
//! A point is semistable iff some monomial of weight `mδ`, `m > 0`, is
//! nonzero there, which depends only on the support of the point. Over ℚ
//! this is feasibility of `Σ_j (u_j - u_{n+j}) a_j = δ` with `u ≥ 0`
//! supported on the support, decided exactly.

pub mod koszul;
pub mod lp;

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fp::{checked_pow, prime_power, FpError};
use crate::lattice::{Character, LatticeError, TorusAction};
use crate::polytope::{vertices_of, PolytopeError, Vertex};

pub use koszul::{koszul_data, KoszulData, KoszulError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabilityError {
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("enumeration of {q}^{exp} points exceeds the guard of {guard}")]
    Guard { q: u64, exp: usize, guard: u64 },
    #[error("2n = {0} coordinates do not fit a support bitmask")]
    TooManyCoordinates(usize),
}

/// Subset of `{0..2n}` (0-based) where a point is nonzero, as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SupportPattern(pub u64);

impl SupportPattern {
    pub fn full(n2: usize) -> Self {
        SupportPattern(if n2 == 64 { u64::MAX } else { (1u64 << n2) - 1 })
    }

    pub fn from_indices(idx: &[usize]) -> Self {
        SupportPattern(idx.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn of_point(point: &[u64]) -> Self {
        SupportPattern(
            point
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .fold(0, |m, (i, _)| m | (1 << i)),
        )
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset_of(&self, other: &SupportPattern) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(&self, n2: usize) -> Vec<usize> {
        (0..n2).filter(|&i| self.contains(i)).collect()
    }
}

/// Is there `u ≥ 0` on `S` with `[Aᵀ | -Aᵀ] u = δ`?
pub fn support_semistable(action: &TorusAction, delta: &Character, s: SupportPattern) -> bool {
    let n = action.n();
    let cols = s.indices(2 * n);
    let m: Vec<Vec<i64>> = (0..action.d())
        .map(|k| {
            cols.iter()
                .map(|&c| {
                    if c < n {
                        action.weight(c)[k]
                    } else {
                        -action.weight(c - n)[k]
                    }
                })
                .collect()
        })
        .collect();
    lp::feasible_point(&m, &delta.0).is_some()
}

/// Element labels of `𝔽_q`: `0` is zero, `1..q` are the nonzero elements.
/// Vanishing of monomials only sees which labels are zero.
fn check_guard(n: usize, q: u64, guard: u64) -> Result<(), StabilityError> {
    if prime_power(q).is_none() {
        return Err(FpError::NotPrimePower(q).into());
    }
    if 2 * n > 63 {
        return Err(StabilityError::TooManyCoordinates(2 * n));
    }
    match checked_pow(q, 2 * n) {
        Some(t) if t <= guard => Ok(()),
        _ => Err(StabilityError::Guard { q, exp: 2 * n, guard }),
    }
}

fn points(n2: usize, q: u64) -> impl Iterator<Item = Vec<u64>> {
    (0..n2).map(move |_| 0..q).multi_cartesian_product()
}

/// Points of `𝔽_q^{2n}` (as labels) whose support is not semistable.
pub fn unstable_table(
    action: &TorusAction,
    delta: &Character,
    q: u64,
    guard: u64,
) -> Result<BTreeSet<Vec<u64>>, StabilityError> {
    let n = action.n();
    check_guard(n, q, guard)?;
    action.check_character(delta)?;
    let mut memo: BTreeMap<SupportPattern, bool> = BTreeMap::new();
    Ok(points(2 * n, q)
        .filter(|pt| {
            let s = SupportPattern::of_point(pt);
            !*memo
                .entry(s)
                .or_insert_with(|| support_semistable(action, delta, s))
        })
        .collect())
}

/// Points where every monomial `x^{v_x} ∂^{v_∂}` vanishes.
pub fn common_zeros_of_monomials(vertices: &[Vertex], n: usize, q: u64) -> BTreeSet<Vec<u64>> {
    let masks: Vec<u64> = vertices.iter().map(Vertex::support_mask).collect();
    points(2 * n, q)
        .filter(|pt| {
            let s = SupportPattern::of_point(pt).0;
            masks.iter().all(|&m| m & !s != 0)
        })
        .collect()
}

/// The vanishing locus of the given monomials equals the unstable locus.
pub fn check_unstable_generators_with(
    action: &TorusAction,
    delta: &Character,
    vertices: &[Vertex],
    q: u64,
    guard: u64,
) -> Result<bool, StabilityError> {
    let unstable = unstable_table(action, delta, q, guard)?;
    Ok(common_zeros_of_monomials(vertices, action.n(), q) == unstable)
}

pub fn check_unstable_generators(
    action: &TorusAction,
    delta: &Character,
    q: u64,
    guard: u64,
) -> Result<bool, StabilityError> {
    let vertices = vertices_of(action, delta)?;
    check_unstable_generators_with(action, delta, &vertices, q, guard)
}
