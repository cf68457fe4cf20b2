//! Lattice bookkeeping for a subtorus `G ⊂ 𝔾_m^n` acting on `𝔸^n`.
//!
//! A [`TorusAction`] is given by an `n × d` integer matrix `A` whose columns
//! are a basis of the cocharacter lattice of `G` inside `ℤ^n`. Row `i` of `A`
//! is the weight `a_i` by which `G` scales the coordinate `x_i`; the
//! conjugate coordinate `∂_i` has weight `-a_i`.

pub mod intmat;

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use intmat::ZMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension d = {d} must satisfy 0 < d < n = {n}")]
    BadDimension { n: usize, d: usize },
    #[error("row {row} of A has {found} entries, expected d = {d}")]
    RaggedMatrix { row: usize, found: usize, d: usize },
    #[error("A has rank {rank} over Q, expected full column rank d = {d}")]
    RankDeficient { rank: usize, d: usize },
    #[error(
        "the columns of A span a non-saturated sublattice (Smith invariant factors {factors:?}); \
         the cokernel has torsion"
    )]
    Torsion { factors: Vec<String> },
    #[error("integer overflow while deriving {what}")]
    Overflow { what: &'static str },
    #[error("character has {found} coordinates, expected {expected}")]
    CharacterLength { found: usize, expected: usize },
}

/// An element of `X^*(G) ≅ ℤ^d`, in the basis dual to the columns of `A`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character(pub Vec<i64>);

/// An element of `X^*(T̃) ≅ ℤ^{2n}`: the first `n` coordinates pair with the
/// `x_i`, the last `n` with the `∂_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TildeCharacter(pub Vec<i64>);

/// A cocharacter of `G` together with its image `A · c` in `ℤ^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cocharacter {
    pub coords: Vec<i64>,
    pub embedded: Vec<i64>,
}

impl Character {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scaled(&self, k: i64) -> Character {
        Character(self.0.iter().map(|&x| x * k).collect())
    }

    pub fn pair(&self, c: &Cocharacter) -> i64 {
        self.0.iter().zip(&c.coords).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

/// Which coordinates a subset `I` constrains when forming `X_*(G) ∩ X_*(T_I)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallConvention {
    /// `(A c)_i = 0` for `i ∈ I`. Rank-one intersections arise at `|I| = d - 1`.
    Indexed,
    /// `(A c)_i = 0` for `i ∉ I`.
    Complement,
}

/// A wall `W_I = { χ : ⟨χ, c⟩ = 0 }` where `c` generates a rank-one
/// intersection `X_*(G) ∩ X_*(T_I)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wall {
    /// 0-based index set `I`.
    pub index_set: Vec<usize>,
    pub generator: Cocharacter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusAction {
    n: usize,
    d: usize,
    /// `n × d`; row `i` is the weight `a_i`.
    weights: Vec<Vec<i64>>,
    /// `(n - d) × n`, in Hermite normal form; `pi · A = 0`.
    pi: Vec<Vec<i64>>,
    /// `d × n` with `left_inverse · A = I_d`.
    left_inverse: Vec<Vec<i64>>,
}

/// Validates `A` and derives the cokernel map `pi`.
pub fn build_action(a: &[Vec<i64>]) -> Result<TorusAction, LatticeError> {
    let n = a.len();
    let d = a.first().map_or(0, Vec::len);
    if d == 0 || d >= n {
        return Err(LatticeError::BadDimension { n, d });
    }
    if let Some((row, r)) = a.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(LatticeError::RaggedMatrix { row, found: r.len(), d });
    }
    let am = ZMatrix::from_i64(a, d);
    let hnf = am.hermite();
    if hnf.rank() != d {
        return Err(LatticeError::RankDeficient { rank: hnf.rank(), d });
    }
    let factors = am.invariant_factors();
    if factors.iter().any(|f| !f.is_one()) {
        return Err(LatticeError::Torsion {
            factors: factors.iter().map(ToString::to_string).collect(),
        });
    }
    // Saturated and rank d: the top block of the HNF is the identity, so the
    // top rows of U are an integral left inverse.
    let top: Vec<usize> = (0..d).collect();
    debug_assert_eq!(hnf.h.select_rows(&top), ZMatrix::identity(d));
    let left_inverse = hnf
        .u
        .select_rows(&top)
        .to_i64()
        .ok_or(LatticeError::Overflow { what: "left inverse" })?;
    let pi = am
        .left_kernel()
        .to_i64()
        .ok_or(LatticeError::Overflow { what: "cokernel map" })?;
    debug_assert_eq!(pi.len(), n - d);
    Ok(TorusAction {
        n,
        d,
        weights: a.to_vec(),
        pi,
        left_inverse,
    })
}

impl TorusAction {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The matrix `A`, row-major.
    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.weights
    }

    /// Weight `a_i` of coordinate `x_i`.
    pub fn weight(&self, i: usize) -> &[i64] {
        &self.weights[i]
    }

    pub fn pi(&self) -> &[Vec<i64>] {
        &self.pi
    }

    pub fn left_inverse(&self) -> &[Vec<i64>] {
        &self.left_inverse
    }

    pub fn check_character(&self, chi: &Character) -> Result<(), LatticeError> {
        if chi.dim() != self.d {
            return Err(LatticeError::CharacterLength {
                found: chi.dim(),
                expected: self.d,
            });
        }
        Ok(())
    }

    /// `A · c`.
    pub fn embed(&self, coords: &[i64]) -> Cocharacter {
        let embedded = self
            .weights
            .iter()
            .map(|row| row.iter().zip(coords).map(|(a, c)| a * c).sum())
            .collect();
        Cocharacter {
            coords: coords.to_vec(),
            embedded,
        }
    }

    /// The weight of `Σ_i u_i a_i` for an exponent difference vector `u ∈ ℤ^n`.
    pub fn weight_of(&self, u: &[i64]) -> Character {
        let mut out = vec![0i64; self.d];
        for (ui, row) in u.iter().zip(&self.weights) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += ui * a;
            }
        }
        Character(out)
    }

    /// `χ̃|_G = Σ_i (χ̃_i - χ̃_{n+i}) a_i`.
    pub fn restrict_tilde_character(&self, chi: &TildeCharacter) -> Character {
        assert_eq!(chi.0.len(), 2 * self.n, "tilde character has wrong length");
        let u: Vec<i64> = (0..self.n).map(|i| chi.0[i] - chi.0[self.n + i]).collect();
        self.weight_of(&u)
    }

    /// Unimodularity of `pi`: every nonzero maximal minor is `±1`.
    pub fn is_unimodular(&self) -> bool {
        let k = self.n - self.d;
        let pim = ZMatrix::from_i64(&self.pi, self.n);
        (0..self.n).combinations(k).all(|cols| {
            let det = pim.select_cols(&cols).det();
            det.is_zero() || det.abs().is_one()
        })
    }

    /// Rank of `{ c ∈ ℤ^d : (A c)_i = 0 for i ∈ constrained }` and, when the
    /// rank is one, its primitive generator with first nonzero entry positive.
    pub fn cocharacter_intersection(&self, constrained: &[usize]) -> (usize, Option<Cocharacter>) {
        let sub = ZMatrix::from_i64(&self.weights, self.d).select_rows(constrained);
        let ker = sub.right_kernel();
        let rank = ker.nrows();
        if rank != 1 {
            return (rank, None);
        }
        let mut g: Vec<BigInt> = ker.row(0).to_vec();
        if g.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            g.iter_mut().for_each(|x| *x = -&*x);
        }
        let coords: Vec<i64> = g.iter().map(|x| x.to_i64().expect("generator fits i64")).collect();
        (1, Some(self.embed(&coords)))
    }

    /// Every wall `W_I`, in order of increasing `I` (by size, then lexicographic).
    pub fn walls(&self, convention: WallConvention) -> Vec<Wall> {
        let mut out = Vec::new();
        for size in 0..=self.n {
            for index_set in (0..self.n).combinations(size) {
                let constrained: Vec<usize> = match convention {
                    WallConvention::Indexed => index_set.clone(),
                    WallConvention::Complement => {
                        (0..self.n).filter(|i| !index_set.contains(i)).collect()
                    }
                };
                if let (1, Some(generator)) = self.cocharacter_intersection(&constrained) {
                    out.push(Wall { index_set, generator });
                }
            }
        }
        out
    }

    /// `δ` avoids every wall.
    pub fn is_smooth_parameter(&self, delta: &Character) -> bool {
        self.walls(WallConvention::Indexed)
            .iter()
            .all(|w| delta.pair(&w.generator) != 0)
    }

    /// Wall condition plus: `δ` is not in the `ℤ`-span of `{a_i}_{i ∈ I}` for
    /// any `|I| < d`.
    pub fn is_admissible_parameter(&self, delta: &Character) -> bool {
        if !self.is_smooth_parameter(delta) {
            return false;
        }
        let target: Vec<BigInt> = delta.0.iter().map(|&x| BigInt::from(x)).collect();
        let am = ZMatrix::from_i64(&self.weights, self.d);
        (0..self.d).all(|size| {
            (0..self.n)
                .combinations(size)
                .all(|idx| !am.select_rows(&idx).row_span_contains(&target))
        })
    }
}
