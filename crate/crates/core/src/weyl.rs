//! Weyl-algebra arithmetic on `k⟨x_1..x_n, ∂_1..∂_n⟩` and the Euler-operator
//! factorisations of `f̃ᵃ g̃ᵃ` and `g̃ᵃ f̃ᵃ`.
//!
//! Elements are stored in normal order (every `x` left of every `∂`). A
//! product of a vertex monomial with its partner lands in the commutative
//! subalgebra `k[E_1..E_n]`, `E_j = x_j ∂_j`, where it splits into linear
//! factors `E_j - r`. [`EulerFactorSystem`] keeps just those roots.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fp::{check_prime, reduce, FpError};
use crate::polytope::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("coefficient domains differ: {0:?} vs {1:?}")]
    DomainMismatch(CoefficientDomain, CoefficientDomain),
    #[error("number of variables differ: {0} vs {1}")]
    ArityMismatch(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientDomain {
    Integer,
    Modular(u64),
}

type Exponents = (Vec<u32>, Vec<u32>);

/// `Σ c_{u,w} x^u ∂^w` in normal order. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement {
    n: usize,
    domain: CoefficientDomain,
    terms: BTreeMap<Exponents, BigInt>,
}

impl WeylElement {
    pub fn zero(n: usize, domain: CoefficientDomain) -> Self {
        WeylElement {
            n,
            domain,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, domain: CoefficientDomain, c: impl Into<BigInt>) -> Self {
        Self::monomial(n, domain, vec![0; n], vec![0; n], c)
    }

    pub fn one(n: usize, domain: CoefficientDomain) -> Self {
        Self::constant(n, domain, 1)
    }

    pub fn monomial(
        n: usize,
        domain: CoefficientDomain,
        x_exps: Vec<u32>,
        d_exps: Vec<u32>,
        c: impl Into<BigInt>,
    ) -> Self {
        assert_eq!(x_exps.len(), n);
        assert_eq!(d_exps.len(), n);
        let mut e = Self::zero(n, domain);
        e.add_term((x_exps, d_exps), c.into());
        e
    }

    /// `x_j^power`.
    pub fn x(n: usize, domain: CoefficientDomain, j: usize, power: u32) -> Self {
        let mut u = vec![0; n];
        u[j] = power;
        Self::monomial(n, domain, u, vec![0; n], 1)
    }

    /// `∂_j^power`.
    pub fn d(n: usize, domain: CoefficientDomain, j: usize, power: u32) -> Self {
        let mut w = vec![0; n];
        w[j] = power;
        Self::monomial(n, domain, vec![0; n], w, 1)
    }

    /// `E_j = x_j ∂_j`.
    pub fn euler(n: usize, domain: CoefficientDomain, j: usize) -> Self {
        let mut u = vec![0; n];
        u[j] = 1;
        Self::monomial(n, domain, u.clone(), u, 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> CoefficientDomain {
        self.domain
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Vec<u32>, &BigInt)> {
        self.terms.iter().map(|((u, w), c)| (u, w, c))
    }

    pub fn coefficient(&self, x_exps: &[u32], d_exps: &[u32]) -> BigInt {
        self.terms
            .get(&(x_exps.to_vec(), d_exps.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn normalize(&self, c: BigInt) -> BigInt {
        match self.domain {
            CoefficientDomain::Integer => c,
            CoefficientDomain::Modular(p) => c.mod_floor(&BigInt::from(p)),
        }
    }

    fn add_term(&mut self, key: Exponents, c: BigInt) {
        let merged = match self.terms.remove(&key) {
            Some(prev) => prev + c,
            None => c,
        };
        let merged = self.normalize(merged);
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    fn compatible(&self, other: &Self) -> Result<(), WeylError> {
        if self.domain != other.domain {
            return Err(WeylError::DomainMismatch(self.domain, other.domain));
        }
        if self.n != other.n {
            return Err(WeylError::ArityMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, WeylError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, WeylError> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        let mut out = Self::zero(self.n, self.domain);
        for (key, c) in &self.terms {
            out.add_term(key.clone(), c * &k);
        }
        out
    }

    /// Whether every term is of the form `x^u ∂^u`, i.e. the element lies in
    /// the span of the `x^u ∂^u`, which is `k[E_1..E_n]`.
    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|(u, w)| u == w)
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut rendered = self.terms.iter().rev().map(|((u, w), c)| {
            let mut factors = Vec::new();
            for (j, &e) in u.iter().enumerate() {
                if e == 1 {
                    factors.push(format!("x{}", j + 1));
                } else if e > 1 {
                    factors.push(format!("x{}^{}", j + 1, e));
                }
            }
            for (j, &e) in w.iter().enumerate() {
                if e == 1 {
                    factors.push(format!("d{}", j + 1));
                } else if e > 1 {
                    factors.push(format!("d{}^{}", j + 1, e));
                }
            }
            match (factors.is_empty(), c.is_one()) {
                (true, _) => c.to_string(),
                (false, true) => factors.join("*"),
                (false, false) => format!("{}*{}", c, factors.join("*")),
            }
        });
        write!(f, "{}", rendered.join(" + "))
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Normal-ordered product `a · b`, using
/// `∂^w x^u = Σ_k C(w,k) C(u,k) k! x^{u-k} ∂^{w-k}` in each coordinate.
pub fn weyl_multiply(a: &WeylElement, b: &WeylElement) -> Result<WeylElement, WeylError> {
    a.compatible(b)?;
    let n = a.n;
    let mut out = WeylElement::zero(n, a.domain);
    for ((u1, w1), c1) in &a.terms {
        for ((u2, w2), c2) in &b.terms {
            if n == 0 {
                out.add_term((vec![], vec![]), c1 * c2);
                continue;
            }
            // Per coordinate, the list of (k, coefficient) contractions.
            let choices: Vec<Vec<(u32, BigInt)>> = (0..n)
                .map(|j| {
                    (0..=w1[j].min(u2[j]))
                        .map(|k| (k, binomial(w1[j], k) * binomial(u2[j], k) * factorial(k)))
                        .collect()
                })
                .collect();
            for pick in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
                let mut coeff = c1 * c2;
                let mut u = Vec::with_capacity(n);
                let mut w = Vec::with_capacity(n);
                for (j, (k, c)) in pick.iter().enumerate() {
                    coeff *= c;
                    u.push(u1[j] + u2[j] - k);
                    w.push(w1[j] - k + w2[j]);
                }
                out.add_term((u, w), coeff);
            }
        }
    }
    Ok(out)
}

/// Per-coordinate multisets of integer roots, standing for
/// `∏_j ∏_{r ∈ R_j} (E_j - r)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EulerFactorSystem {
    pub roots: Vec<Vec<i64>>,
}

impl EulerFactorSystem {
    pub fn empty(n: usize) -> Self {
        EulerFactorSystem { roots: vec![Vec::new(); n] }
    }

    pub fn from_roots(mut roots: Vec<Vec<i64>>) -> Self {
        roots.iter_mut().for_each(|r| r.sort_unstable());
        EulerFactorSystem { roots }
    }

    pub fn n(&self) -> usize {
        self.roots.len()
    }

    /// Coordinates carrying at least one factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| !self.roots[j].is_empty()).collect()
    }

    pub fn factor_count(&self) -> usize {
        self.roots.iter().map(Vec::len).sum()
    }

    /// Expands the product as a Weyl element, multiplying the linear
    /// factors with [`weyl_multiply`].
    pub fn to_weyl(&self, domain: CoefficientDomain) -> WeylElement {
        let n = self.n();
        let mut acc = WeylElement::one(n, domain);
        for (j, roots) in self.roots.iter().enumerate() {
            for &r in roots {
                let factor = WeylElement::euler(n, domain, j)
                    .sub(&WeylElement::constant(n, domain, r))
                    .expect("same domain");
                acc = weyl_multiply(&acc, &factor).expect("same domain");
            }
        }
        acc
    }
}

impl fmt::Display for EulerFactorSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .roots
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_empty())
            .map(|(j, r)| format!("R{}={{{}}}", j + 1, r.iter().join(",")))
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// `x^m ∂^m = ∏_{k=0}^{m-1} (E - k)`: roots `{0, .., m-1}`.
pub fn normal_order_xd(m: u32) -> EulerFactorSystem {
    EulerFactorSystem::from_roots(vec![(0..m as i64).collect()])
}

/// `∂^m x^m = ∏_{k=1}^{m} (E + k)`: roots `{-1, .., -m}`.
pub fn normal_order_dx(m: u32) -> EulerFactorSystem {
    EulerFactorSystem::from_roots(vec![(1..=m as i64).map(|k| -k).collect()])
}

/// Roots of `f̃ᵃ_v g̃ᵃ_v`: `{0..a·v_j - 1} ∪ {-1..-a·v_{n+j}}` per coordinate.
pub fn factor_system_fg(v: &Vertex, a: u32) -> EulerFactorSystem {
    let n = v.n();
    EulerFactorSystem::from_roots(
        (0..n)
            .map(|j| {
                let x = (a * v.x_exponent(j)) as i64;
                let d = (a * v.d_exponent(j)) as i64;
                (0..x).chain((1..=d).map(|k| -k)).collect()
            })
            .collect(),
    )
}

/// Roots of `g̃ᵃ_v f̃ᵃ_v`: `{-1..-a·v_j} ∪ {0..a·v_{n+j} - 1}` per coordinate.
pub fn factor_system_gf(v: &Vertex, a: u32) -> EulerFactorSystem {
    let n = v.n();
    EulerFactorSystem::from_roots(
        (0..n)
            .map(|j| {
                let x = (a * v.x_exponent(j)) as i64;
                let d = (a * v.d_exponent(j)) as i64;
                (1..=x).map(|k| -k).chain(0..d).collect()
            })
            .collect(),
    )
}

/// `∏_j ∏_{r ∈ R_j} (ξ_j - r) mod p`.
pub fn evaluate_factor_system(sys: &EulerFactorSystem, xi: &[u64], p: u64) -> Result<u64, FpError> {
    check_prime(p)?;
    Ok(eval_unchecked(sys, xi, p))
}

pub(crate) fn eval_unchecked(sys: &EulerFactorSystem, xi: &[u64], p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    for (roots, &x) in sys.roots.iter().zip(xi) {
        for &r in roots {
            let diff = (x % p + p - reduce(r, p)) % p;
            acc = ((acc as u128 * diff as u128) % p as u128) as u64;
            if acc == 0 {
                return 0;
            }
        }
    }
    acc
}

/// `f̃ᵃ_v = ∏ x_j^{a v_j} ∏ ∂_j^{a v_{n+j}}`, already normal ordered.
pub fn f_tilde(v: &Vertex, a: u32, domain: CoefficientDomain) -> WeylElement {
    let n = v.n();
    WeylElement::monomial(
        n,
        domain,
        (0..n).map(|j| a * v.x_exponent(j)).collect(),
        (0..n).map(|j| a * v.d_exponent(j)).collect(),
        1,
    )
}

/// `g̃ᵃ_v = ∏ ∂_j^{a v_j} ∏ x_j^{a v_{n+j}}`, normal ordered by multiplication.
pub fn g_tilde(v: &Vertex, a: u32, domain: CoefficientDomain) -> WeylElement {
    let n = v.n();
    let ds = WeylElement::monomial(n, domain, vec![0; n], (0..n).map(|j| a * v.x_exponent(j)).collect(), 1);
    let xs = WeylElement::monomial(n, domain, (0..n).map(|j| a * v.d_exponent(j)).collect(), vec![0; n], 1);
    weyl_multiply(&ds, &xs).expect("same domain")
}
