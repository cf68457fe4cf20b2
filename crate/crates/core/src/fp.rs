//! Small prime fields: primality, residues, signed lifts.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut k = 3u64;
    while k.saturating_mul(k) <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

pub fn check_prime(p: u64) -> Result<(), FpError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(FpError::NotPrime(p))
    }
}

/// `Some((ell, k))` with `q = ell^k`, `k ≥ 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let ell = (2..=q).find(|k| q.is_multiple_of(*k))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(ell) {
        rest /= ell;
        k += 1;
    }
    (rest == 1).then_some((ell, k))
}

/// The residue of `x` in `{0, .., p-1}`.
pub fn reduce(x: i64, p: u64) -> u64 {
    (x as i128).rem_euclid(p as i128) as u64
}

/// The representative of `x mod p` in `[-p/2, p/2)`.
pub fn signed_lift(x: u64, p: u64) -> i64 {
    let x = x % p;
    if 2 * x >= p {
        x as i64 - p as i64
    } else {
        x as i64
    }
}

/// `base^exp`, or `None` past `u64::MAX`.
pub fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// An element of `𝔤*(𝔽_p) ≅ 𝔽_p^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FpWeight {
    pub coords: Vec<u64>,
    pub p: u64,
}

impl FpWeight {
    pub fn new(coords: Vec<u64>, p: u64) -> Self {
        FpWeight {
            coords: coords.into_iter().map(|x| x % p).collect(),
            p,
        }
    }

    pub fn from_signed(coords: &[i64], p: u64) -> Self {
        FpWeight {
            coords: coords.iter().map(|&x| reduce(x, p)).collect(),
            p,
        }
    }

    pub fn zero(d: usize, p: u64) -> Self {
        FpWeight { coords: vec![0; d], p }
    }

    pub fn signed(&self) -> Vec<i64> {
        self.coords.iter().map(|&x| signed_lift(x, self.p)).collect()
    }

    /// `self + k · other`.
    pub fn add_scaled(&self, other: &FpWeight, k: u64) -> FpWeight {
        debug_assert_eq!(self.p, other.p);
        let p = self.p;
        let k = k % p;
        FpWeight {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| ((*a as u128 + k as u128 * *b as u128) % p as u128) as u64)
                .collect(),
            p,
        }
    }

    /// `self - k · other`.
    pub fn sub_scaled(&self, other: &FpWeight, k: u64) -> FpWeight {
        let k = k % self.p;
        self.add_scaled(other, (self.p - k) % self.p)
    }
}

impl fmt::Display for FpWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.signed().iter().join(","))
    }
}
