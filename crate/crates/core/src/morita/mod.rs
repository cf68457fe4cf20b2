//! Localization certificates.
//!
//! For a smooth `δ` with vertices `v_1..v_s` of `P_δ`, the weight `λ` is
//! obstructed in direction `gf` at power `a` when some common root `ξ` of
//! `{g̃ᵃ_{v_i} f̃ᵃ_{v_i}}_i` has `μ^∨_ξ = λ`, and in direction `fg` when some
//! common root of `{f̃ᵃ_{v_i} g̃ᵃ_{v_i}}_i` has `μ^∨_ξ = λ + a·dδ`. A weight
//! with no obstruction for every `a ∈ 1..=s` is certified directly; the chain
//! strategy instead asks for no obstruction at power 1 for every shifted
//! weight `λ + b·dδ`, `b ∈ 0..s`, and composes the single steps.
//!
//! Certification is sufficient only: a refusal means "not certified".

pub mod bounds;
pub mod roots;
mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::fp::{checked_pow, is_prime, reduce, FpError, FpWeight};
use crate::lattice::{Character, LatticeError, TorusAction};
use crate::polytope::{n_stats, vertices_of, PolytopeError, Vertex};
use crate::weyl::{factor_system_fg, factor_system_gf, EulerFactorSystem};

pub use roots::{common_roots_brute, common_roots_solve, GuardExceeded, RootSet};
pub use verify::{verify_certificate, Verification, VerificationMethod};

pub const CERTIFICATE_SCHEMA: &str = "hyperloc/certificate/v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("delta = {0} is not a smooth parameter (it lies on a wall)")]
    NotSmooth(Character),
    #[error("weight has {found} coordinates, expected {expected}")]
    WeightLength { found: usize, expected: usize },
    #[error("weight is reduced mod {found}, expected mod {expected}")]
    WeightModulus { found: u64, expected: u64 },
    #[error(transparent)]
    Guard(#[from] GuardExceeded),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `g̃ᵃ f̃ᵃ`, obstructing `Λ ≤ Λδᵃ`.
    Gf,
    /// `f̃ᵃ g̃ᵃ`, obstructing `Λδᵃ ≤ Λ`.
    Fg,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Gf => "gf",
            Direction::Fg => "fg",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Direct,
    Chain,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Direct => "direct",
            Strategy::Chain => "chain",
        })
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Strategy::Direct),
            "chain" => Ok(Strategy::Chain),
            other => Err(format!("unknown strategy `{other}` (expected direct or chain)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub a: u32,
    pub direction: Direction,
    pub xi: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadSet {
    pub p: u64,
    pub a_max: u32,
    /// Bad weight (residues) to one witness per `(a, direction)`.
    pub elements: BTreeMap<Vec<u64>, Vec<Witness>>,
}

impl BadSet {
    pub fn contains(&self, lambda: &FpWeight) -> bool {
        self.elements.contains_key(&lambda.coords)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn weights(&self) -> impl Iterator<Item = FpWeight> + '_ {
        self.elements.keys().map(|k| FpWeight::new(k.clone(), self.p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRelation {
    /// `Λ ≤ Λδ` certified.
    pub leq: bool,
    /// `Λδ ≤ Λ` certified.
    pub geq: bool,
}

/// The claim that no common root of the `direction` systems at `power` maps
/// to `target` under `μ^∨`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertStep {
    pub power: u32,
    /// Chain step index `b`; always 0 for the direct strategy.
    pub shift: u32,
    pub direction: Direction,
    pub target: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub n_delta: u64,
    pub bound_m: String,
    pub p_exceeds_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub input_hash: String,
    pub a: Vec<Vec<i64>>,
    pub delta: Vec<i64>,
    pub p: u64,
    pub lambda: Vec<u64>,
    pub lambda_signed: Vec<i64>,
    pub strategy: Strategy,
    pub vertex_count: usize,
    pub steps: Vec<CertStep>,
    pub bound_check: BoundCheck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refusal {
    pub strategy: Strategy,
    pub lambda: Vec<u64>,
    pub lambda_signed: Vec<i64>,
    pub failed_step: CertStep,
    /// A common root `ξ` with `μ^∨_ξ = target`.
    pub witness: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Certification {
    Certified(Certificate),
    Refused(Refusal),
}

impl Certification {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Certification::Certified(c) => Some(c),
            Certification::Refused(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.certificate().is_some()
    }
}

/// SHA-256 over the canonical JSON of `(A, δ, p)`.
pub fn input_hash(a: &[Vec<i64>], delta: &[i64], p: u64) -> String {
    #[derive(Serialize)]
    struct Canonical<'a> {
        schema: &'static str,
        a: &'a [Vec<i64>],
        delta: &'a [i64],
        p: u64,
    }
    let bytes = serde_json::to_vec(&Canonical {
        schema: "hyperloc/input-hash/v1",
        a,
        delta,
        p,
    })
    .expect("plain data serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// `μ^∨_ξ = Aᵀ ξ mod p`.
pub fn mu_dual(action: &TorusAction, xi: &[u64], p: u64) -> FpWeight {
    let mut out = vec![0u128; action.d()];
    for (j, &x) in xi.iter().enumerate() {
        for (k, o) in out.iter_mut().enumerate() {
            *o += reduce(action.weight(j)[k], p) as u128 * x as u128;
        }
    }
    FpWeight {
        coords: out.into_iter().map(|v| (v % p as u128) as u64).collect(),
        p,
    }
}

pub fn systems_for(vertices: &[Vertex], a: u32, direction: Direction) -> Vec<EulerFactorSystem> {
    vertices
        .iter()
        .map(|v| match direction {
            Direction::Gf => factor_system_gf(v, a),
            Direction::Fg => factor_system_fg(v, a),
        })
        .collect()
}

/// The steps a certificate for `λ` must discharge, in canonical order.
pub fn required_steps(
    strategy: Strategy,
    s: usize,
    lambda: &FpWeight,
    d_delta: &FpWeight,
) -> Vec<CertStep> {
    let s = s as u32;
    match strategy {
        Strategy::Direct => (1..=s)
            .flat_map(|a| {
                [
                    CertStep {
                        power: a,
                        shift: 0,
                        direction: Direction::Gf,
                        target: lambda.coords.clone(),
                    },
                    CertStep {
                        power: a,
                        shift: 0,
                        direction: Direction::Fg,
                        target: lambda.add_scaled(d_delta, a as u64).coords,
                    },
                ]
            })
            .collect(),
        Strategy::Chain => (0..s)
            .flat_map(|b| {
                [
                    CertStep {
                        power: 1,
                        shift: b,
                        direction: Direction::Gf,
                        target: lambda.add_scaled(d_delta, b as u64).coords,
                    },
                    CertStep {
                        power: 1,
                        shift: b,
                        direction: Direction::Fg,
                        target: lambda.add_scaled(d_delta, b as u64 + 1).coords,
                    },
                ]
            })
            .collect(),
    }
}

/// Precomputed data for one `(A, δ, p)`: the vertices and, lazily, the
/// common-root sets per `(a, direction)`.
pub struct CertContext {
    action: TorusAction,
    delta: Character,
    p: u64,
    vertices: Vec<Vertex>,
    d_delta: FpWeight,
    cache: Mutex<BTreeMap<(u32, Direction), Arc<RootSet>>>,
}

impl CertContext {
    pub fn new(action: &TorusAction, delta: &Character, p: u64) -> Result<Self, CertError> {
        if !is_prime(p) {
            return Err(FpError::NotPrime(p).into());
        }
        action.check_character(delta)?;
        if !action.is_smooth_parameter(delta) {
            return Err(CertError::NotSmooth(delta.clone()));
        }
        let vertices = vertices_of(action, delta)?;
        if vertices.is_empty() {
            return Err(PolytopeError::EmptyPolyhedron.into());
        }
        Ok(CertContext {
            action: action.clone(),
            delta: delta.clone(),
            p,
            d_delta: FpWeight::from_signed(&delta.0, p),
            vertices,
            cache: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn action(&self) -> &TorusAction {
        &self.action
    }

    pub fn delta(&self) -> &Character {
        &self.delta
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `dδ`, the reduction of `δ` mod `p`.
    pub fn d_delta(&self) -> &FpWeight {
        &self.d_delta
    }

    /// `p^d`, the size of the weight space.
    pub fn weight_space_size(&self) -> u128 {
        (self.p as u128).pow(self.action.d() as u32)
    }

    pub fn check_weight(&self, lambda: &FpWeight) -> Result<(), CertError> {
        if lambda.coords.len() != self.action.d() {
            return Err(CertError::WeightLength {
                found: lambda.coords.len(),
                expected: self.action.d(),
            });
        }
        if lambda.p != self.p {
            return Err(CertError::WeightModulus {
                found: lambda.p,
                expected: self.p,
            });
        }
        Ok(())
    }

    pub fn systems(&self, a: u32, direction: Direction) -> Vec<EulerFactorSystem> {
        systems_for(&self.vertices, a, direction)
    }

    pub fn root_set(&self, a: u32, direction: Direction) -> Arc<RootSet> {
        let mut cache = self.cache.lock().expect("cache lock");
        cache
            .entry((a, direction))
            .or_insert_with(|| {
                Arc::new(common_roots_solve(
                    &self.systems(a, direction),
                    self.action.n(),
                    self.p,
                ))
            })
            .clone()
    }

    /// The smallest common root mapping to `target`, if any.
    fn obstruction(&self, step: &CertStep) -> Option<Vec<u64>> {
        let roots = self.root_set(step.power, step.direction);
        let mut best: Option<Vec<u64>> = None;
        roots.for_each_point(|xi| {
            if mu_dual(&self.action, xi, self.p).coords == step.target
                && best.as_deref().is_none_or(|b| xi < b)
            {
                best = Some(xi.to_vec());
            }
        });
        best
    }

    /// Union over `a = 1..=a_max` of the `gf` images `μ^∨_ξ` and the shifted
    /// `fg` images `μ^∨_ξ - a·dδ`.
    pub fn bad_set(&self, a_max: u32) -> BadSet {
        let mut elements: BTreeMap<Vec<u64>, BTreeMap<(u32, Direction), Vec<u64>>> = BTreeMap::new();
        for a in 1..=a_max {
            for direction in [Direction::Gf, Direction::Fg] {
                let roots = self.root_set(a, direction);
                roots.for_each_point(|xi| {
                    let mut w = mu_dual(&self.action, xi, self.p);
                    if direction == Direction::Fg {
                        w = w.sub_scaled(&self.d_delta, a as u64);
                    }
                    let slot = elements.entry(w.coords).or_default();
                    match slot.get_mut(&(a, direction)) {
                        Some(prev) if xi < prev.as_slice() => *prev = xi.to_vec(),
                        Some(_) => {}
                        None => {
                            slot.insert((a, direction), xi.to_vec());
                        }
                    }
                });
            }
        }
        BadSet {
            p: self.p,
            a_max,
            elements: elements
                .into_iter()
                .map(|(k, ws)| {
                    let ws = ws
                        .into_iter()
                        .map(|((a, direction), xi)| Witness { a, direction, xi })
                        .collect();
                    (k, ws)
                })
                .collect(),
        }
    }

    pub fn single_step_relation(&self, lambda: &FpWeight) -> Result<StepRelation, CertError> {
        self.check_weight(lambda)?;
        let steps = required_steps(Strategy::Chain, 1, lambda, &self.d_delta);
        Ok(StepRelation {
            leq: self.obstruction(&steps[0]).is_none(),
            geq: self.obstruction(&steps[1]).is_none(),
        })
    }

    pub fn certify(&self, lambda: &FpWeight, strategy: Strategy) -> Result<Certification, CertError> {
        self.check_weight(lambda)?;
        let steps = required_steps(strategy, self.vertex_count(), lambda, &self.d_delta);
        for step in &steps {
            if let Some(witness) = self.obstruction(step) {
                return Ok(Certification::Refused(Refusal {
                    strategy,
                    lambda: lambda.coords.clone(),
                    lambda_signed: lambda.signed(),
                    failed_step: step.clone(),
                    witness,
                }));
            }
        }
        Ok(Certification::Certified(Certificate {
            schema: CERTIFICATE_SCHEMA.to_string(),
            input_hash: input_hash(self.action.matrix(), &self.delta.0, self.p),
            a: self.action.matrix().to_vec(),
            delta: self.delta.0.clone(),
            p: self.p,
            lambda: lambda.coords.clone(),
            lambda_signed: lambda.signed(),
            strategy,
            vertex_count: self.vertex_count(),
            steps,
            bound_check: bound_check(&self.action, &self.vertices, self.p),
        }))
    }

    pub fn certify_direct(&self, lambda: &FpWeight) -> Result<Certification, CertError> {
        self.certify(lambda, Strategy::Direct)
    }

    pub fn certify_chain(&self, lambda: &FpWeight) -> Result<Certification, CertError> {
        self.certify(lambda, Strategy::Chain)
    }

    /// Complement of the certified set for `strategy`.
    pub fn uncertified(&self, strategy: Strategy) -> BTreeSet<Vec<u64>> {
        match strategy {
            Strategy::Direct => self.bad_set(self.vertex_count() as u32).elements.into_keys().collect(),
            Strategy::Chain => {
                let single = self.bad_set(1);
                let mut out = BTreeSet::new();
                for w in single.weights() {
                    for b in 0..self.vertex_count() as u64 {
                        out.insert(w.sub_scaled(&self.d_delta, b).coords);
                    }
                }
                out
            }
        }
    }

    pub fn certified_count(&self, strategy: Strategy) -> u128 {
        self.weight_space_size() - self.uncertified(strategy).len() as u128
    }

    /// Certified weights in lexicographic order of residues, at most `limit`.
    pub fn certified_weights(&self, strategy: Strategy, limit: usize) -> Vec<FpWeight> {
        let bad = self.uncertified(strategy);
        let d = self.action.d();
        (0..d)
            .map(|_| 0..self.p)
            .multi_cartesian_product()
            .filter(|w| !bad.contains(w))
            .take(limit)
            .map(|w| FpWeight::new(w, self.p))
            .collect()
    }
}

pub fn bound_check(action: &TorusAction, vertices: &[Vertex], p: u64) -> BoundCheck {
    let n_delta = n_stats(vertices).map(|s| s.n_delta).unwrap_or(0);
    let m = bounds::bound_m(action.n(), action.d(), n_delta);
    BoundCheck {
        n_delta,
        p_exceeds_bound: num_bigint::BigUint::from(p) > m,
        bound_m: m.to_string(),
    }
}

pub fn bad_set(
    action: &TorusAction,
    delta: &Character,
    p: u64,
    a_max: u32,
) -> Result<BadSet, CertError> {
    Ok(CertContext::new(action, delta, p)?.bad_set(a_max))
}

pub fn single_step_relation(
    action: &TorusAction,
    delta: &Character,
    p: u64,
    lambda: &FpWeight,
) -> Result<StepRelation, CertError> {
    CertContext::new(action, delta, p)?.single_step_relation(lambda)
}

pub fn certify_direct(
    action: &TorusAction,
    delta: &Character,
    p: u64,
    lambda: &FpWeight,
) -> Result<Certification, CertError> {
    CertContext::new(action, delta, p)?.certify_direct(lambda)
}

pub fn certify_chain(
    action: &TorusAction,
    delta: &Character,
    p: u64,
    lambda: &FpWeight,
) -> Result<Certification, CertError> {
    CertContext::new(action, delta, p)?.certify_chain(lambda)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p: u64,
    /// Certified weight count, as a decimal string.
    pub certified: Option<String>,
    pub weight_space: Option<String>,
    pub exceeds_bound_m: bool,
    pub samples: Vec<Certificate>,
    pub error: Option<String>,
}

/// Per-prime certified counts. Composite entries and guard violations are
/// reported in their row; the scan continues.
pub fn scan_primes(
    action: &TorusAction,
    delta: &Character,
    primes: &[u64],
    strategy: Strategy,
    guard: u64,
    samples: usize,
) -> Vec<ScanRow> {
    primes
        .iter()
        .map(|&p| {
            let mut row = ScanRow {
                p,
                certified: None,
                weight_space: None,
                exceeds_bound_m: false,
                samples: Vec::new(),
                error: None,
            };
            let (n, d) = (action.n(), action.d());
            let feasible = [d, n - d]
                .iter()
                .all(|&k| checked_pow(p, k).is_some_and(|t| t <= guard));
            if !feasible {
                row.error = Some(
                    GuardExceeded {
                        points: format!("{}^{}", p, d.max(n - d)),
                        guard,
                    }
                    .to_string(),
                );
                return row;
            }
            match CertContext::new(action, delta, p) {
                Err(e) => row.error = Some(e.to_string()),
                Ok(ctx) => {
                    row.exceeds_bound_m = bound_check(action, ctx.vertices(), p).p_exceeds_bound;
                    row.certified = Some(ctx.certified_count(strategy).to_string());
                    row.weight_space = Some(ctx.weight_space_size().to_string());
                    row.samples = ctx
                        .certified_weights(strategy, samples)
                        .iter()
                        .filter_map(|w| ctx.certify(w, strategy).ok())
                        .filter_map(|c| c.certificate().cloned())
                        .collect();
                }
            }
            row
        })
        .collect()
}
