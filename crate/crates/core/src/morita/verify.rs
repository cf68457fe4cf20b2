//! Independent re-check of a certificate.
//!
//! Nothing from the certifier is trusted except the claimed `(A, δ, p, λ)`
//! and strategy: the action, vertices, factor systems and step list are all
//! rebuilt, and each step is checked without the box solver. Below the guard
//! the whole of `𝔽_p^n` is evaluated; above it only the fiber
//! `{ξ : Aᵀξ = target}`, parametrised as `Bᵀ·target + πᵀ·s`.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{input_hash, mu_dual, required_steps, systems_for, Certificate, CertStep, CERTIFICATE_SCHEMA};
use crate::fp::{checked_pow, is_prime, reduce, FpWeight};
use crate::lattice::{build_action, Character, TorusAction};
use crate::polytope::vertices_of;
use crate::weyl::{eval_unchecked, EulerFactorSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerificationMethod {
    /// Every point of `𝔽_p^n`.
    Brute,
    /// Every point of each target fiber.
    Fiber,
    /// Rejected before any root check.
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub valid: bool,
    pub method: VerificationMethod,
    pub trail: Vec<String>,
}

impl Verification {
    fn reject(method: VerificationMethod, mut trail: Vec<String>, why: String) -> Self {
        trail.push(format!("REJECT: {why}"));
        Verification {
            valid: false,
            method,
            trail,
        }
    }
}

pub fn verify_certificate(cert: &Certificate, guard: u64) -> Verification {
    let mut trail = Vec::new();
    let none = VerificationMethod::None;
    if cert.schema != CERTIFICATE_SCHEMA {
        return Verification::reject(none, trail, format!("unknown schema `{}`", cert.schema));
    }
    let action = match build_action(&cert.a) {
        Ok(a) => a,
        Err(e) => return Verification::reject(none, trail, format!("weight matrix: {e}")),
    };
    trail.push(format!("action rebuilt: n = {}, d = {}", action.n(), action.d()));
    if !is_prime(cert.p) {
        return Verification::reject(none, trail, format!("p = {} is not prime", cert.p));
    }
    let hash = input_hash(&cert.a, &cert.delta, cert.p);
    if hash != cert.input_hash {
        return Verification::reject(none, trail, "input hash does not match (A, delta, p)".into());
    }
    trail.push("input hash matches".into());
    let delta = Character(cert.delta.clone());
    if action.check_character(&delta).is_err() || !action.is_smooth_parameter(&delta) {
        return Verification::reject(none, trail, "delta is not a smooth parameter".into());
    }
    if cert.lambda.len() != action.d() || cert.lambda.iter().any(|&x| x >= cert.p) {
        return Verification::reject(none, trail, "lambda is not a reduced weight".into());
    }
    let lambda = FpWeight::new(cert.lambda.clone(), cert.p);
    if lambda.signed() != cert.lambda_signed {
        return Verification::reject(none, trail, "lambda_signed disagrees with lambda".into());
    }
    let vertices = match vertices_of(&action, &delta) {
        Ok(v) => v,
        Err(e) => return Verification::reject(none, trail, format!("vertices: {e}")),
    };
    if vertices.len() != cert.vertex_count {
        return Verification::reject(
            none,
            trail,
            format!("vertex count {} claimed, {} recomputed", cert.vertex_count, vertices.len()),
        );
    }
    trail.push(format!("{} vertices recomputed", vertices.len()));
    let d_delta = FpWeight::from_signed(&delta.0, cert.p);
    let expected = required_steps(cert.strategy, vertices.len(), &lambda, &d_delta);
    if expected != cert.steps {
        return Verification::reject(none, trail, "step list differs from the required steps".into());
    }
    let expected_bound = super::bound_check(&action, &vertices, cert.p);
    if expected_bound != cert.bound_check {
        return Verification::reject(none, trail, "bound check block is wrong".into());
    }

    let (n, p) = (action.n(), cert.p);
    let brute = checked_pow(p, n).is_some_and(|t| t <= guard);
    let fiber_ok = checked_pow(p, n - action.d()).is_some_and(|t| t <= guard);
    let method = if brute {
        VerificationMethod::Brute
    } else if fiber_ok {
        VerificationMethod::Fiber
    } else {
        return Verification::reject(none, trail, format!("fiber of {p}^{} points exceeds the guard {guard}", n - action.d()));
    };
    for step in &cert.steps {
        let systems = systems_for(&vertices, step.power, step.direction);
        let hit = match method {
            VerificationMethod::Brute => brute_hit(&action, &systems, step, p),
            _ => match fiber_hit(&action, &systems, step, p) {
                Ok(h) => h,
                Err(why) => return Verification::reject(method, trail, why),
            },
        };
        if let Some(xi) = hit {
            return Verification::reject(
                method,
                trail,
                format!(
                    "step a={} b={} {}: common root {:?} maps to target",
                    step.power, step.shift, step.direction, xi
                ),
            );
        }
        trail.push(format!(
            "ok: a={} b={} {} target {:?}",
            step.power,
            step.shift,
            step.direction,
            FpWeight::new(step.target.clone(), p).signed()
        ));
    }
    Verification {
        valid: true,
        method,
        trail,
    }
}

fn brute_hit(action: &TorusAction, systems: &[EulerFactorSystem], step: &CertStep, p: u64) -> Option<Vec<u64>> {
    (0..action.n())
        .map(|_| 0..p)
        .multi_cartesian_product()
        .find(|xi| {
            mu_dual(action, xi, p).coords == step.target && systems.iter().all(|s| eval_unchecked(s, xi, p) == 0)
        })
}

fn fiber_hit(
    action: &TorusAction,
    systems: &[EulerFactorSystem],
    step: &CertStep,
    p: u64,
) -> Result<Option<Vec<u64>>, String> {
    let (n, d) = (action.n(), action.d());
    let b = action.left_inverse();
    let pi = action.pi();
    let mut base = vec![0u64; n];
    for (k, &t) in step.target.iter().enumerate() {
        for (j, slot) in base.iter_mut().enumerate() {
            *slot = (*slot + reduce(b[k][j], p) * t) % p;
        }
    }
    let pi_red: Vec<Vec<u64>> = pi.iter().map(|r| r.iter().map(|&x| reduce(x, p)).collect()).collect();
    let mut seen = BTreeSet::new();
    let mut hit = None;
    let params: Box<dyn Iterator<Item = Vec<u64>>> = if n == d {
        Box::new(std::iter::once(Vec::new()))
    } else {
        Box::new((0..n - d).map(|_| 0..p).multi_cartesian_product())
    };
    for s in params {
        let mut xi = base.clone();
        for (row, &sv) in pi_red.iter().zip(&s) {
            for (slot, &c) in xi.iter_mut().zip(row) {
                *slot = (*slot + c * sv) % p;
            }
        }
        if mu_dual(action, &xi, p).coords != step.target {
            return Err(format!("fiber point {xi:?} misses the target"));
        }
        if hit.is_none() && systems.iter().all(|sys| eval_unchecked(sys, &xi, p) == 0) {
            hit = Some(xi.clone());
        }
        seen.insert(xi);
    }
    let expected = checked_pow(p, n - d).unwrap_or(u64::MAX);
    if seen.len() as u64 != expected {
        return Err(format!("fiber has {} distinct points, expected {expected}", seen.len()));
    }
    Ok(hit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morita::{CertContext, Strategy};

    fn cert(strategy: Strategy) -> Certificate {
        let action = build_action(&[vec![1], vec![1]]).unwrap();
        let ctx = CertContext::new(&action, &Character(vec![1]), 7).unwrap();
        ctx.certify(&FpWeight::from_signed(&[1], 7), strategy)
            .unwrap()
            .certificate()
            .cloned()
            .unwrap()
    }

    #[test]
    fn both_methods_accept() {
        for strategy in [Strategy::Direct, Strategy::Chain] {
            let c = cert(strategy);
            let brute = verify_certificate(&c, 1_000);
            assert!(brute.valid, "{:?}", brute.trail);
            assert_eq!(brute.method, VerificationMethod::Brute);
            let fiber = verify_certificate(&c, 10);
            assert!(fiber.valid, "{:?}", fiber.trail);
            assert_eq!(fiber.method, VerificationMethod::Fiber);
        }
    }

    #[test]
    fn tampering_is_caught() {
        let mut c = cert(Strategy::Direct);
        c.lambda = vec![0];
        c.lambda_signed = vec![0];
        assert!(!verify_certificate(&c, 1_000).valid);
        let mut c = cert(Strategy::Direct);
        c.p = 11;
        assert!(!verify_certificate(&c, 1_000).valid);
        let mut c = cert(Strategy::Direct);
        c.steps.pop();
        assert!(!verify_certificate(&c, 1_000).valid);
    }

    #[test]
    fn forged_weight_fails_root_check() {
        // a correctly formed certificate for an obstructed weight
        let mut c = cert(Strategy::Direct);
        let lambda = FpWeight::from_signed(&[-1], 7);
        c.lambda = lambda.coords.clone();
        c.lambda_signed = lambda.signed();
        c.steps = required_steps(Strategy::Direct, 2, &lambda, &FpWeight::from_signed(&[1], 7));
        for guard in [1_000, 10] {
            let v = verify_certificate(&c, guard);
            assert!(!v.valid);
            assert!(v.trail.last().unwrap().contains("common root"));
        }
    }
}
