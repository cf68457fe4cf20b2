//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! test harness so the lines always print; exits nonzero on any FAIL.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command as Proc;
use std::time::{Duration, Instant};

use hyperloc::fp::{is_prime, FpWeight};
use hyperloc::lattice::{build_action, Character, TorusAction};
use hyperloc::morita::bounds::{bound_m, bound_prop};
use hyperloc::morita::{verify_certificate, CertContext, Certificate, Direction, Strategy, VerificationMethod};
use hyperloc::oracle::{check_factor_system, check_normal_ordering, check_solver};
use hyperloc::polytope::{search_min_n, vertices_of, Vertex};
use hyperloc::stability::check_unstable_generators;
use itertools::Itertools;

const GUARD: u64 = 10_000_000;

fn diagonal() -> TorusAction {
    build_action(&[vec![1], vec![1]]).unwrap()
}

fn triangle() -> TorusAction {
    build_action(&[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
}

fn deltas(action: &TorusAction, radius: i64) -> Vec<Character> {
    (0..action.d())
        .map(|_| -radius..=radius)
        .multi_cartesian_product()
        .map(Character)
        .collect()
}

/// Vertices of every smooth `δ` with max-norm ≤ 2, per desk action.
fn desk_instances() -> Vec<(TorusAction, Character, Vec<Vertex>)> {
    let mut out = Vec::new();
    for action in [diagonal(), triangle()] {
        for delta in deltas(&action, 2) {
            if action.is_smooth_parameter(&delta) {
                let vs = vertices_of(&action, &delta).unwrap();
                out.push((action.clone(), delta, vs));
            }
        }
    }
    out
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn run(id: u32, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let passed = out.passed && in_time;
    let time = match limit {
        Some(l) => format!("{:.2} s, limit {} s", elapsed.as_secs_f64(), l.as_secs()),
        None => format!("{:.2} s", elapsed.as_secs_f64()),
    };
    println!(
        "{} [{id}] {title}: {} ({time})",
        if passed { "PASS" } else { "FAIL" },
        out.detail
    );
    passed
}

fn c1() -> Outcome {
    let failed: Vec<u32> = (0..=6).filter(|&m| !check_normal_ordering(m)).collect();
    Outcome {
        passed: failed.is_empty(),
        detail: format!("x^m d^m and d^m x^m for m = 0..6, exact; failures {failed:?}"),
    }
}

fn c2() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (_, delta, vs) in desk_instances() {
        for v in &vs {
            for a in 1..=3 {
                for dir in [Direction::Fg, Direction::Gf] {
                    checked += 1;
                    if !check_factor_system(v, a, dir) {
                        bad.push(format!("{delta:?} {v:?} a={a} {dir}"));
                    }
                }
            }
        }
    }
    Outcome {
        passed: bad.is_empty() && checked > 0,
        detail: format!("{checked} products coefficient-exact, {} mismatches", bad.len()),
    }
}

fn c3() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    for (action, _, vs) in desk_instances() {
        for p in [3, 5, 7, 11, 13] {
            for a in 1..=3 {
                for dir in [Direction::Fg, Direction::Gf] {
                    checked += 1;
                    if !check_solver(&vs, a, dir, action.n(), p, GUARD).unwrap_or(false) {
                        bad += 1;
                    }
                }
            }
        }
    }
    Outcome {
        passed: bad == 0,
        detail: format!("{checked} root sets equal to enumeration, {bad} differ"),
    }
}

fn c4() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for action in [diagonal(), triangle()] {
        for delta in deltas(&action, 2) {
            if !action.is_admissible_parameter(&delta) {
                continue;
            }
            for q in [2, 3] {
                checked += 1;
                if !check_unstable_generators(&action, &delta, q, GUARD).unwrap_or(false) {
                    bad.push(format!("{:?} q={q}", delta.0));
                }
            }
        }
    }
    Outcome {
        passed: bad.is_empty() && checked > 0,
        detail: format!("{checked} (action, delta, q) cases, failures {bad:?}"),
    }
}

fn c5() -> Outcome {
    let got = (
        bound_prop(2, 1, 1).to_string(),
        bound_m(2, 1, 1).to_string(),
        bound_m(3, 2, 1).to_string(),
    );
    // independent evaluation: 2·C(n,d)·C(n,d-1)·(2·C(n,d-1)·N + 1)^(n-d+1)
    let expect = ((2u64).pow(2).to_string(), (2 * 2 * 3u64.pow(2)).to_string(), (2 * 3 * 3 * 7u64.pow(2)).to_string());
    Outcome {
        passed: got == expect && got == ("4".into(), "36".into(), "882".into()),
        detail: format!("bound_prop(2,1,1) = {}, bound_m(2,1,1) = {}, bound_m(3,2,1) = {}", got.0, got.1, got.2),
    }
}

fn c6(emitted: &mut Vec<Certificate>) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, action, lo, hi) in [("diagonal", diagonal(), 36u64, 101u64), ("triangle", triangle(), 882, 1009)] {
        let best = search_min_n(&action, 5).unwrap();
        let mut primes = 0;
        let mut empty = Vec::new();
        for p in (lo + 1..=hi).filter(|&p| is_prime(p)) {
            primes += 1;
            let ctx = CertContext::new(&action, &best.delta, p).unwrap();
            match ctx.certified_weights(Strategy::Direct, 1).pop() {
                Some(w) => match ctx.certify_direct(&w).unwrap().certificate() {
                    Some(c) => emitted.push(c.clone()),
                    None => {
                        ok = false;
                        empty.push(p);
                    }
                },
                None => {
                    ok = false;
                    empty.push(p);
                }
            }
        }
        lines.push(format!(
            "{name} delta* = {:?} N = {}: {primes} primes in ({lo}, {hi}], empty at {empty:?}",
            best.delta.0, best.n_value
        ));
    }
    Outcome {
        passed: ok,
        detail: lines.join("; "),
    }
}

fn c7(emitted: &mut Vec<Certificate>) -> Outcome {
    let action = diagonal();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [7u64, 11, 13] {
        let ctx = CertContext::new(&action, &Character(vec![1]), p).unwrap();
        let count = ctx.certified_count(Strategy::Chain);
        let complement: BTreeSet<i64> = ctx
            .uncertified(Strategy::Chain)
            .into_iter()
            .map(|k| FpWeight::new(k, p).signed()[0])
            .collect();
        let expected: BTreeSet<i64> = [-1, -2, -3].into();
        let mut verified = true;
        for w in ctx.certified_weights(Strategy::Chain, usize::MAX) {
            match ctx.certify_chain(&w).unwrap().certificate() {
                Some(c) => {
                    verified &= verify_certificate(c, GUARD).valid;
                    emitted.push(c.clone());
                }
                None => verified = false,
            }
        }
        let pass = count + 4 >= p as u128 && complement == expected && verified;
        ok &= pass;
        parts.push(format!("p={p}: {count} certified (>= {}), complement {complement:?}", p - 4));
    }
    Outcome {
        passed: ok,
        detail: parts.join(", "),
    }
}

fn c8(emitted: &[Certificate]) -> Outcome {
    let mut brute = 0;
    let mut fiber = 0;
    let mut failed = 0;
    for c in emitted {
        let v = verify_certificate(c, GUARD);
        if !v.valid {
            failed += 1;
        }
        match v.method {
            VerificationMethod::Brute => brute += 1,
            VerificationMethod::Fiber => fiber += 1,
            VerificationMethod::None => {}
        }
    }
    Outcome {
        passed: failed == 0 && !emitted.is_empty(),
        detail: format!(
            "{} certificates, {failed} rejected; {brute} by full enumeration, {fiber} by exhaustive fiber enumeration (p^n above the guard)",
            emitted.len()
        ),
    }
}

fn c9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hyperloc");
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let inputs: Vec<PathBuf> = std::fs::read_dir(&data)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json") && !p.to_string_lossy().contains("cert"))
        .sorted()
        .collect();
    let commands = [
        "check-input", "vertices", "koszul", "bound", "bad-set", "certify", "scan-primes", "stability-table", "oracle-selftest",
    ];
    let mut runs = 0;
    let mut differ = Vec::new();
    for input in &inputs {
        for cmd in commands {
            let go = || {
                Proc::new(bin)
                    .args([cmd, "--format", "json", "--input"])
                    .arg(input)
                    .env_remove("HYPERLOC_GUARD_POINTS")
                    .output()
                    .unwrap()
            };
            let (a, b) = (go(), go());
            runs += 1;
            if a.stdout != b.stdout || a.status != b.status {
                differ.push(format!("{cmd} {}", input.file_name().unwrap().to_string_lossy()));
            }
        }
    }
    Outcome {
        passed: differ.is_empty() && runs > 0,
        detail: format!("{runs} command/input pairs run twice, {} differ {differ:?}", differ.len()),
    }
}

fn main() {
    let mut emitted = Vec::new();
    let s = Duration::from_secs;
    let results = [
        run(1, "normal-ordering identities", Some(s(1)), c1),
        run(2, "factor systems equal expanded products", Some(s(10)), c2),
        run(3, "box solver equals enumeration", Some(s(30)), c3),
        run(4, "vertex monomials cut out the unstable locus", Some(s(60)), c4),
        run(5, "bound formulas", None, c5),
        run(6, "direct certification nonempty above the bound", None, || c6(&mut emitted)),
        run(7, "chain certification on the diagonal action", None, || c7(&mut emitted)),
        run(8, "certificate soundness", None, || c8(&emitted)),
        run(9, "CLI determinism", None, c9),
    ];
    let failed = results.iter().filter(|&&r| !r).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
