use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use super::{parse_input, resolve_guard, InputError, ProblemInput, Report};
use crate::fp::{checked_pow, is_prime, FpWeight};
use crate::lattice::{build_action, Character, TorusAction, WallConvention};
use crate::morita::{
    bounds, input_hash, scan_primes, verify_certificate, CertContext, CertError, Certificate,
    Certification, Direction, Strategy,
};
use crate::oracle::{check_factor_system, check_normal_ordering, check_solver, CheckOutcome};
use crate::polytope::{n_stats, search_min_n, vertex_monomial, vertices_of, PolytopeError, Vertex};
use crate::stability::{
    check_unstable_generators, koszul::check_d_squared, koszul_data, support_semistable, unstable_table,
    StabilityError, SupportPattern,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CheckInput,
    Vertices,
    Koszul,
    Bound,
    BadSet,
    Certify,
    ScanPrimes,
    StabilityTable,
    VerifyCert,
    OracleSelftest,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::CheckInput,
        Command::Vertices,
        Command::Koszul,
        Command::Bound,
        Command::BadSet,
        Command::Certify,
        Command::ScanPrimes,
        Command::StabilityTable,
        Command::VerifyCert,
        Command::OracleSelftest,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckInput => "check-input",
            Command::Vertices => "vertices",
            Command::Koszul => "koszul",
            Command::Bound => "bound",
            Command::BadSet => "bad-set",
            Command::Certify => "certify",
            Command::ScanPrimes => "scan-primes",
            Command::StabilityTable => "stability-table",
            Command::VerifyCert => "verify-cert",
            Command::OracleSelftest => "oracle-selftest",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CommandError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CommandError::Input(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("certificate rejected")]
    Rejected(Box<Report>),
    #[error("input error: {0}")]
    Input(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("internal soundness failure: {0}")]
    Soundness(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Rejected(_) => 1,
            CommandError::Input(_) => 2,
            CommandError::Guard(_) => 3,
            CommandError::Soundness(_) => 4,
            CommandError::Precondition(_) => 5,
        }
    }
}

impl From<InputError> for CommandError {
    fn from(e: InputError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<CertError> for CommandError {
    fn from(e: CertError) -> Self {
        match e {
            CertError::Guard(g) => CommandError::Guard(g.to_string()),
            CertError::NotSmooth(_) | CertError::Polytope(PolytopeError::EmptyPolyhedron) => {
                CommandError::Precondition(e.to_string())
            }
            CertError::Polytope(PolytopeError::NonIntegralVertex(_)) => CommandError::Soundness(e.to_string()),
            other => CommandError::Input(other.to_string()),
        }
    }
}

impl From<PolytopeError> for CommandError {
    fn from(e: PolytopeError) -> Self {
        match e {
            PolytopeError::NonIntegralVertex(_) => CommandError::Soundness(e.to_string()),
            PolytopeError::EmptyPolyhedron | PolytopeError::NoAdmissibleDelta { .. } => {
                CommandError::Precondition(e.to_string())
            }
            other => CommandError::Input(other.to_string()),
        }
    }
}

impl From<StabilityError> for CommandError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Guard { .. } => CommandError::Guard(e.to_string()),
            StabilityError::Polytope(p) => p.into(),
            other => CommandError::Input(other.to_string()),
        }
    }
}

/// Command-line overrides; each wins over the matching input option.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub strategy: Option<Strategy>,
    pub p: Option<u64>,
    pub p_range: Option<(u64, u64)>,
    pub radius: Option<i64>,
    pub guard_points: Option<u64>,
    pub lambda: Option<Vec<i64>>,
    pub a_max: Option<u32>,
    pub shift: Option<i64>,
    pub q: Option<u64>,
    /// Cap on listed weights or points.
    pub limit: Option<usize>,
}

const DEFAULT_RADIUS: i64 = 5;
const DEFAULT_LIMIT: usize = 1000;

struct Job {
    input: ProblemInput,
    action: TorusAction,
    strategy: Strategy,
    radius: i64,
    guard: u64,
    limit: usize,
}

impl Job {
    fn new(mut input: ProblemInput, opts: &RunOptions) -> Result<Self, CommandError> {
        if let Some(p) = opts.p {
            if !is_prime(p) {
                return Err(CommandError::Input(format!("--p: p must be prime (got {p})")));
            }
            input.p = Some(p);
        }
        let o = &input.options;
        let strategy = opts.strategy.or(o.strategy).unwrap_or(Strategy::Direct);
        let radius = opts.radius.or(o.radius).unwrap_or(DEFAULT_RADIUS);
        if radius < 1 {
            return Err(CommandError::Input("radius must be at least 1".into()));
        }
        let guard = resolve_guard(opts.guard_points.or(o.guard_points))?;
        let action = build_action(&input.a).map_err(|e| CommandError::Input(format!("field `A`: {e}")))?;
        Ok(Job {
            input,
            action,
            strategy,
            radius,
            guard,
            limit: opts.limit.unwrap_or(DEFAULT_LIMIT),
        })
    }

    fn delta(&self) -> Result<Character, CommandError> {
        self.input
            .delta
            .clone()
            .map(Character)
            .ok_or_else(|| CommandError::Input("field `delta` is required for this command".into()))
    }

    fn p(&self) -> Result<u64, CommandError> {
        self.input
            .p
            .ok_or_else(|| CommandError::Input("field `p` (or --p) is required for this command".into()))
    }

    fn hash(&self) -> String {
        input_hash(
            &self.input.a,
            self.input.delta.as_deref().unwrap_or(&[]),
            self.input.p.unwrap_or(0),
        )
    }

    fn weight_guard(&self, p: u64) -> Result<(), CommandError> {
        let d = self.action.d();
        match checked_pow(p, d) {
            Some(t) if t <= self.guard => Ok(()),
            _ => Err(CommandError::Guard(format!(
                "listing {p}^{d} weights exceeds the guard of {}",
                self.guard
            ))),
        }
    }
}

fn weight_json(w: &FpWeight) -> Value {
    json!({"residue": w.coords, "signed": w.signed()})
}

fn vertices_json(vs: &[Vertex]) -> Value {
    Value::Array(
        vs.iter()
            .map(|v| {
                json!({
                    "coords": v.0,
                    "monomial": vertex_monomial(v).render(),
                    "n_i": v.0.iter().copied().max().unwrap_or(0),
                })
            })
            .collect(),
    )
}

/// Re-verifies a freshly emitted certificate; failing is a bug, not a refusal.
fn self_verify(cert: &Certificate, guard: u64) -> Result<(), CommandError> {
    let v = verify_certificate(cert, guard);
    if v.valid {
        Ok(())
    } else {
        Err(CommandError::Soundness(format!(
            "own certificate for lambda {:?} failed verification: {}",
            cert.lambda_signed,
            v.trail.last().cloned().unwrap_or_default()
        )))
    }
}

pub fn run_command(cmd: Command, text: &str, opts: &RunOptions) -> Result<Report, CommandError> {
    if cmd == Command::VerifyCert {
        return verify_cert(text, opts);
    }
    let job = Job::new(parse_input(text)?, opts)?;
    let results = match cmd {
        Command::CheckInput => check_input(&job),
        Command::Vertices => vertices(&job)?,
        Command::Koszul => koszul(&job, opts)?,
        Command::Bound => bound(&job)?,
        Command::BadSet => bad_set(&job, opts)?,
        Command::Certify => certify(&job, opts)?,
        Command::ScanPrimes => scan(&job, opts)?,
        Command::StabilityTable => stability(&job, opts)?,
        Command::OracleSelftest => selftest(&job)?,
        Command::VerifyCert => unreachable!("handled above"),
    };
    Ok(Report::new(cmd.name(), job.hash(), results))
}

fn check_input(job: &Job) -> Value {
    let a = &job.action;
    let walls = |c| -> Value {
        a.walls(c)
            .iter()
            .map(|w| json!({"index_set": w.index_set, "generator": w.generator.coords}))
            .collect()
    };
    let mut out = json!({
        "n": a.n(),
        "d": a.d(),
        "A": a.matrix(),
        "pi": a.pi(),
        "left_inverse": a.left_inverse(),
        "unimodular": a.is_unimodular(),
        "walls": {
            "indexed": walls(WallConvention::Indexed),
            "complement": walls(WallConvention::Complement),
        },
    });
    if let Some(delta) = &job.input.delta {
        let c = Character(delta.clone());
        out["delta"] = json!({
            "value": delta,
            "smooth": a.is_smooth_parameter(&c),
            "admissible": a.is_admissible_parameter(&c),
        });
    }
    if let Some(p) = job.input.p {
        out["p"] = json!(p);
    }
    out
}

fn vertices(job: &Job) -> Result<Value, CommandError> {
    let delta = job.delta()?;
    let vs = vertices_of(&job.action, &delta)?;
    let mut out = json!({
        "delta": delta.0,
        "smooth": job.action.is_smooth_parameter(&delta),
        "admissible": job.action.is_admissible_parameter(&delta),
        "vertex_count": vs.len(),
        "vertices": vertices_json(&vs),
    });
    match n_stats(&vs) {
        Ok(s) => out["n_delta"] = json!(s.n_delta),
        Err(_) => out["note"] = json!("P_delta is empty: no generator monomials"),
    }
    Ok(out)
}

fn koszul(job: &Job, opts: &RunOptions) -> Result<Value, CommandError> {
    let delta = job.delta()?;
    let vs = vertices_of(&job.action, &delta)?;
    let m = opts.shift.or(job.input.options.shift).unwrap_or(0);
    let data = koszul_data(&vs, m).map_err(|e| CommandError::Precondition(e.to_string()))?;
    let ok = check_d_squared(&data);
    if !ok {
        return Err(CommandError::Soundness("Koszul differential does not square to zero".into()));
    }
    Ok(json!({"delta": delta.0, "koszul": data, "d_squared_zero": ok}))
}

fn bound(job: &Job) -> Result<Value, CommandError> {
    let a = &job.action;
    let min = search_min_n(a, job.radius)?;
    let mut out = json!({
        "radius": min.radius,
        "delta_star": min.delta.0,
        "n_min": min.n_value,
        "admissible_scanned": min.admissible_scanned,
        "bound_prop": bounds::bound_prop(a.n(), a.d(), min.n_value).to_string(),
        "bound_m": bounds::bound_m(a.n(), a.d(), min.n_value).to_string(),
        "truncated_search": true,
    });
    if let Some(delta) = &job.input.delta {
        let vs = vertices_of(a, &Character(delta.clone()))?;
        if let Ok(s) = n_stats(&vs) {
            out["at_delta"] = json!({
                "delta": delta,
                "n_delta": s.n_delta,
                "bound_prop": bounds::bound_prop(a.n(), a.d(), s.n_delta).to_string(),
                "bound_m": bounds::bound_m(a.n(), a.d(), s.n_delta).to_string(),
            });
        }
    }
    Ok(out)
}

fn context(job: &Job) -> Result<CertContext, CommandError> {
    let delta = job.delta()?;
    let p = job.p()?;
    Ok(CertContext::new(&job.action, &delta, p)?)
}

fn bad_set(job: &Job, opts: &RunOptions) -> Result<Value, CommandError> {
    let ctx = context(job)?;
    job.weight_guard(ctx.p())?;
    let a_max = opts
        .a_max
        .or(job.input.options.a_max)
        .unwrap_or(ctx.vertex_count() as u32);
    let bad = ctx.bad_set(a_max);
    let elements: Vec<Value> = bad
        .elements
        .iter()
        .map(|(k, ws)| {
            let w = FpWeight::new(k.clone(), bad.p);
            json!({"residue": w.coords, "signed": w.signed(), "witnesses": ws})
        })
        .collect();
    Ok(json!({
        "delta": ctx.delta().0,
        "p": bad.p,
        "a_max": a_max,
        "count": bad.len(),
        "elements": elements,
    }))
}

fn certify(job: &Job, opts: &RunOptions) -> Result<Value, CommandError> {
    let ctx = context(job)?;
    let strategy = job.strategy;
    if let Some(lambda) = opts.lambda.clone().or(job.input.options.lambda.clone()) {
        if lambda.len() != job.action.d() {
            return Err(CommandError::Input(format!(
                "lambda has {} entries, expected d = {}",
                lambda.len(),
                job.action.d()
            )));
        }
        let w = FpWeight::from_signed(&lambda, ctx.p());
        let outcome = ctx.certify(&w, strategy)?;
        if let Certification::Certified(c) = &outcome {
            self_verify(c, job.guard)?;
        }
        let (key, payload) = match &outcome {
            Certification::Certified(c) => ("certificate", serde_json::to_value(c).expect("serializes")),
            Certification::Refused(r) => ("refusal", serde_json::to_value(r).expect("serializes")),
        };
        return Ok(json!({
            "strategy": strategy,
            "lambda": weight_json(&w),
            "certified": outcome.is_certified(),
            key: payload,
        }));
    }
    job.weight_guard(ctx.p())?;
    let listed = ctx.certified_weights(strategy, job.limit);
    let count = ctx.certified_count(strategy);
    let uncertified: Vec<Value> = ctx
        .uncertified(strategy)
        .into_iter()
        .take(job.limit)
        .map(|k| weight_json(&FpWeight::new(k, ctx.p())))
        .collect();
    Ok(json!({
        "strategy": strategy,
        "delta": ctx.delta().0,
        "p": ctx.p(),
        "vertex_count": ctx.vertex_count(),
        "weight_space": ctx.weight_space_size().to_string(),
        "certified_count": count.to_string(),
        "certified": listed.iter().map(weight_json).collect::<Vec<_>>(),
        "certified_truncated": (listed.len() as u128) < count,
        "uncertified": uncertified,
    }))
}

fn primes_of(job: &Job, opts: &RunOptions) -> Result<Vec<u64>, CommandError> {
    if let Some((lo, hi)) = opts.p_range.or(job.input.options.p_range) {
        if lo > hi {
            return Err(CommandError::Input(format!("empty p range {lo}..{hi} is reversed")));
        }
        return Ok((lo..=hi).filter(|&p| is_prime(p)).collect());
    }
    Ok(vec![job.p()?])
}

fn scan(job: &Job, opts: &RunOptions) -> Result<Value, CommandError> {
    let delta = job.delta()?;
    let primes = primes_of(job, opts)?;
    let rows = scan_primes(&job.action, &delta, &primes, job.strategy, job.guard, 1);
    for cert in rows.iter().flat_map(|r| r.samples.iter()) {
        self_verify(cert, job.guard)?;
    }
    Ok(json!({"delta": delta.0, "strategy": job.strategy, "primes": primes, "rows": rows}))
}

fn stability(job: &Job, opts: &RunOptions) -> Result<Value, CommandError> {
    let delta = job.delta()?;
    let q = opts.q.or(job.input.options.q).unwrap_or(2);
    let a = &job.action;
    let table = unstable_table(a, &delta, q, job.guard)?;
    let matches = check_unstable_generators(a, &delta, q, job.guard)?;
    let n2 = 2 * a.n();
    // minimal semistable supports, by increasing mask
    let semistable: Vec<SupportPattern> = (0..1u64 << n2)
        .map(SupportPattern)
        .filter(|s| support_semistable(a, &delta, *s))
        .collect();
    let minimal: Vec<Vec<usize>> = semistable
        .iter()
        .filter(|s| !semistable.iter().any(|t| t != *s && t.is_subset_of(s)))
        .map(|s| s.indices(n2))
        .collect();
    let listed: Vec<&Vec<u64>> = table.iter().take(job.limit).collect();
    Ok(json!({
        "delta": delta.0,
        "q": q,
        "labels": "0 is the zero element; 1..q-1 are the nonzero elements",
        "points_total": checked_pow(q, n2),
        "unstable_count": table.len(),
        "unstable": listed,
        "unstable_truncated": listed.len() < table.len(),
        "minimal_semistable_supports": minimal,
        "generators_cut_out_unstable_locus": matches,
    }))
}

fn verify_cert(text: &str, opts: &RunOptions) -> Result<Report, CommandError> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        CommandError::Input(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    // a bare certificate, or a certify report carrying one
    let cert_value = match value.pointer("/results/certificate") {
        Some(c) => c.clone(),
        None => value,
    };
    let cert: Certificate = serde_json::from_value(cert_value)
        .map_err(|e| CommandError::Input(format!("not a certificate: {e}")))?;
    let guard = resolve_guard(opts.guard_points)?;
    let v = verify_certificate(&cert, guard);
    let report = Report::new(
        Command::VerifyCert.name(),
        cert.input_hash.clone(),
        json!({"valid": v.valid, "method": v.method, "trail": v.trail, "lambda": cert.lambda_signed}),
    );
    if v.valid {
        Ok(report)
    } else {
        Err(CommandError::Rejected(Box::new(report)))
    }
}

fn selftest(job: &Job) -> Result<Value, CommandError> {
    let mut checks = Vec::new();
    let ordering = (0..=6).all(check_normal_ordering);
    checks.push(CheckOutcome::new("normal ordering m = 0..6", ordering, ""));
    let a = &job.action;
    if let Some(delta) = &job.input.delta {
        let delta = Character(delta.clone());
        let vs = vertices_of(a, &delta)?;
        let weights_ok = vs.iter().all(|v| a.restrict_tilde_character(&v.as_tilde()) == delta);
        checks.push(CheckOutcome::new("vertex weights equal delta", weights_ok, format!("{} vertices", vs.len())));
        let mut factor_ok = true;
        for v in &vs {
            for pow in 1..=3 {
                for dir in [Direction::Fg, Direction::Gf] {
                    factor_ok &= check_factor_system(v, pow, dir);
                }
            }
        }
        checks.push(CheckOutcome::new("factor systems, a = 1..3", factor_ok, ""));
        let mut solver_ok = true;
        let mut skipped = Vec::new();
        for p in [3, 5, 7] {
            for pow in 1..=3 {
                for dir in [Direction::Fg, Direction::Gf] {
                    match check_solver(&vs, pow, dir, a.n(), p, job.guard) {
                        Ok(ok) => solver_ok &= ok,
                        Err(_) => skipped.push(p),
                    }
                }
            }
        }
        skipped.dedup();
        checks.push(CheckOutcome::new(
            "solver equals enumeration, p in {3,5,7}",
            solver_ok,
            if skipped.is_empty() { String::new() } else { format!("skipped p = {skipped:?} (guard)") },
        ));
        if !vs.is_empty() {
            let k = koszul_data(&vs, 0).map_err(|e| CommandError::Precondition(e.to_string()))?;
            checks.push(CheckOutcome::new("Koszul d∘d = 0", check_d_squared(&k), ""));
        }
        for q in [2, 3] {
            if let Ok(ok) = check_unstable_generators(a, &delta, q, job.guard) {
                checks.push(CheckOutcome::new(format!("unstable locus, q = {q}"), ok, ""));
            }
        }
        if let (Some(p), true) = (job.input.p, a.is_smooth_parameter(&delta) && !vs.is_empty()) {
            let ctx = CertContext::new(a, &delta, p)?;
            let mut verified = 0usize;
            let mut ok = true;
            for strategy in [Strategy::Direct, Strategy::Chain] {
                for w in ctx.certified_weights(strategy, 20) {
                    if let Some(c) = ctx.certify(&w, strategy)?.certificate() {
                        ok &= verify_certificate(c, job.guard).valid;
                        verified += 1;
                    } else {
                        ok = false;
                    }
                }
            }
            checks.push(CheckOutcome::new("certificates re-verify", ok, format!("{verified} checked")));
        }
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if !failed.is_empty() {
        return Err(CommandError::Soundness(format!("self-test failed: {}", failed.join("; "))));
    }
    Ok(json!({"checks": checks, "all_passed": true}))
}
