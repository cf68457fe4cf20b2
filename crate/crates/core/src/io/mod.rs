//! Input files, reports and the command dispatcher behind the CLI.

mod commands;
mod report;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::fp::is_prime;
use crate::morita::Strategy;

pub use commands::{run_command, Command, CommandError, RunOptions};
pub use report::{Format, Report, REPORT_SCHEMA};

pub const INPUT_SCHEMA: &str = "hyperloc/input/v1";
pub const DEFAULT_GUARD: u64 = 10_000_000;
pub const GUARD_ENV: &str = "HYPERLOC_GUARD_POINTS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Field {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard_points: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_range: Option<(u64, u64)>,
}

impl InputOptions {
    fn is_empty(&self) -> bool {
        *self == InputOptions::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInput {
    pub schema: String,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "InputOptions::is_empty")]
    pub options: InputOptions,
}

impl ProblemInput {
    pub fn new(a: Vec<Vec<i64>>, delta: Option<Vec<i64>>, p: Option<u64>) -> Self {
        ProblemInput {
            schema: INPUT_SCHEMA.to_string(),
            n: a.len(),
            d: a.first().map_or(0, Vec::len),
            a,
            delta,
            p,
            options: InputOptions::default(),
        }
    }

    /// Canonical pretty JSON; parsing it gives back the same value.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }
}

fn as_int(v: &Value, field: &str) -> Result<i64, InputError> {
    v.as_i64()
        .ok_or_else(|| field_err(field, format!("expected an integer, found {v}")))
}

fn as_nonneg(v: &Value, field: &str) -> Result<u64, InputError> {
    v.as_u64()
        .ok_or_else(|| field_err(field, format!("expected a nonnegative integer, found {v}")))
}

fn int_list(v: &Value, field: &str) -> Result<Vec<i64>, InputError> {
    let arr = v
        .as_array()
        .ok_or_else(|| field_err(field, format!("expected a list of integers, found {v}")))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| as_int(x, &format!("{field}[{i}]")))
        .collect()
}

fn take<'a>(obj: &'a Map<String, Value>, key: &str) -> Option<&'a Value> {
    obj.get(key).filter(|v| !v.is_null())
}

/// Parses and validates a problem file, reporting the first violation.
pub fn parse_input(text: &str) -> Result<ProblemInput, InputError> {
    let value: Value = serde_json::from_str(text).map_err(|e| InputError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| field_err("<root>", "expected a JSON object"))?;
    const KNOWN: [&str; 7] = ["schema", "n", "d", "A", "delta", "p", "options"];
    if let Some(k) = obj.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(field_err(k.as_str(), "unknown field"));
    }
    if let Some(s) = take(obj, "schema") {
        if s.as_str() != Some(INPUT_SCHEMA) {
            return Err(field_err("schema", format!("expected \"{INPUT_SCHEMA}\", found {s}")));
        }
    }
    let n = as_nonneg(take(obj, "n").ok_or_else(|| field_err("n", "missing"))?, "n")? as usize;
    let d = as_nonneg(take(obj, "d").ok_or_else(|| field_err("d", "missing"))?, "d")? as usize;
    if d == 0 || d >= n {
        return Err(field_err("d", format!("d must satisfy 0 < d < n (d = {d}, n = {n})")));
    }
    let rows = take(obj, "A")
        .ok_or_else(|| field_err("A", "missing"))?
        .as_array()
        .ok_or_else(|| field_err("A", "expected a list of rows"))?;
    if rows.len() != n {
        return Err(field_err("A", format!("dimension mismatch: {} rows, but n = {n}", rows.len())));
    }
    let mut a = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let r = int_list(row, &format!("A[{i}]"))?;
        if r.len() != d {
            return Err(field_err(
                format!("A[{i}]"),
                format!("dimension mismatch: {} entries, but d = {d}", r.len()),
            ));
        }
        a.push(r);
    }
    let delta = match take(obj, "delta") {
        None => None,
        Some(v) => {
            let delta = int_list(v, "delta")?;
            if delta.len() != d {
                return Err(field_err(
                    "delta",
                    format!("dimension mismatch: {} entries, but d = {d}", delta.len()),
                ));
            }
            Some(delta)
        }
    };
    let p = match take(obj, "p") {
        None => None,
        Some(v) => {
            let p = as_nonneg(v, "p")?;
            if !is_prime(p) {
                return Err(field_err("p", format!("p must be prime (got {p})")));
            }
            Some(p)
        }
    };
    let options = match take(obj, "options") {
        None => InputOptions::default(),
        Some(v) => parse_options(v, d)?,
    };
    Ok(ProblemInput {
        schema: INPUT_SCHEMA.to_string(),
        n,
        d,
        a,
        delta,
        p,
        options,
    })
}

fn parse_options(v: &Value, d: usize) -> Result<InputOptions, InputError> {
    let obj = v
        .as_object()
        .ok_or_else(|| field_err("options", "expected an object"))?;
    let mut out = InputOptions::default();
    for (k, v) in obj {
        if v.is_null() {
            continue;
        }
        let f = format!("options.{k}");
        match k.as_str() {
            "strategy" => {
                let s = v.as_str().ok_or_else(|| field_err(&f, "expected a string"))?;
                out.strategy = Some(s.parse().map_err(|e: String| field_err(&f, e))?);
            }
            "radius" => {
                let r = as_int(v, &f)?;
                if r < 1 {
                    return Err(field_err(&f, "radius must be at least 1"));
                }
                out.radius = Some(r);
            }
            "guard_points" => out.guard_points = Some(as_nonneg(v, &f)?),
            "a_max" => {
                out.a_max = Some(
                    u32::try_from(as_nonneg(v, &f)?).map_err(|_| field_err(&f, "too large"))?,
                )
            }
            "lambda" => {
                let l = int_list(v, &f)?;
                if l.len() != d {
                    return Err(field_err(&f, format!("dimension mismatch: {} entries, but d = {d}", l.len())));
                }
                out.lambda = Some(l);
            }
            "q" => out.q = Some(as_nonneg(v, &f)?),
            "shift" => out.shift = Some(as_int(v, &f)?),
            "p_range" => {
                let r = int_list(v, &f)?;
                match r.as_slice() {
                    [lo, hi] if *lo >= 0 && lo <= hi => out.p_range = Some((*lo as u64, *hi as u64)),
                    _ => return Err(field_err(&f, "expected [lo, hi] with 0 <= lo <= hi")),
                }
            }
            _ => return Err(field_err(&f, "unknown option")),
        }
    }
    Ok(out)
}

/// Guard resolution: explicit value, then the environment, then the default.
pub fn resolve_guard(explicit: Option<u64>) -> Result<u64, InputError> {
    if let Some(g) = explicit {
        return Ok(g);
    }
    match std::env::var(GUARD_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| field_err(GUARD_ENV, format!("expected a nonnegative integer, found `{s}`"))),
        Err(_) => Ok(DEFAULT_GUARD),
    }
}
