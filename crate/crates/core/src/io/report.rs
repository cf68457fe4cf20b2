use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const REPORT_SCHEMA: &str = "hyperloc/report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected text or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub tool_version: String,
    pub input_hash: String,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(command: &str, input_hash: String, results: Value) -> Self {
        Report {
            schema: REPORT_SCHEMA.to_string(),
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_hash,
            results,
            timing_ms: None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Text => {
                let mut out = String::new();
                let _ = writeln!(out, "hyperloc {} {}", self.tool_version, self.command);
                let _ = writeln!(out, "input hash: {}", self.input_hash);
                if let Some(t) = self.timing_ms {
                    let _ = writeln!(out, "time: {t} ms");
                }
                render_value(&mut out, &self.results, 0);
                out
            }
        }
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => format!("[{}]", xs.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

/// Arrays of scalars (or of arrays of scalars) go on one line; everything
/// else nests by indentation.
fn flat(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(|x| is_scalar(x) || matches!(x, Value::Array(ys) if ys.iter().all(is_scalar))),
        _ => is_scalar(v),
    }
}

fn render_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if flat(x) {
                    let _ = writeln!(out, "{pad}{k}: {}", inline(x));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    render_value(out, x, depth + 1);
                }
            }
        }
        Value::Array(xs) => {
            for x in xs {
                if flat(x) {
                    let _ = writeln!(out, "{pad}- {}", inline(x));
                } else {
                    let _ = writeln!(out, "{pad}-");
                    render_value(out, x, depth + 1);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", inline(other));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_layout() {
        let r = Report::new("bound", "abc".into(), json!({"bound_m": "36", "delta_star": [1], "rows": [{"p": 5}]}));
        let t = r.render(Format::Text);
        assert!(t.contains("bound_m: 36\n"));
        assert!(t.contains("delta_star: [1]\n"));
        assert!(t.contains("rows:\n  -\n    p: 5\n"));
        assert!(!t.contains("time:"));
    }
}
