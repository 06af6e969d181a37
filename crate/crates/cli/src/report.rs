use std::fmt::Write as _;

use gossip_core::{Dyadic, Rational};
use serde::Serialize;
use serde_json::{Map, Value};

pub struct Ctx {
    pub approx: bool,
}

impl Ctx {
    /// Exact value as a string, or `{exact, approx}` under `--approx`.
    pub fn rational(&self, v: &Rational) -> Value {
        if self.approx {
            serde_json::json!({ "exact": v.to_string(), "approx": v.to_f64() })
        } else {
            Value::String(v.to_string())
        }
    }

    pub fn dyadic(&self, v: &Dyadic) -> Value {
        if self.approx {
            serde_json::json!({ "exact": v.to_string(), "approx": v.to_f64() })
        } else {
            Value::String(v.to_string())
        }
    }

    pub fn rationals(&self, vs: &[Rational]) -> Value {
        Value::Array(vs.iter().map(|v| self.rational(v)).collect())
    }

    pub fn dyadics(&self, vs: &[Dyadic]) -> Value {
        Value::Array(vs.iter().map(|v| self.dyadic(v)).collect())
    }
}

/// Usage or input error; exit code 2.
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    /// False when a verification failed; exit code 1.
    pub passed: bool,
    pub elapsed_ms: f64,
    /// Printed verbatim before the results in human mode.
    #[serde(skip)]
    pub preamble: Option<String>,
    /// Human mode prints only the preamble.
    #[serde(skip)]
    pub preamble_only: bool,
}

impl Report {
    pub fn new(command: &str, parameters: Value, results: Value) -> Self {
        Report {
            command: command.to_string(),
            parameters,
            results,
            passed: true,
            elapsed_ms: 0.0,
            preamble: None,
            preamble_only: false,
        }
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.preamble {
            out.push_str(p);
            if self.preamble_only {
                return out;
            }
        }
        if let Value::Object(map) = &self.results {
            write_object(&mut out, map, "");
        }
        if !self.passed {
            out.push_str("result: FAIL\n");
        }
        writeln!(out, "time: {:.3} ms", self.elapsed_ms).unwrap();
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Number(n) => Some(n.to_string()),
        Value::Object(o) if o.len() == 2 && o.contains_key("exact") && o.contains_key("approx") => {
            Some(format!("{} (~{})", scalar(&o["exact"])?, o["approx"]))
        }
        _ => None,
    }
}

fn write_object(out: &mut String, map: &Map<String, Value>, indent: &str) {
    for (k, v) in map {
        if let Some(s) = scalar(v) {
            writeln!(out, "{indent}{k}: {s}").unwrap();
            continue;
        }
        match v {
            Value::Array(items) => {
                let flat: Option<Vec<String>> = items.iter().map(scalar).collect();
                match flat {
                    Some(parts) if parts.is_empty() => {
                        writeln!(out, "{indent}{k}: none").unwrap();
                    }
                    Some(parts) if parts.iter().all(|p| !p.contains('\n') && !p.contains(", ")) => {
                        writeln!(out, "{indent}{k}: {}", parts.join(" ")).unwrap();
                    }
                    _ => {
                        writeln!(out, "{indent}{k}:").unwrap();
                        for item in items {
                            match item {
                                Value::Object(m) => {
                                    writeln!(out, "{indent}  -").unwrap();
                                    write_object(out, m, &format!("{indent}    "));
                                }
                                other => {
                                    let text = scalar(other)
                                        .or_else(|| match other {
                                            Value::Array(row) => row
                                                .iter()
                                                .map(scalar)
                                                .collect::<Option<Vec<_>>>()
                                                .map(|r| r.join(" ")),
                                            _ => None,
                                        })
                                        .unwrap_or_else(|| other.to_string());
                                    for (n, line) in text.lines().enumerate() {
                                        let lead = if n == 0 { "- " } else { "  " };
                                        writeln!(out, "{indent}  {lead}{line}").unwrap();
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Value::Object(m) => {
                writeln!(out, "{indent}{k}:").unwrap();
                write_object(out, m, &format!("{indent}  "));
            }
            _ => unreachable!("scalars handled above"),
        }
    }
}
