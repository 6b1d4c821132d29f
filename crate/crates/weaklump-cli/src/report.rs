//! The report every subcommand produces, printed as text or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use weaklump::scalar::Rational;

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub verdicts: BTreeMap<String, bool>,
    pub dimensions: BTreeMap<String, usize>,
    /// Bases of subspaces, one vector per entry, scalars as strings.
    pub bases: BTreeMap<String, Vec<Vec<String>>>,
    pub certificates: BTreeMap<String, String>,
    /// Anything else the command computes: matrices, elements, lists.
    pub values: BTreeMap<String, Value>,
    pub timing: Option<Timing>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

pub fn scalars<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

pub fn matrix(m: &[Vec<Rational>]) -> Value {
    Value::from(m.iter().map(|r| scalars(r)).collect::<Vec<_>>())
}

impl Report {
    pub fn new(command: &str, inputs_digest: String) -> Self {
        Report { command: command.to_string(), inputs_digest, ..Report::default() }
    }

    pub fn verdict(&mut self, name: &str, holds: bool) {
        self.verdicts.insert(name.into(), holds);
    }

    pub fn dimension(&mut self, name: &str, d: usize) {
        self.dimensions.insert(name.into(), d);
    }

    pub fn basis(&mut self, name: &str, vectors: &[Vec<Rational>]) {
        self.bases.insert(name.into(), vectors.iter().map(|v| scalars(v)).collect());
    }

    pub fn certificate(&mut self, name: &str, text: impl Into<String>) {
        self.certificates.insert(name.into(), text.into());
    }

    pub fn value(&mut self, name: &str, v: impl Into<Value>) {
        self.values.insert(name.into(), v.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).unwrap();
        writeln!(out, "inputs: sha256:{}", self.inputs_digest).unwrap();
        for (k, v) in &self.verdicts {
            writeln!(out, "verdict {k}: {v}").unwrap();
        }
        for (k, v) in &self.dimensions {
            writeln!(out, "dimension {k}: {v}").unwrap();
        }
        for (k, v) in &self.certificates {
            writeln!(out, "certificate {k}: {v}").unwrap();
        }
        for (k, v) in &self.values {
            match v {
                Value::String(s) if s.contains('\n') => {
                    writeln!(out, "{k}:").unwrap();
                    for line in s.lines() {
                        writeln!(out, "  {line}").unwrap();
                    }
                }
                Value::String(s) => writeln!(out, "{k}: {s}").unwrap(),
                Value::Array(rows) if rows.iter().all(Value::is_array) && !rows.is_empty() => {
                    writeln!(out, "{k}:").unwrap();
                    for r in rows {
                        writeln!(out, "  {}", flat(r)).unwrap();
                    }
                }
                other => writeln!(out, "{k}: {}", flat(other)).unwrap(),
            }
        }
        for (k, vectors) in &self.bases {
            writeln!(out, "basis {k}: {} vectors", vectors.len()).unwrap();
            for v in vectors {
                writeln!(out, "  {}", v.join(" ")).unwrap();
            }
        }
        if let Some(t) = &self.timing {
            writeln!(out, "seconds: {:.3}", t.seconds).unwrap();
        }
        out
    }
}

/// Compact rendering of a JSON value for the text report.
fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(flat).collect::<Vec<_>>().join(" "),
        Value::Null => "undefined".into(),
        other => other.to_string(),
    }
}
