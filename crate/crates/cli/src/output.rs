//! Exit codes, provenance, and the text/JSON result envelope.

use std::path::Path;

use capkit_core::rational::format_rational;
use capkit_core::transforms::PivotFailure;
use capkit_core::{Budget, Capacity, Error, GroundSet, Subset};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::files::{self, CapacityFile, FunctionFile, Layout};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BREACH: u8 = 3;

pub const BUDGET_ENV: &str = "CAPKIT_TUPLE_BUDGET";

/// A finished command: exit code, human text, and the JSON `result` body.
pub struct Outcome {
    pub code: u8,
    pub text: String,
    pub result: Value,
}

impl Outcome {
    pub fn ok(text: String, result: Value) -> Self {
        Outcome { code: EXIT_OK, text, result }
    }

    pub fn violated(text: String, result: Value) -> Self {
        Outcome { code: EXIT_VIOLATED, text, result }
    }
}

/// A command that stopped early.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
    pub details: Option<Value>,
    /// Extra lines for the text form (witness or trace).
    pub text_details: Option<String>,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, kind: "usage", message: message.into(), details: None, text_details: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let plain = |code, kind| Failure { code, kind, message: message.clone(), details: None, text_details: None };
        match e {
            Error::NoValidPivot(failure) => Failure {
                code: EXIT_VIOLATED,
                kind: "no_valid_pivot",
                message,
                text_details: Some(pivot_failure_text(&failure)),
                details: Some(json!({
                    "upper": capacity_json(&failure.upper),
                    "lower": capacity_json(&failure.lower),
                    "current": capacity_json(&failure.current),
                    "failed": failure.failed,
                    "trace": failure.trace,
                })),
            },
            Error::TheoremViolation { construction, detail, trace } => {
                let details = json!({ "construction": construction, "detail": detail, "trace": trace });
                Failure {
                    code: EXIT_BREACH,
                    kind: "theorem_violation",
                    message,
                    text_details: trace.map(|t| serde_json::to_string_pretty(&t).expect("trace serializes")),
                    details: Some(details),
                }
            }
            Error::Generator(_) => plain(EXIT_BREACH, "generator"),
            Error::Parse(_) => plain(EXIT_USAGE, "parse"),
            Error::Validation(_) => plain(EXIT_USAGE, "invalid_capacity"),
            Error::Precondition(_) => plain(EXIT_USAGE, "precondition"),
            Error::BudgetExceeded { .. } => plain(EXIT_USAGE, "budget_exceeded"),
            Error::Incomparable { .. } => plain(EXIT_USAGE, "incomparable"),
            _ => plain(EXIT_USAGE, "invalid_input"),
        }
    }
}

fn pivot_failure_text(f: &PivotFailure) -> String {
    let g = f.upper.ground();
    let mut out = String::from("current upper capacity:\n");
    out.push_str(&table(&f.current));
    out.push_str("rejected pivots:\n");
    for c in &f.failed {
        out.push_str(&format!(
            "  {} (gap {}): transform drops below the lower capacity at {}\n",
            g.display_subset(c.set),
            format_rational(&c.gap),
            g.display_subset(c.violated_at)
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance { tool: "capkit", tool_version: env!("CARGO_PKG_VERSION"), inputs: Vec::new(), seed: None }
    }
}

/// Per-invocation state: what was read, and the tuple budget.
pub struct Context {
    pub provenance: Provenance,
    pub budget: Budget,
}

impl Context {
    pub fn from_env() -> Result<Self, Failure> {
        let budget = match std::env::var(BUDGET_ENV) {
            Ok(v) => Budget::new(
                v.trim()
                    .parse()
                    .map_err(|_| Failure::usage(format!("{BUDGET_ENV} must be a positive integer, got {v:?}")))?,
            ),
            Err(_) => Budget::default(),
        };
        Ok(Context { provenance: Provenance::default(), budget })
    }

    fn record(&mut self, path: &Path, bytes: &[u8]) {
        self.provenance
            .inputs
            .push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(bytes)) });
    }

    pub fn capacity_file(&mut self, path: &Path) -> Result<CapacityFile, Error> {
        let loaded = files::load::<CapacityFile>(path)?;
        self.record(path, &loaded.bytes);
        Ok(loaded.doc)
    }

    pub fn capacity(&mut self, path: &Path) -> Result<Capacity, Error> {
        self.capacity_file(path)?.to_capacity().map_err(|e| match e {
            Error::Validation(v) => Error::InvalidInput(format!("{}: not a capacity: {v}", path.display())),
            other => other,
        })
    }

    pub fn function(&mut self, path: &Path, ground: &GroundSet) -> Result<capkit_core::MeasurableFunction, Error> {
        let loaded = files::load::<FunctionFile>(path)?;
        self.record(path, &loaded.bytes);
        loaded.doc.to_function(ground)
    }
}

pub fn envelope(command: &str, provenance: &Provenance, code: u8, body: Result<Value, &Failure>) -> Value {
    let mut doc = json!({ "command": command, "exit_code": code, "provenance": provenance });
    match body {
        Ok(result) => doc["result"] = result,
        Err(f) => {
            doc["error"] = json!({ "kind": f.kind, "message": f.message, "details": f.details });
        }
    }
    doc
}

pub fn capacity_json(c: &Capacity) -> Value {
    serde_json::to_value(CapacityFile::from_capacity(c, Layout::Map)).expect("capacity files serialize")
}

/// Atom name → weight.
pub fn weights_json(p: &capkit_core::ProbabilityMeasure) -> Value {
    let g = p.ground();
    let map: serde_json::Map<String, Value> = g
        .atom_names()
        .iter()
        .zip(p.atom_weights())
        .map(|(name, w)| (name.clone(), Value::String(format_rational(&w))))
        .collect();
    Value::Object(map)
}

pub fn subset_json(g: &GroundSet, s: Subset) -> Value {
    Value::String(g.subset_key(s))
}

/// One `{set}  value` line per subset.
pub fn table(c: &Capacity) -> String {
    let g = c.ground();
    let labels: Vec<String> = g.subsets().map(|a| g.display_subset(a)).collect();
    let width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (a, label) in g.subsets().zip(labels) {
        let pad = width - label.chars().count();
        out.push_str(&format!("  {label}{}  {}\n", " ".repeat(pad), format_rational(&c[a])));
    }
    out
}

pub fn weights_line(p: &capkit_core::ProbabilityMeasure) -> String {
    let g = p.ground();
    g.atom_names()
        .iter()
        .zip(p.atom_weights())
        .map(|(name, w)| format!("{name}={}", format_rational(&w)))
        .collect::<Vec<_>>()
        .join(", ")
}
