//! JSON run reports. Every command produces one; `schema` is bumped on
//! incompatible changes.

use qdistill_core::search::{Verdict, VerdictKind};
use qdistill_core::{BipartiteOperator, PureVector};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: u32 = 1;

/// Key excluded from reproducibility comparisons.
pub const TIMING_KEY: &str = "timing_ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub verdicts: Vec<VerdictRecord>,
    pub details: Value,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: Option<u64>) -> Self {
        Self {
            schema: SCHEMA,
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            seed,
            inputs: Vec::new(),
            verdicts: Vec::new(),
            details: Value::Null,
            timing_ms: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub source: String,
    pub dims: [usize; 2],
    pub trace: f64,
    pub min_pt_eigenvalue: Option<f64>,
}

impl InputDigest {
    pub fn of(source: &str, op: &BipartiteOperator) -> Self {
        let pt = op.partial_transpose(qdistill_core::Subsystem::B);
        let min_pt_eigenvalue = pt.min_eigenvalue().ok().filter(|v| v.is_finite());
        Self { source: source.into(), dims: [op.dim_a(), op.dim_b()], trace: op.trace().re, min_pt_eigenvalue }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub dims: [usize; 2],
    pub schmidt_coefficients: Vec<f64>,
    /// Amplitudes as `[re, im]`, index `i·d_B + j` for `|i⟩|j⟩`.
    pub amplitudes: Vec<[f64; 2]>,
}

impl CertificateRecord {
    pub fn of(v: &PureVector) -> Self {
        let (da, db) = v.dims();
        Self {
            dims: [da, db],
            schmidt_coefficients: v.schmidt().coefficients.into_iter().filter(|c| *c > 1e-12).collect(),
            amplitudes: v.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub label: String,
    pub kind: String,
    pub value: f64,
    pub warning: bool,
    pub rank_bound: usize,
    pub copies: usize,
    pub best_restart: Option<usize>,
    pub certificate: Option<CertificateRecord>,
}

pub fn kind_name(kind: VerdictKind) -> &'static str {
    match kind {
        VerdictKind::ViolationFound => "violation",
        VerdictKind::NoViolationFound => "none",
    }
}

impl VerdictRecord {
    pub fn of(label: &str, v: &Verdict) -> Self {
        Self {
            label: label.into(),
            kind: kind_name(v.kind).into(),
            value: v.value,
            warning: v.warning,
            rank_bound: v.rank_bound,
            copies: v.copies,
            best_restart: Some(v.best_restart),
            certificate: v.certificate.as_ref().map(CertificateRecord::of),
        }
    }

    pub fn is_violation(&self) -> bool {
        self.kind == kind_name(VerdictKind::ViolationFound)
    }
}

/// Compares two reports field by field, numbers within `tol`, skipping timing.
/// Returns the path of the first mismatch.
pub fn compare_reports(a: &Value, b: &Value, tol: f64) -> Result<(), String> {
    fn walk(a: &Value, b: &Value, tol: f64, path: &str) -> Result<(), String> {
        match (a, b) {
            (Value::Number(x), Value::Number(y)) => {
                let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
                if (x - y).abs() <= tol {
                    Ok(())
                } else {
                    Err(format!("{path}: {x} vs {y}"))
                }
            }
            (Value::Array(x), Value::Array(y)) => {
                if x.len() != y.len() {
                    return Err(format!("{path}: length {} vs {}", x.len(), y.len()));
                }
                x.iter().zip(y).enumerate().try_for_each(|(i, (p, q))| walk(p, q, tol, &format!("{path}[{i}]")))
            }
            (Value::Object(x), Value::Object(y)) => {
                let keys = |m: &serde_json::Map<String, Value>| {
                    m.keys().filter(|k| *k != TIMING_KEY).cloned().collect::<Vec<_>>()
                };
                if keys(x) != keys(y) {
                    return Err(format!("{path}: key sets differ"));
                }
                keys(x).iter().try_for_each(|k| walk(&x[k], &y[k], tol, &format!("{path}.{k}")))
            }
            _ if a == b => Ok(()),
            _ => Err(format!("{path}: {a} vs {b}")),
        }
    }
    walk(a, b, tol, "$")
}
