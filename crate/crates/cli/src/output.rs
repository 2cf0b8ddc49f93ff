//! Shared run configuration, error classification and report rendering.

use serde_json::{json, Map, Value};

/// Output schema version stamped into every JSON object.
pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub seed: u64,
    pub shots: usize,
    pub max_qubits: usize,
    pub tol: f64,
    pub json: bool,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    /// Usage / input problems.
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    /// Broken internal invariants.
    pub fn internal(message: impl Into<String>) -> CliError {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

/// Read a file with a usage-class error on failure.
pub fn read_input(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read `{path}`: {e}")))
}

/// Assemble the standard JSON envelope: version first, then the audit
/// fields, then the payload in the given order.
pub fn envelope(config: &RunConfig, fields: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    map.insert("version".into(), json!(SCHEMA_VERSION));
    map.insert("seed".into(), json!(config.seed));
    map.insert("tol".into(), json!(config.tol));
    for (k, v) in fields {
        map.insert(k.into(), v);
    }
    Value::Object(map)
}

/// Print the machine-readable object (JSON mode contract: exactly one
/// object on stdout).
pub fn emit_json(value: &Value) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

/// Gate-count report as ordered JSON.
pub fn counts_json(counts: &qtk_core::circuit::GateCounts) -> Value {
    let mut per_gate = Map::new();
    for (name, count) in &counts.per_gate {
        per_gate.insert(name.clone(), json!(count));
    }
    let mut map = Map::new();
    map.insert("qubits".into(), json!(counts.qubits));
    map.insert("ancillas".into(), json!(counts.ancillas));
    map.insert("total_gates".into(), json!(counts.total_gates));
    map.insert("per_gate".into(), Value::Object(per_gate));
    map.insert("inits".into(), json!(counts.inits));
    map.insert("measurements".into(), json!(counts.measurements));
    map.insert("discards".into(), json!(counts.discards));
    Value::Object(map)
}

/// Human-readable gate count report (stderr companion of circuit output).
pub fn print_report(config: &RunConfig, counts: &qtk_core::circuit::GateCounts) {
    eprintln!("{counts}");
    eprintln!("tolerance: {}", config.tol);
}
