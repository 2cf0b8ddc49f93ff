//! Subcommand implementations. Each returns the process exit code.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use qtk_core::circuit::Circuit;
use qtk_core::isolang;
use qtk_core::oracle;
use qtk_core::pathsum;
use qtk_core::qlc::{self, MachineLimits, TNode};
use qtk_core::qnum::UMatrix;
use qtk_core::rng::seeded_rng;
use qtk_core::usynth;

use crate::output::{counts_json, emit_json, envelope, print_report, read_input, CliError, RunConfig};

// ---- qlc --------------------------------------------------------------

pub fn qlc_check(config: &RunConfig, file: &str) -> Result<i32, CliError> {
    let src = read_input(file)?;
    match qlc::load(&src) {
        Ok(checked) => {
            let rendered = checked.ty.to_string();
            if config.json {
                emit_json(&envelope(config, vec![("type", json!(rendered))]));
            } else {
                println!("{rendered}");
            }
            Ok(0)
        }
        Err(err @ qlc::QlcError::Parse { .. }) => Err(CliError::usage(err.to_string())),
        Err(err) => {
            // a typing rejection is a verdict, not a usage error
            if config.json {
                emit_json(&envelope(
                    config,
                    vec![("rejected", json!(err.to_string()))],
                ));
            } else {
                eprintln!("{err}");
            }
            Ok(1)
        }
    }
}

pub fn qlc_run(
    config: &RunConfig,
    file: &str,
    trace: bool,
    fuel: usize,
) -> Result<i32, CliError> {
    let src = read_input(file)?;
    let checked = qlc::load(&src).map_err(|e| CliError::usage(e.to_string()))?;
    let limits = MachineLimits {
        max_qubits: config.max_qubits,
    };
    let mut rng = seeded_rng(config.seed);
    let mut tt = 0usize;
    let mut ff = 0usize;
    let mut other: BTreeMap<String, usize> = BTreeMap::new();
    let bit_result = checked.ty == qlc::QType::Bit;
    for shot in 0..config.shots.max(1) {
        let program = qlc::Program::new(checked.term.clone());
        let out = qlc::eval(program, &mut rng, fuel, limits).map_err(|e| match e {
            qlc::QlcError::Stuck(t) => CliError::internal(format!("stuck program: {t}")),
            e => CliError::usage(e.to_string()),
        })?;
        if trace && shot == 0 && !config.json {
            for entry in &out.trace {
                eprintln!(
                    "{}\tp={:.6}\tsize={}",
                    entry.rule, entry.probability, entry.term_size
                );
            }
        }
        match out.program.term.node() {
            TNode::Bool(true) => tt += 1,
            TNode::Bool(false) => ff += 1,
            _ => {
                *other.entry(out.program.term.to_string()).or_insert(0) += 1;
            }
        }
    }
    if config.json {
        let mut fields: Vec<(&str, Value)> = vec![("shots", json!(config.shots.max(1)))];
        if bit_result {
            fields.push(("tt", json!(tt)));
            fields.push(("ff", json!(ff)));
        } else {
            let counts: serde_json::Map<String, Value> = other
                .iter()
                .map(|(k, v)| (k.clone(), json!(v)))
                .chain([
                    ("tt".to_string(), json!(tt)),
                    ("ff".to_string(), json!(ff)),
                ])
                .filter(|(_, v)| v.as_u64() != Some(0))
                .collect();
            fields.push(("counts", Value::Object(counts)));
        }
        emit_json(&envelope(config, fields));
    } else {
        if bit_result {
            println!("tt: {tt}");
            println!("ff: {ff}");
        } else {
            for (value, count) in &other {
                println!("{value}: {count}");
            }
            if tt + ff > 0 {
                println!("tt: {tt}");
                println!("ff: {ff}");
            }
        }
        eprintln!("shots: {}, seed: {}", config.shots.max(1), config.seed);
    }
    Ok(0)
}

// ---- oracle -----------------------------------------------------------

pub fn oracle_synth(config: &RunConfig, file: &str, inputs: usize) -> Result<i32, CliError> {
    let src = read_input(file)?;
    let term = oracle::parse_bool(&src).map_err(|e| CliError::usage(e.to_string()))?;
    let oracle_circuit =
        oracle::synthesize_oracle(&term, inputs).map_err(|e| CliError::usage(e.to_string()))?;
    let counts = oracle_circuit.circuit.gate_count();
    if config.json {
        emit_json(&envelope(
            config,
            vec![
                ("inputs", json!(oracle_circuit.n_inputs)),
                ("outputs", json!(oracle_circuit.m_outputs)),
                (
                    "circuit",
                    serde_json::from_str(&oracle_circuit.circuit.to_json())
                        .expect("circuit JSON is valid"),
                ),
                ("report", counts_json(&counts)),
            ],
        ));
    } else {
        println!("{}", oracle_circuit.circuit.to_json());
        print_report(config, &counts);
    }
    Ok(0)
}

pub fn oracle_verify(
    config: &RunConfig,
    circuit_file: &str,
    file: &str,
    inputs: Option<usize>,
) -> Result<i32, CliError> {
    let circuit_src = read_input(circuit_file)?;
    let circuit = Circuit::from_json(&circuit_src).map_err(CliError::usage)?;
    let src = read_input(file)?;
    let term = oracle::parse_bool(&src).map_err(|e| CliError::usage(e.to_string()))?;
    let n = match inputs {
        Some(n) => n,
        None => {
            // infer: total inputs minus the spec's output arity
            let probe = circuit.inputs.len();
            (1..probe)
                .rev()
                .find(|n| {
                    oracle::infer_applied_type(&term, *n)
                        .and_then(|t| t.bool_width())
                        .map(|m| n + m == probe)
                        .unwrap_or(false)
                })
                .ok_or_else(|| {
                    CliError::usage("cannot infer the input arity; pass --inputs")
                })?
        }
    };
    let verdict =
        oracle::verify_oracle(&circuit, &term, n).map_err(|e| CliError::usage(e.to_string()))?;
    match verdict {
        oracle::VerifyResult::Coincides => {
            if config.json {
                emit_json(&envelope(config, vec![("coincides", json!(true))]));
            } else {
                println!("COINCIDES");
            }
            Ok(0)
        }
        oracle::VerifyResult::Counterexample { x, y, expected, got } => {
            if config.json {
                emit_json(&envelope(
                    config,
                    vec![
                        ("coincides", json!(false)),
                        (
                            "counterexample",
                            json!({"x": x, "y": y, "expected": expected, "got": got}),
                        ),
                    ],
                ));
            } else {
                println!("DISTINCT x={x} y={y}");
            }
            Ok(1)
        }
    }
}

// ---- usynth -----------------------------------------------------------

pub fn usynth_householder(config: &RunConfig, matrix_file: &str) -> Result<i32, CliError> {
    let text = read_input(matrix_file)?;
    let u = UMatrix::from_text(&text).map_err(|e| CliError::usage(e.to_string()))?;
    let out = usynth::synth_householder(&u, config.max_qubits)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let counts = out.circuit.gate_count();
    let distance = qtk_core::circuit::to_unitary(&out.circuit, config.max_qubits)
        .map(|m| m.global_phase_distance(&u))
        .map_err(|e| CliError::internal(e.to_string()))?;
    if config.json {
        emit_json(&envelope(
            config,
            vec![
                ("n", json!(u.n_qubits())),
                ("cnot_count", json!(out.cnot_count)),
                ("rotation_count", json!(out.rotation_count)),
                ("distance", json!(distance)),
                (
                    "circuit",
                    serde_json::from_str(&out.circuit.to_json()).expect("valid circuit JSON"),
                ),
            ],
        ));
    } else {
        println!("{}", out.circuit.to_json());
        eprintln!("cnot_count: {}", out.cnot_count);
        eprintln!("rotation_count: {}", out.rotation_count);
        eprintln!("global_phase_distance: {distance:.3e}");
        print_report(config, &counts);
    }
    Ok(0)
}

pub fn usynth_ion(
    config: &RunConfig,
    matrix_file: &str,
    layers: usize,
    budget: usize,
    restarts: usize,
) -> Result<i32, CliError> {
    let text = read_input(matrix_file)?;
    let target = UMatrix::from_text(&text).map_err(|e| CliError::usage(e.to_string()))?;
    let mut rng = seeded_rng(config.seed);
    let out = usynth::bfgs_synth(&target, layers, &mut rng, budget, restarts)
        .map_err(|e| CliError::usage(e.to_string()))?;
    if config.json {
        emit_json(&envelope(
            config,
            vec![
                ("layers", json!(layers)),
                ("theta", json!(out.theta)),
                ("error", json!(out.error)),
                ("iterations", json!(out.iterations)),
                ("converged", json!(out.converged)),
            ],
        ));
    } else {
        for t in &out.theta {
            println!("{t}");
        }
        eprintln!("error: {:.6e}", out.error);
        eprintln!("iterations: {}", out.iterations);
        eprintln!("converged: {}", out.converged);
    }
    Ok(if out.converged { 0 } else { 1 })
}

pub fn usynth_bound(config: &RunConfig, n: u32) -> Result<i32, CliError> {
    let bound = usynth::ms_layer_lower_bound(n).map_err(|e| CliError::usage(e.to_string()))?;
    if config.json {
        emit_json(&envelope(
            config,
            vec![("n", json!(n)), ("bound", json!(bound as u64))],
        ));
    } else {
        println!("{bound}");
    }
    Ok(0)
}

// ---- pathsum ----------------------------------------------------------

pub fn pathsum_verify(config: &RunConfig, a: &str, b: &str) -> Result<i32, CliError> {
    let ca = Circuit::from_json(&read_input(a)?).map_err(CliError::usage)?;
    let cb = Circuit::from_json(&read_input(b)?).map_err(CliError::usage)?;
    let verdict = pathsum::equiv(&ca, &cb).map_err(|e| CliError::usage(e.to_string()))?;
    match verdict {
        pathsum::Verdict::Equiv => {
            if config.json {
                emit_json(&envelope(config, vec![("verdict", json!("EQUIV"))]));
            } else {
                println!("EQUIV");
            }
            Ok(0)
        }
        pathsum::Verdict::Distinct { witness } => {
            if config.json {
                emit_json(&envelope(
                    config,
                    vec![("verdict", json!("DISTINCT")), ("witness", json!(witness))],
                ));
            } else {
                let n = ca.inputs.len();
                println!("DISTINCT witness=|{witness:0n$b}>", n = n);
            }
            Ok(1)
        }
        pathsum::Verdict::Unsupported { reason } => {
            if config.json {
                emit_json(&envelope(
                    config,
                    vec![("verdict", json!("UNSUPPORTED")), ("reason", json!(reason))],
                ));
            } else {
                println!("UNSUPPORTED: {reason}");
            }
            Ok(2)
        }
    }
}

// ---- iso --------------------------------------------------------------

fn load_isos(file: &str) -> Result<(isolang::IsoEnv, Vec<String>), CliError> {
    let src = read_input(file)?;
    match isolang::load_file(&src) {
        Ok(pair) => Ok(pair),
        Err(err @ isolang::IsoError::Parse { .. }) => Err(CliError::usage(err.to_string())),
        Err(err) => Err(CliError {
            code: 1,
            message: err.to_string(),
        }),
    }
}

fn pick_iso<'a>(
    env: &'a isolang::IsoEnv,
    order: &[String],
    name: Option<&str>,
) -> Result<(&'a isolang::Iso, String), CliError> {
    let name = match name {
        Some(n) => n.to_string(),
        None => order
            .last()
            .cloned()
            .ok_or_else(|| CliError::usage("the file defines no isos"))?,
    };
    env.get(&name)
        .map(|iso| (iso, name.clone()))
        .ok_or_else(|| CliError::usage(format!("no iso named `{name}`")))
}

pub fn iso_check(config: &RunConfig, file: &str) -> Result<i32, CliError> {
    let (env, order) = load_isos(file)?;
    let mut isos = Vec::new();
    for name in &order {
        let iso = &env[name];
        let warnings = isolang::structural_guard(iso);
        if config.json {
            isos.push(json!({
                "name": name,
                "lhs": iso.lhs_ty.to_string(),
                "rhs": iso.rhs_ty.to_string(),
                "classical": iso.is_classical(),
                "warnings": warnings,
            }));
        } else {
            let kind = if iso.is_classical() {
                "classical"
            } else {
                "quantum"
            };
            println!("{name} : {} <-> {} ({kind})", iso.lhs_ty, iso.rhs_ty);
            for w in warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    if config.json {
        emit_json(&envelope(config, vec![("isos", Value::Array(isos))]));
    }
    Ok(0)
}

pub fn iso_run(
    config: &RunConfig,
    file: &str,
    value: &str,
    fuel: usize,
    iso_name: Option<&str>,
) -> Result<i32, CliError> {
    let (env, order) = load_isos(file)?;
    let (iso, name) = pick_iso(&env, &order, iso_name)?;
    let input = isolang::parse_value(value).map_err(|e| CliError::usage(e.to_string()))?;
    let mut fuel = fuel;
    let out = isolang::apply_quantum(
        iso,
        &isolang::AmpValue::basis(input),
        &env,
        &mut fuel,
    )
    .map_err(|e| CliError::usage(e.to_string()))?;
    if config.json {
        let terms: Vec<Value> = out
            .terms
            .iter()
            .map(|(amp, v)| json!({"re": amp.re, "im": amp.im, "value": v.to_string()}))
            .collect();
        emit_json(&envelope(
            config,
            vec![("iso", json!(name)), ("terms", Value::Array(terms))],
        ));
    } else {
        println!("{out}");
    }
    Ok(0)
}

pub fn iso_matrix(
    config: &RunConfig,
    file: &str,
    depth: usize,
    iso_name: Option<&str>,
) -> Result<i32, CliError> {
    let (env, order) = load_isos(file)?;
    let (iso, name) = pick_iso(&env, &order, iso_name)?;
    let m = isolang::to_matrix(iso, &env, depth).map_err(|e| CliError::usage(e.to_string()))?;
    if config.json {
        let entries: Vec<Value> = m
            .entries()
            .iter()
            .map(|z| json!([z.re, z.im]))
            .collect();
        emit_json(&envelope(
            config,
            vec![
                ("iso", json!(name)),
                ("dim", json!(m.dim())),
                ("entries", Value::Array(entries)),
            ],
        ));
    } else {
        print!("{}", m.to_text());
    }
    Ok(0)
}
