//! Brute-force coincidence check: the synthesized oracle's basis-state
//! permutation must equal `(x, 0, y) -> (x, 0, y XOR f(x))` with `f` given
//! by the standard evaluation of the source term.

use std::collections::BTreeMap;

use super::eval::apply_classical;
use super::ast::BTerm;
use super::OracleError;
use crate::circuit::{CircOp, Circuit, WireId, WireKind};
use crate::qnum::GateName;

/// Run a measurement-free Toffoli-class circuit on classical bits.
/// `input_bits` covers the circuit inputs in declaration order.
pub fn simulate_classical(
    circuit: &Circuit,
    input_bits: &[bool],
) -> Result<BTreeMap<WireId, bool>, OracleError> {
    if input_bits.len() != circuit.inputs.len() {
        return Err(OracleError::Verify(format!(
            "expected {} input bits, got {}",
            circuit.inputs.len(),
            input_bits.len()
        )));
    }
    let mut vals: BTreeMap<WireId, bool> = circuit
        .inputs
        .iter()
        .zip(input_bits)
        .map(|((w, _), b)| (*w, *b))
        .collect();
    for op in &circuit.ops {
        match op {
            CircOp::Init { wire, value } => {
                vals.insert(*wire, *value);
            }
            CircOp::Gate {
                name,
                dagger: false,
                params,
                controls,
                targets,
            } if params.is_empty() => {
                let fire = controls
                    .iter()
                    .all(|(w, pol)| vals[w] == pol.fires_on());
                match name {
                    GateName::X | GateName::Not => {
                        if fire {
                            let t = targets[0];
                            let v = vals[&t];
                            vals.insert(t, !v);
                        }
                    }
                    GateName::Cnot => {
                        if fire && vals[&targets[0]] {
                            let t = targets[1];
                            let v = vals[&t];
                            vals.insert(t, !v);
                        }
                    }
                    GateName::Toffoli => {
                        if fire && vals[&targets[0]] && vals[&targets[1]] {
                            let t = targets[2];
                            let v = vals[&t];
                            vals.insert(t, !v);
                        }
                    }
                    other => {
                        return Err(OracleError::Verify(format!(
                            "not a Toffoli-class gate: {other}"
                        )))
                    }
                }
            }
            other => {
                return Err(OracleError::Verify(format!(
                    "not a reversible classical op: {}",
                    other.kind_label()
                )))
            }
        }
    }
    Ok(vals)
}

/// Outcome of `verify_oracle`.
#[derive(Debug, Clone, PartialEq)]
pub enum VerifyResult {
    Coincides,
    Counterexample {
        x: usize,
        y: usize,
        expected: Vec<bool>,
        got: Vec<bool>,
    },
}

impl VerifyResult {
    pub fn is_ok(&self) -> bool {
        matches!(self, VerifyResult::Coincides)
    }
}

/// Convention: the oracle circuit's qbit inputs are the `n` argument wires
/// followed by `m` target wires; every non-input wire is a 0-initialized
/// ancilla that must be restored.
pub fn verify_oracle(
    circuit: &Circuit,
    spec: &BTerm,
    n: usize,
) -> Result<VerifyResult, OracleError> {
    if n > 12 {
        return Err(OracleError::Verify(format!(
            "brute force budget is 12 input bits, got {n}"
        )));
    }
    if circuit
        .inputs
        .iter()
        .any(|(_, k)| *k != WireKind::Qbit)
    {
        return Err(OracleError::Verify("oracle inputs must be qbit wires".into()));
    }
    let total_inputs = circuit.inputs.len();
    if total_inputs < n {
        return Err(OracleError::Verify(format!(
            "circuit has {total_inputs} inputs but the spec takes {n}"
        )));
    }
    let m = total_inputs - n;
    let x_wires: Vec<WireId> = circuit.inputs[..n].iter().map(|(w, _)| *w).collect();
    let y_wires: Vec<WireId> = circuit.inputs[n..].iter().map(|(w, _)| *w).collect();

    for x in 0..1usize << n {
        let fx = apply_classical(spec, n, x)?;
        if fx.len() != m {
            return Err(OracleError::Verify(format!(
                "spec produces {} bits but the circuit has {m} target wires",
                fx.len()
            )));
        }
        for y in 0..1usize << m {
            let mut input_bits = Vec::with_capacity(total_inputs);
            for i in 0..n {
                input_bits.push((x >> (n - 1 - i)) & 1 == 1);
            }
            for j in 0..m {
                input_bits.push((y >> (m - 1 - j)) & 1 == 1);
            }
            let vals = simulate_classical(circuit, &input_bits)?;
            // expected: x unchanged, ancillas restored to 0, y ^= f(x)
            let mut expected = Vec::new();
            let mut got = Vec::new();
            let mut ok = true;
            for (i, w) in x_wires.iter().enumerate() {
                let e = (x >> (n - 1 - i)) & 1 == 1;
                expected.push(e);
                got.push(vals[w]);
                ok &= vals[w] == e;
            }
            for (j, w) in y_wires.iter().enumerate() {
                let e = ((y >> (m - 1 - j)) & 1 == 1) ^ fx[j];
                expected.push(e);
                got.push(vals[w]);
                ok &= vals[w] == e;
            }
            for (w, v) in &vals {
                if !circuit.inputs.iter().any(|(iw, _)| iw == w) {
                    expected.push(false);
                    got.push(*v);
                    ok &= !*v;
                }
            }
            if !ok {
                return Ok(VerifyResult::Counterexample {
                    x,
                    y,
                    expected,
                    got,
                });
            }
        }
    }
    Ok(VerifyResult::Coincides)
}

/// Brute-force bijectivity of the basis-state permutation over all input
/// assignments (ancillas fixed at their init values).
pub fn is_permutation(circuit: &Circuit) -> Result<bool, OracleError> {
    let n = circuit.inputs.len();
    if n > 12 {
        return Err(OracleError::Verify(format!(
            "brute force budget is 12 wires, got {n}"
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for assignment in 0..1usize << n {
        let bits: Vec<bool> = (0..n).map(|i| (assignment >> (n - 1 - i)) & 1 == 1).collect();
        let vals = simulate_classical(circuit, &bits)?;
        let key: Vec<bool> = vals.values().copied().collect();
        if !seen.insert(key) {
            return Ok(false);
        }
    }
    Ok(true)
}
