//! Shared helpers for the integration suites.
//!
//! Each suite uses the generator it needs; the module is compiled once per
//! suite, so unused-item lints are silenced here.
#![allow(dead_code)]

use qtk_core::circuit::{CircOp, Circuit, WireId, WireKind};
use qtk_core::qnum::GateName;
use rand::Rng;

/// Random pure circuit over the full gate set (rotations included).
pub fn random_pure_circuit(rng: &mut impl Rng, n_qubits: usize, n_gates: usize) -> Circuit {
    let mut ops = Vec::with_capacity(n_gates);
    for _ in 0..n_gates {
        let pick = rng.random_range(0..10u32);
        let op = match pick {
            0 => CircOp::gate(GateName::H, vec![rng.random_range(0..n_qubits as WireId)]),
            1 => CircOp::gate(GateName::X, vec![rng.random_range(0..n_qubits as WireId)]),
            2 => CircOp::gate(GateName::Z, vec![rng.random_range(0..n_qubits as WireId)]),
            3 => CircOp::gate(GateName::S, vec![rng.random_range(0..n_qubits as WireId)]),
            4 => CircOp::gate(GateName::T, vec![rng.random_range(0..n_qubits as WireId)]),
            5 => CircOp::gate_with_params(
                GateName::Rz,
                vec![rng.random_range(-3.0..3.0)],
                vec![rng.random_range(0..n_qubits as WireId)],
            ),
            6 => CircOp::gate_with_params(
                GateName::Ry,
                vec![rng.random_range(-3.0..3.0)],
                vec![rng.random_range(0..n_qubits as WireId)],
            ),
            _ if n_qubits >= 2 => {
                let a = rng.random_range(0..n_qubits as WireId);
                let mut b = rng.random_range(0..n_qubits as WireId);
                while b == a {
                    b = rng.random_range(0..n_qubits as WireId);
                }
                if pick == 7 {
                    CircOp::gate(GateName::Swap, vec![a, b])
                } else {
                    CircOp::gate(GateName::Cnot, vec![a, b])
                }
            }
            _ => CircOp::gate(GateName::H, vec![rng.random_range(0..n_qubits as WireId)]),
        };
        ops.push(op);
    }
    Circuit {
        inputs: (0..n_qubits as WireId).map(|w| (w, WireKind::Qbit)).collect(),
        ops,
        outputs: (0..n_qubits as WireId).map(|w| (w, WireKind::Qbit)).collect(),
    }
}

/// Random circuit over the path-sum-supported gate set; Hadamard count is
/// bounded to keep the path-variable enumeration tractable.
pub fn random_pathsum_circuit(
    rng: &mut impl Rng,
    n_qubits: usize,
    n_gates: usize,
    max_h: usize,
) -> Circuit {
    let mut ops = Vec::with_capacity(n_gates);
    let mut h_left = max_h;
    for _ in 0..n_gates {
        let pick = rng.random_range(0..9u32);
        let w = rng.random_range(0..n_qubits as WireId);
        let op = match pick {
            0 if h_left > 0 => {
                h_left -= 1;
                CircOp::gate(GateName::H, vec![w])
            }
            1 => CircOp::gate(GateName::X, vec![w]),
            2 => CircOp::gate(GateName::Z, vec![w]),
            3 => CircOp::gate(GateName::S, vec![w]),
            4 => CircOp::gate(GateName::T, vec![w]),
            5 => {
                // dyadic rotation 2*pi*c/2^m
                let m = rng.random_range(1..5u32);
                let c = rng.random_range(0..(1i64 << m));
                CircOp::gate_with_params(
                    GateName::Rz,
                    vec![2.0 * std::f64::consts::PI * c as f64 / (1u64 << m) as f64],
                    vec![w],
                )
            }
            6 | 7 if n_qubits >= 2 => {
                let mut b = rng.random_range(0..n_qubits as WireId);
                while b == w {
                    b = rng.random_range(0..n_qubits as WireId);
                }
                if pick == 6 {
                    CircOp::gate(GateName::Cnot, vec![w, b])
                } else {
                    CircOp::gate(GateName::Swap, vec![w, b])
                }
            }
            _ if n_qubits >= 3 => {
                let mut wires = vec![w];
                while wires.len() < 3 {
                    let c = rng.random_range(0..n_qubits as WireId);
                    if !wires.contains(&c) {
                        wires.push(c);
                    }
                }
                CircOp::gate(GateName::Toffoli, wires)
            }
            _ => CircOp::gate(GateName::T, vec![w]),
        };
        ops.push(op);
    }
    Circuit {
        inputs: (0..n_qubits as WireId).map(|w| (w, WireKind::Qbit)).collect(),
        ops,
        outputs: (0..n_qubits as WireId).map(|w| (w, WireKind::Qbit)).collect(),
    }
}
