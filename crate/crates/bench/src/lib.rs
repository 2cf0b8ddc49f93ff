//! Benchmark fixtures shared by the criterion targets.

use qtk_core::circuit::{CircOp, Circuit, WireId, WireKind};
use qtk_core::qnum::GateName;
use rand_like::SimpleRng;

/// Tiny deterministic generator so the fixtures do not depend on a
/// particular rand version from the bench harness.
pub mod rand_like {
    pub struct SimpleRng(u64);

    impl SimpleRng {
        pub fn new(seed: u64) -> SimpleRng {
            SimpleRng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
        }

        pub fn next_u64(&mut self) -> u64 {
            // xorshift64*
            let mut x = self.0;
            x ^= x >> 12;
            x ^= x << 25;
            x ^= x >> 27;
            self.0 = x;
            x.wrapping_mul(0x2545_F491_4F6C_DD1D)
        }

        pub fn below(&mut self, n: u64) -> u64 {
            self.next_u64() % n
        }

        /// Dyadic angle `2*pi*c/16`, valid for every backend including
        /// path-sums.
        pub fn angle(&mut self) -> f64 {
            std::f64::consts::TAU * (self.next_u64() % 16) as f64 / 16.0
        }
    }
}

/// A reproducible pure circuit over the standard gate set.
pub fn fixture_circuit(seed: u64, n_qubits: usize, n_gates: usize) -> Circuit {
    let mut rng = SimpleRng::new(seed);
    let mut ops = Vec::with_capacity(n_gates);
    for _ in 0..n_gates {
        let w = rng.below(n_qubits as u64) as WireId;
        let op = match rng.below(8) {
            0 => CircOp::gate(GateName::H, vec![w]),
            1 => CircOp::gate(GateName::X, vec![w]),
            2 => CircOp::gate(GateName::S, vec![w]),
            3 => CircOp::gate(GateName::T, vec![w]),
            4 => CircOp::gate_with_params(GateName::Rz, vec![rng.angle()], vec![w]),
            _ if n_qubits >= 2 => {
                let mut b = rng.below(n_qubits as u64) as WireId;
                while b == w {
                    b = rng.below(n_qubits as u64) as WireId;
                }
                CircOp::gate(GateName::Cnot, vec![w, b])
            }
            _ => CircOp::gate(GateName::H, vec![w]),
        };
        ops.push(op);
    }
    Circuit {
        inputs: (0..n_qubits as WireId).map(|w| (w, WireKind::Qbit)).collect(),
        ops,
        outputs: (0..n_qubits as WireId).map(|w| (w, WireKind::Qbit)).collect(),
    }
}
