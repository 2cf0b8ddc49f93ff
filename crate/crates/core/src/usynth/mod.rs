//! Circuit synthesis from dense unitary matrices: Householder QR down to
//! CNOT+rotation circuits, the trapped-ion MS-layer lower bound, and BFGS
//! parametric synthesis.

mod bfgs;
mod ion;
mod mux;
mod synth;

pub use bfgs::{
    bfgs_synth, fidelity_gap, gradient, gradient_five_point, BfgsOutcome, DEFAULT_RESTARTS,
    FD_STEP, GRAD_TOL,
};
pub use ion::{ms_layer_lower_bound, IonAnsatz};
pub use synth::{reflection_to_circuit, synth_householder, HouseholderSynth};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum USynthError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("factor is not a unitary reflection (|eigenvalue| deviates by {deviation:.3e})")]
    NotReflection { deviation: f64 },
    #[error("synthesis is limited to {max} qubits, got {n}")]
    Width { n: usize, max: usize },
    #[error("layer count must be at least 1")]
    ZeroLayers,
    #[error("qubit count must be at least 1")]
    ZeroQubits,
    #[error("parameter vector has length {got}, expected {expected}")]
    ParamCount { expected: usize, got: usize },
    #[error(transparent)]
    Qnum(#[from] crate::qnum::QnumError),
    #[error(transparent)]
    Circuit(#[from] crate::circuit::CircuitError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::to_unitary;
    use crate::qnum::{
        gate_matrix, householder_factor, householder_qr, GateName, HouseholderFactor, UMatrix,
        DEFAULT_MAX_QUBITS as MAXQ,
    };
    use crate::rng::seeded_rng;
    use num_complex::Complex64;

    #[test]
    fn identity_reflection_is_empty_circuit() {
        let f = HouseholderFactor::identity(4);
        let c = reflection_to_circuit(&f, 2).unwrap();
        assert!(c.ops.is_empty());
    }

    #[test]
    fn one_qubit_reflector_achieves_x() {
        // reflector swapping e0 and e1: matrix X up to global phase
        let col = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let f = householder_factor(&col, 0).unwrap();
        let c = reflection_to_circuit(&f, 1).unwrap();
        let u = to_unitary(&c, MAXQ).unwrap();
        let x = gate_matrix(GateName::X, &[]).unwrap();
        assert!(u.global_phase_distance(&x) <= 1e-7, "{u}");
    }

    #[test]
    fn random_factors_realize_their_matrix() {
        let mut rng = seeded_rng(41);
        for n in 1..=2usize {
            for _ in 0..5 {
                let dim = 1 << n;
                let u = UMatrix::random_unitary(dim, &mut rng);
                let f = householder_factor(&u.column(0), 0).unwrap();
                let c = reflection_to_circuit(&f, n).unwrap();
                let got = to_unitary(&c, MAXQ).unwrap();
                assert!(
                    got.global_phase_distance(&f.matrix()) <= 1e-7,
                    "n={n} distance {}",
                    got.global_phase_distance(&f.matrix())
                );
            }
        }
    }

    #[test]
    fn suffix_supported_factors_work() {
        let mut rng = seeded_rng(43);
        let u = UMatrix::random_unitary(8, &mut rng);
        // reflect a column with pivot 3: support on indices 3..8
        let decomp = householder_qr(&u).unwrap();
        for f in decomp.factors.iter().take(4) {
            let c = reflection_to_circuit(f, 3).unwrap();
            let got = to_unitary(&c, MAXQ).unwrap();
            assert!(got.global_phase_distance(&f.matrix()) <= 1e-7);
        }
    }

    #[test]
    fn synth_cnot_gate_exact() {
        let cnot = gate_matrix(GateName::Cnot, &[]).unwrap();
        let out = synth_householder(&cnot, MAXQ).unwrap();
        let got = to_unitary(&out.circuit, MAXQ).unwrap();
        assert!(got.global_phase_distance(&cnot) <= 1e-8);
    }

    #[test]
    fn synth_identity_is_gateless() {
        let out = synth_householder(&UMatrix::identity(4), MAXQ).unwrap();
        assert_eq!(out.cnot_count, 0);
        assert!(out.circuit.ops.is_empty());
    }

    #[test]
    fn synth_random_unitaries_within_budget() {
        let mut rng = seeded_rng(47);
        for n in 2..=3usize {
            let dim = 1 << n;
            let budget = (2.5 * (dim * dim) as f64) as usize;
            for _ in 0..3 {
                let u = UMatrix::random_unitary(dim, &mut rng);
                let out = synth_householder(&u, MAXQ).unwrap();
                let got = to_unitary(&out.circuit, MAXQ).unwrap();
                let d = got.global_phase_distance(&u);
                assert!(d <= 1e-6, "n={n}: distance {d:.2e}");
                assert!(
                    out.cnot_count <= budget,
                    "n={n}: {} CNOTs > budget {budget}",
                    out.cnot_count
                );
            }
        }
    }

    #[test]
    fn synth_rejects_non_unitary() {
        let mut m = UMatrix::identity(4);
        m[(0, 0)] = Complex64::new(2.0, 0.0);
        assert!(synth_householder(&m, MAXQ).is_err());
    }
}
