//! Semantic interpretation of circuits: dense unitary extraction for pure
//! circuits and statevector simulation with measurement for general ones.

use rand::Rng;

use super::{CircOp, Circuit, CircuitError, WireId, WireKind};
use crate::qnum::{
    controlled, gate_matrix, measure, GateName, Polarity, StateVector, UMatrix, NORM_TOL,
};

/// Matrix of one gate op including its dagger flag and control decorations.
fn op_matrix(
    name: GateName,
    dagger: bool,
    params: &[f64],
    controls: &[(WireId, Polarity)],
) -> Result<UMatrix, CircuitError> {
    let mut m = gate_matrix(name, params)?;
    if dagger {
        m = m.dagger();
    }
    // controls[0] becomes the outermost (highest) wire
    for (_, pol) in controls.iter().rev() {
        m = controlled(&m, *pol)?;
    }
    Ok(m)
}

/// Operand wire list of a gate op: controls first (outermost), then targets.
fn op_wires(controls: &[(WireId, Polarity)], targets: &[WireId]) -> Vec<WireId> {
    controls
        .iter()
        .map(|(w, _)| *w)
        .chain(targets.iter().copied())
        .collect()
}

/// Product of the embedded gate matrices in op order (time flows left to
/// right, so later gates multiply on the left). Pure circuits only.
pub fn to_unitary(c: &Circuit, max_qubits: usize) -> Result<UMatrix, CircuitError> {
    if let Some((index, kind)) = c.first_impure_op() {
        return Err(CircuitError::NotPure { index, kind });
    }
    c.validate()?;
    let n = c.inputs.len();
    if n > max_qubits {
        return Err(crate::qnum::QnumError::WidthOverflow {
            requested: n,
            max: max_qubits,
        }
        .into());
    }
    let position = |w: WireId| -> usize {
        c.inputs
            .iter()
            .position(|(id, _)| *id == w)
            .expect("validated circuit references only live wires")
    };
    let dim = 1usize << n;
    // Columns of the accumulated unitary, advanced gate by gate.
    let mut cols: Vec<Vec<crate::qnum::Amplitude>> = (0..dim)
        .map(|j| {
            let mut col = vec![num_complex::Complex64::new(0.0, 0.0); dim];
            col[j] = num_complex::Complex64::new(1.0, 0.0);
            col
        })
        .collect();
    for op in &c.ops {
        if let CircOp::Gate {
            name,
            dagger,
            params,
            controls,
            targets,
        } = op
        {
            let m = op_matrix(*name, *dagger, params, controls)?;
            let wires: Vec<usize> = op_wires(controls, targets)
                .into_iter()
                .map(position)
                .collect();
            for col in cols.iter_mut() {
                let sv = StateVector::from_raw_unchecked(n, std::mem::take(col));
                let applied = sv.apply(&m, &wires)?;
                *col = applied.into_amplitudes();
            }
        }
    }
    Ok(UMatrix::from_fn(dim, |r, c_| cols[c_][r]))
}

/// Result of running a circuit on an input state.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// State over the qbit outputs, ordered as in `circuit.outputs`.
    pub state: StateVector,
    /// Measured bits in op order.
    pub record: Vec<bool>,
    /// Values of the bit output wires, ordered as in `circuit.outputs`.
    pub bit_outputs: Vec<bool>,
}

/// Fold the ops over the statevector primitives. The input state covers the
/// qbit inputs in declaration order.
pub fn run(
    c: &Circuit,
    input: &StateVector,
    rng: &mut impl Rng,
    max_qubits: usize,
) -> Result<RunOutput, CircuitError> {
    c.validate()?;
    let qbit_inputs: Vec<WireId> = c
        .inputs
        .iter()
        .filter(|(_, k)| *k == WireKind::Qbit)
        .map(|(w, _)| *w)
        .collect();
    if c.inputs.len() != qbit_inputs.len() {
        // bit inputs are not simulatable without an input record
        return Err(CircuitError::InputWidth {
            expected: qbit_inputs.len(),
            got: c.inputs.len(),
        });
    }
    if input.n_qubits() != qbit_inputs.len() {
        return Err(CircuitError::InputWidth {
            expected: qbit_inputs.len(),
            got: input.n_qubits(),
        });
    }

    let mut state = input.clone();
    let mut live: Vec<WireId> = qbit_inputs; // position i holds wire live[i]
    let mut bits: std::collections::BTreeMap<WireId, bool> = Default::default();
    let mut record = Vec::new();

    let pos_of = |live: &[WireId], w: WireId| -> usize {
        live.iter()
            .position(|x| *x == w)
            .expect("validated circuit references only live wires")
    };

    for op in &c.ops {
        match op {
            CircOp::Init { wire, value } => {
                state = state.kron_within(&StateVector::basis(&[*value]), max_qubits)?;
                live.push(*wire);
            }
            CircOp::Gate {
                name,
                dagger,
                params,
                controls,
                targets,
            } => {
                let m = op_matrix(*name, *dagger, params, controls)?;
                let wires: Vec<usize> = op_wires(controls, targets)
                    .into_iter()
                    .map(|w| pos_of(&live, w))
                    .collect();
                state = state.apply(&m, &wires)?;
            }
            CircOp::Measure { qwire, bwire } => {
                let p = pos_of(&live, *qwire);
                let outcome = measure(&state, p, rng)?;
                record.push(outcome.bit);
                bits.insert(*bwire, outcome.bit);
                state = outcome.state.drop_wire(p, outcome.bit)?;
                live.remove(p);
            }
            CircOp::Discard { wire } => {
                let p = pos_of(&live, *wire);
                let p1 = state.prob_one(p)?;
                let (value, prob) = if p1 >= 0.5 { (true, p1) } else { (false, 1.0 - p1) };
                if 1.0 - prob > NORM_TOL {
                    return Err(CircuitError::UnsafeDiscard {
                        wire: *wire,
                        prob: 1.0 - prob,
                    });
                }
                state = state.project(p, value)?.drop_wire(p, value)?;
                live.remove(p);
            }
        }
    }

    // Reorder the surviving qubits to match the output declaration order.
    let out_qwires: Vec<WireId> = c
        .outputs
        .iter()
        .filter(|(_, k)| *k == WireKind::Qbit)
        .map(|(w, _)| *w)
        .collect();
    let perm: Vec<usize> = out_qwires.iter().map(|w| pos_of(&live, *w)).collect();
    let state = state.permute(&perm)?;
    let bit_outputs = c
        .outputs
        .iter()
        .filter(|(_, k)| *k == WireKind::Bit)
        .map(|(w, _)| bits[w])
        .collect();
    Ok(RunOutput {
        state,
        record,
        bit_outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{control, inverse, par, seq};
    use crate::qnum::{DEFAULT_MAX_QUBITS as MAXQ, EQ_TOL};
    use crate::rng::seeded_rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tu(c: &Circuit) -> UMatrix {
        to_unitary(c, MAXQ).unwrap()
    }

    #[test]
    fn empty_circuit_is_identity() {
        tu(&Circuit::identity(2)).assert_close(&UMatrix::identity(4), EQ_TOL);
    }

    #[test]
    fn double_h_is_identity() {
        let h = Circuit::single(1, CircOp::gate(GateName::H, vec![0]));
        let hh = seq(&h, &h).unwrap();
        assert_eq!(hh.gate_count().total_gates, 2);
        tu(&hh).assert_close(&UMatrix::identity(2), EQ_TOL);
    }

    #[test]
    fn bell_circuit_state() {
        let mut c = Circuit::identity(2);
        c.ops.push(CircOp::gate(GateName::H, vec![0]));
        c.ops.push(CircOp::gate(GateName::Cnot, vec![0, 1]));
        let u = tu(&c);
        let out = u.mul_vec(StateVector::zeros(2).amplitudes());
        assert!((out[0].re - FRAC_1_SQRT_2).abs() < EQ_TOL);
        assert!((out[3].re - FRAC_1_SQRT_2).abs() < EQ_TOL);
    }

    #[test]
    fn swap_circuit_matches_swap_matrix() {
        let c = Circuit::single(2, CircOp::gate(GateName::Swap, vec![0, 1]));
        tu(&c).assert_close(&gate_matrix(GateName::Swap, &[]).unwrap(), EQ_TOL);
    }

    #[test]
    fn par_is_kron() {
        let a = Circuit::single(1, CircOp::gate(GateName::H, vec![0]));
        let b = Circuit::identity(1);
        let p = par(&a, &b);
        let expected = gate_matrix(GateName::H, &[])
            .unwrap()
            .kron(&UMatrix::identity(2))
            .unwrap();
        tu(&p).assert_close(&expected, EQ_TOL);
    }

    #[test]
    fn par_x_x_flips_both() {
        let x = Circuit::single(1, CircOp::gate(GateName::X, vec![0]));
        let p = par(&x, &x);
        let mut rng = seeded_rng(0);
        let out = run(&p, &StateVector::zeros(2), &mut rng, MAXQ).unwrap();
        assert!(out.state.distance(&StateVector::basis(&[true, true])) < EQ_TOL);
    }

    #[test]
    fn control_x_is_cnot() {
        let x = Circuit::single(1, CircOp::gate(GateName::X, vec![0]));
        let cx = control(&x, Polarity::Positive).unwrap();
        tu(&cx).assert_close(&gate_matrix(GateName::Cnot, &[]).unwrap(), EQ_TOL);
    }

    #[test]
    fn control_h_is_block_diag() {
        let h = Circuit::single(1, CircOp::gate(GateName::H, vec![0]));
        let ch = control(&h, Polarity::Positive).unwrap();
        let expected = controlled(&gate_matrix(GateName::H, &[]).unwrap(), Polarity::Positive)
            .unwrap();
        tu(&ch).assert_close(&expected, 1e-9);
    }

    #[test]
    fn inverse_reverses_unitary() {
        let mut c = Circuit::identity(2);
        c.ops.push(CircOp::gate(GateName::H, vec![0]));
        c.ops.push(CircOp::gate(GateName::T, vec![1]));
        c.ops.push(CircOp::gate(GateName::Cnot, vec![0, 1]));
        let inv = inverse(&c).unwrap();
        tu(&inv).assert_close(&tu(&c).dagger(), 1e-9);
        tu(&seq(&c, &inv).unwrap()).assert_close(&UMatrix::identity(4), 1e-9);
    }

    #[test]
    fn run_empty_returns_input() {
        let s = StateVector::basis(&[true, false]);
        let mut rng = seeded_rng(0);
        let out = run(&Circuit::identity(2), &s, &mut rng, MAXQ).unwrap();
        assert!(out.state.distance(&s) < EQ_TOL);
        assert!(out.record.is_empty());
    }

    #[test]
    fn run_init_h_measure_shape() {
        // Fig-B.2-style: init, gates, then a measurement producing one bit.
        let c = Circuit {
            inputs: vec![],
            ops: vec![
                CircOp::Init {
                    wire: 0,
                    value: false,
                },
                CircOp::gate(GateName::H, vec![0]),
                CircOp::Measure { qwire: 0, bwire: 1 },
            ],
            outputs: vec![(1, WireKind::Bit)],
        };
        c.validate().unwrap();
        let mut rng = seeded_rng(7);
        let out = run(&c, &StateVector::scalar(), &mut rng, MAXQ).unwrap();
        assert_eq!(out.record.len(), 1);
        assert_eq!(out.bit_outputs.len(), 1);
        assert_eq!(out.state.n_qubits(), 0);
    }

    #[test]
    fn measurement_frequency_matches_probability() {
        let c = Circuit {
            inputs: vec![],
            ops: vec![
                CircOp::Init {
                    wire: 0,
                    value: false,
                },
                CircOp::gate(GateName::H, vec![0]),
                CircOp::Measure { qwire: 0, bwire: 1 },
            ],
            outputs: vec![(1, WireKind::Bit)],
        };
        let mut rng = seeded_rng(2024);
        let shots = 10_000;
        let mut ones = 0usize;
        for _ in 0..shots {
            let out = run(&c, &StateVector::scalar(), &mut rng, MAXQ).unwrap();
            ones += usize::from(out.record[0]);
        }
        let freq = ones as f64 / shots as f64;
        // 3 sigma for p = 0.5 at 10k shots
        assert!((freq - 0.5).abs() <= 0.015, "freq = {freq}");
    }

    #[test]
    fn discard_requires_classical_state() {
        let mut c = Circuit::identity(1);
        c.ops.push(CircOp::gate(GateName::H, vec![0]));
        c.ops.push(CircOp::Discard { wire: 0 });
        c.outputs = vec![];
        c.validate().unwrap();
        let mut rng = seeded_rng(0);
        assert!(matches!(
            run(&c, &StateVector::zeros(1), &mut rng, MAXQ),
            Err(CircuitError::UnsafeDiscard { .. })
        ));

        // but a computed-back ancilla discards fine
        let mut c = Circuit::identity(1);
        c.ops.push(CircOp::Init {
            wire: 1,
            value: false,
        });
        c.ops.push(CircOp::Discard { wire: 1 });
        c.outputs = vec![(0, WireKind::Qbit)];
        c.validate().unwrap();
        let out = run(&c, &StateVector::zeros(1), &mut rng, MAXQ).unwrap();
        assert_eq!(out.state.n_qubits(), 1);
    }

    #[test]
    fn run_agrees_with_to_unitary_on_basis_inputs() {
        // brute force over all basis inputs for a fixed pure circuit
        let mut c = Circuit::identity(3);
        c.ops.push(CircOp::gate(GateName::H, vec![1]));
        c.ops.push(CircOp::gate(GateName::Cnot, vec![1, 2]));
        c.ops.push(CircOp::gate(GateName::T, vec![0]));
        c.ops.push(CircOp::gate(GateName::Swap, vec![0, 2]));
        let u = tu(&c);
        for idx in 0..8usize {
            let input = StateVector::basis_index(3, idx);
            let mut rng = seeded_rng(0);
            let out = run(&c, &input, &mut rng, MAXQ).unwrap();
            let expected = u.mul_vec(input.amplitudes());
            let expected = StateVector::from_amplitudes(expected).unwrap();
            assert!(out.state.distance(&expected) < 1e-9);
        }
    }
}
