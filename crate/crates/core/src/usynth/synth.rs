//! Circuit synthesis from dense unitary matrices via Householder
//! factorization.
//!
//! `synth_householder` peels the input column by column: a diagonal phase
//! correction makes the column real and nonnegative on its live suffix,
//! then a real Householder reflector (state-prep conjugation of an
//! all-zeros phase flip) sends it onto the pivot axis. The residual is a
//! unimodular diagonal. Dead selector branches of every multiplexor are
//! don't-cares, which is what keeps the CNOT count within the `O(4^n)`
//! budget.

use num_complex::Complex64;

use super::mux::{emit_diag, emit_zero_flip, emit_mux, invert_ops, peephole, Axis};
use super::USynthError;
use crate::circuit::{CircOp, Circuit, WireId, WireKind};
use crate::qnum::{Amplitude, HouseholderFactor, UMatrix};

/// Angles of the RY tree preparing a real nonnegative unit state, with the
/// live suffix starting at `live_from`.
pub(crate) fn ry_prep_ops(wires: &[WireId], amplitudes: &[f64], live_from: usize) -> Vec<CircOp> {
    let n = wires.len();
    debug_assert_eq!(amplitudes.len(), 1 << n);
    let mut ops = Vec::new();
    // subtree norms bottom-up: norms[l][p] over the 2^l subtrees at level l
    let mut norms: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    norms.push(amplitudes.iter().map(|a| a * a).collect());
    for _ in 0..n {
        let prev = norms.last().expect("non-empty");
        let next: Vec<f64> = prev.chunks(2).map(|c| c[0] + c[1]).collect();
        norms.push(next);
    }
    norms.reverse(); // norms[l] now has 2^l entries of squared subtree norms
    for (l, &wire) in wires.iter().enumerate() {
        let selectors = &wires[..l];
        let angles: Vec<f64> = (0..1usize << l)
            .map(|p| {
                let n0 = norms[l + 1][2 * p].max(0.0).sqrt();
                let n1 = norms[l + 1][2 * p + 1].max(0.0).sqrt();
                if n0 == 0.0 && n1 == 0.0 {
                    0.0
                } else {
                    2.0 * n1.atan2(n0)
                }
            })
            .collect();
        let live = live_from >> (n - l);
        emit_mux(&mut ops, Axis::Ry, selectors, wire, &angles, live);
    }
    ops
}

/// First index from which the vector has all its support.
fn support_start(v: &[Amplitude]) -> usize {
    v.iter()
        .position(|c| c.norm_sqr() > 1e-28)
        .unwrap_or(v.len())
}

/// Realize a Householder factor `I - a |u><u|` over `{CNOT, RY, RZ}` up to
/// a global phase: a state-preparation circuit `V` with `V|0..0> = u/|u|`
/// (RY cascade plus a diagonal phase layer), conjugating a phase applied on
/// the all-zeros state.
pub fn reflection_to_circuit(
    factor: &HouseholderFactor,
    n: usize,
) -> Result<Circuit, USynthError> {
    let dim = 1usize << n;
    if factor.dim() != dim {
        return Err(USynthError::Dimension {
            expected: dim,
            got: factor.dim(),
        });
    }
    let wires: Vec<WireId> = (0..n as WireId).collect();
    let mut circuit = Circuit::identity(n);
    let norm_sqr: f64 = factor.u.iter().map(|c| c.norm_sqr()).sum();
    if factor.is_identity() {
        return Ok(circuit);
    }
    // eigenphase on the |u> axis: 1 - a |u|^2, unimodular for a unitary factor
    let lambda = Complex64::new(1.0, 0.0) - factor.a * norm_sqr;
    if (lambda.norm() - 1.0).abs() > 1e-6 {
        return Err(USynthError::NotReflection {
            deviation: (lambda.norm() - 1.0).abs(),
        });
    }
    let gamma = lambda.arg();
    if gamma.abs() < 1e-14 {
        return Ok(circuit);
    }
    let norm = norm_sqr.sqrt();
    let unit: Vec<Complex64> = factor.u.iter().map(|c| c / norm).collect();
    let live_from = support_start(&unit);
    let magnitudes: Vec<f64> = unit.iter().map(|c| c.norm()).collect();
    let mut phases: Vec<f64> = unit.iter().map(|c| c.arg()).collect();
    for i in 0..live_from {
        phases[i] = phases.get(live_from).copied().unwrap_or(0.0);
    }

    // V = D . R with R|0..0> = |magnitudes>, D = diag(e^{i phase})
    let mut prep = ry_prep_ops(&wires, &magnitudes, live_from);
    emit_diag(&mut prep, &wires, &phases, live_from);

    let mut ops = invert_ops(&prep);
    emit_zero_flip(&mut ops, &wires, gamma);
    ops.extend(prep);
    circuit.ops = peephole(ops);
    circuit.validate().map_err(USynthError::Circuit)?;
    Ok(circuit)
}

/// Synthesis report.
#[derive(Debug, Clone)]
pub struct HouseholderSynth {
    pub circuit: Circuit,
    pub cnot_count: usize,
    pub rotation_count: usize,
}

/// Synthesize a circuit for a dense unitary, n <= 6 qubits.
pub fn synth_householder(u: &UMatrix, max_qubits: usize) -> Result<HouseholderSynth, USynthError> {
    u.check_unitary(1e-8).map_err(USynthError::Qnum)?;
    let dim = u.dim();
    let n = u.n_qubits();
    if n > 6 || n > max_qubits {
        return Err(USynthError::Width { n, max: 6.min(max_qubits) });
    }
    let wires: Vec<WireId> = (0..n as WireId).collect();
    let mut work = u.clone();
    // per-factor op blocks, assembled in reverse at the end
    let mut blocks: Vec<Vec<CircOp>> = Vec::new();

    for k in 0..dim {
        let col = work.column(k);
        let below: f64 = col[k + 1..].iter().map(|c| c.norm_sqr()).sum();
        if below <= 1e-24 {
            continue; // pivot already reached; its phase lands in the diagonal
        }
        // diagonal correction: suffix phases cancel the column's arguments
        let mut theta = vec![0.0f64; dim];
        for i in k..dim {
            theta[i] = if col[i].norm_sqr() > 1e-28 {
                -col[i].arg()
            } else {
                0.0
            };
        }
        // resolve the realized diagonal (the emitted ops are discarded;
        // only the inverse appears in the output circuit)
        let mut scratch = Vec::new();
        let realized = emit_diag(&mut scratch, &wires, &theta, k);
        // apply the realized diagonal to the working matrix
        for r in 0..dim {
            let phase = Complex64::from_polar(1.0, realized[r]);
            for c in 0..dim {
                work[(r, c)] *= phase;
            }
        }

        // real reflector sending the column's magnitudes to -e_k (the
        // realized diagonal leaves a uniform phase, so the column is a
        // unimodular multiple of its modulus vector and the reflector acts
        // on it linearly)
        let col = work.column(k);
        let mut reflect_target = vec![0.0f64; dim];
        for i in k..dim {
            reflect_target[i] = col[i].norm();
        }
        reflect_target[k] += 1.0; // u = r + e_k
        let unorm: f64 = reflect_target.iter().map(|x| x * x).sum::<f64>().sqrt();
        let unit: Vec<f64> = reflect_target.iter().map(|x| x / unorm).collect();
        let prep = ry_prep_ops(&wires, &unit, k);
        let mut r_ops = invert_ops(&prep);
        emit_zero_flip(&mut r_ops, &wires, std::f64::consts::PI);
        r_ops.extend(prep);
        // R = I - 2 |unit><unit| applied to the working matrix
        let mut reflected = work.clone();
        for c in 0..dim {
            let dot: Complex64 = unit
                .iter()
                .enumerate()
                .map(|(i, x)| Complex64::new(*x, 0.0) * work[(i, c)])
                .sum();
            for r in 0..dim {
                reflected[(r, c)] = work[(r, c)] - 2.0 * unit[r] * dot;
            }
        }
        work = reflected;

        // circuit time order inside a factor: R then D^dag. The angle
        // resolution is linear, so emitting the negated intent with the same
        // live range realizes exactly the negated diagonal.
        let mut block = r_ops;
        let minus_theta: Vec<f64> = theta.iter().map(|t| -t).collect();
        let mut ddag_ops = Vec::new();
        let check = emit_diag(&mut ddag_ops, &wires, &minus_theta, k);
        debug_assert!(check
            .iter()
            .zip(&realized)
            .all(|(a, b)| (a + b).abs() < 1e-9));
        block.extend(ddag_ops);
        blocks.push(block);
    }

    // residual diagonal
    let phi: Vec<f64> = (0..dim).map(|i| work[(i, i)].arg()).collect();
    let mut ops = Vec::new();
    emit_diag(&mut ops, &wires, &phi, 0);
    for block in blocks.into_iter().rev() {
        ops.extend(block);
    }
    let ops = peephole(ops);
    let circuit = Circuit {
        inputs: wires.iter().map(|w| (*w, WireKind::Qbit)).collect(),
        ops,
        outputs: wires.iter().map(|w| (*w, WireKind::Qbit)).collect(),
    };
    circuit.validate().map_err(USynthError::Circuit)?;
    let cnot_count = circuit.cnot_count();
    let rotation_count = circuit.rotation_count();
    Ok(HouseholderSynth {
        circuit,
        cnot_count,
        rotation_count,
    })
}
