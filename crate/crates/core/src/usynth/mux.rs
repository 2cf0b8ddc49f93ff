//! Multiplexed-rotation and diagonal-operator circuit emission.
//!
//! A multiplexed rotation applies `R_axis(a_j)` to a target qubit when the
//! selector wires read the value `j`. The generic realization is the
//! gray-code ladder (`2^l` CNOTs for `2^l` angles). When only a suffix
//! `[live_from, 2^l)` of selector values can ever occur (state-preparation
//! don't-cares), dead branches are resolved by mirroring so that whole
//! selector bits drop out, which is what keeps the synthesized circuits
//! inside the CNOT budget.
//!
//! Every emitter returns the angle vector its circuit actually realizes;
//! dead entries carry the mirror-resolved values so that callers can track
//! the exact operator that was emitted.

use crate::circuit::{CircOp, WireId};
use crate::qnum::GateName;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Ry,
    Rz,
}

impl Axis {
    fn gate(self) -> GateName {
        match self {
            Axis::Ry => GateName::Ry,
            Axis::Rz => GateName::Rz,
        }
    }
}

fn rot(ops: &mut Vec<CircOp>, axis: Axis, target: WireId, angle: f64) {
    if angle != 0.0 {
        ops.push(CircOp::gate_with_params(axis.gate(), vec![angle], vec![target]));
    }
}

fn cnot(ops: &mut Vec<CircOp>, control: WireId, target: WireId) {
    ops.push(CircOp::gate(GateName::Cnot, vec![control, target]));
}

/// Gray-code ladder: exact full multiplexor (at least one selector).
fn emit_gray(
    ops: &mut Vec<CircOp>,
    axis: Axis,
    selectors: &[WireId],
    target: WireId,
    angles: &[f64],
) {
    let l = selectors.len();
    debug_assert!(l >= 1);
    let size = 1usize << l;
    debug_assert_eq!(angles.len(), size);
    if angles.iter().all(|a| *a == 0.0) {
        return;
    }
    let gray = |k: usize| k ^ (k >> 1);
    // effective angle for selector j is sum_k (-1)^{popcount(j & gray(k))} phi_k
    let mut phis = vec![0.0f64; size];
    for (k, phi) in phis.iter_mut().enumerate() {
        let g = gray(k);
        let mut acc = 0.0;
        for (j, a) in angles.iter().enumerate() {
            if (j & g).count_ones() % 2 == 0 {
                acc += a;
            } else {
                acc -= a;
            }
        }
        *phi = acc / size as f64;
    }
    for k in 0..size {
        rot(ops, axis, target, phis[k]);
        let diff = gray(k) ^ gray((k + 1) % size);
        let bit = diff.trailing_zeros() as usize;
        debug_assert_eq!(diff.count_ones(), 1);
        cnot(ops, selectors[l - 1 - bit], target);
    }
}

/// Emit a multiplexed rotation whose selector values below `live_from` are
/// don't-cares. Returns the realized angle vector.
pub fn emit_mux(
    ops: &mut Vec<CircOp>,
    axis: Axis,
    selectors: &[WireId],
    target: WireId,
    angles: &[f64],
    live_from: usize,
) -> Vec<f64> {
    let l = selectors.len();
    let size = 1usize << l;
    debug_assert_eq!(angles.len(), size);
    debug_assert!(live_from < size || size == 0);
    if l == 0 {
        rot(ops, axis, target, angles[0]);
        return vec![angles[0]];
    }
    let h = size / 2;
    if live_from >= h {
        // the top half is dead: mirror it onto the bottom half, dropping
        // the first selector entirely
        let sub = emit_mux(ops, axis, &selectors[1..], target, &angles[h..], live_from - h);
        let mut realized = sub.clone();
        realized.extend(sub);
        return realized;
    }
    if live_from == 0 {
        emit_gray(ops, axis, selectors, target, angles);
        return angles.to_vec();
    }
    // ragged split: a+ is fully constrained, a- keeps the dead prefix
    let mut minus = vec![0.0f64; h];
    for i in live_from..h {
        minus[i] = (angles[i] - angles[i + h]) / 2.0;
    }
    // dry-run the minus multiplexor to learn its realized dead prefix
    let mut minus_ops = Vec::new();
    let minus_realized = emit_mux(
        &mut minus_ops,
        axis,
        &selectors[1..],
        target,
        &minus,
        live_from,
    );
    let mut plus = vec![0.0f64; h];
    for i in 0..h {
        if i < live_from {
            // the high entry is live; compensate the mirror value so that
            // a+ - a-hat lands exactly on it
            plus[i] = angles[i + h] + minus_realized[i];
        } else {
            plus[i] = (angles[i] + angles[i + h]) / 2.0;
        }
    }
    let plus_realized = emit_mux(ops, axis, &selectors[1..], target, &plus, 0);
    cnot(ops, selectors[0], target);
    ops.extend(minus_ops);
    cnot(ops, selectors[0], target);

    let mut realized = vec![0.0f64; size];
    for i in 0..h {
        realized[i] = plus_realized[i] + minus_realized[i];
        realized[i + h] = plus_realized[i] - minus_realized[i];
    }
    realized
}

/// Emit a diagonal operator `diag(e^{i theta_j})` over the given wires, up
/// to a global phase. Entries below `live_from` are don't-cares. Returns
/// the realized phase vector (exact up to one uniform offset).
pub fn emit_diag(
    ops: &mut Vec<CircOp>,
    wires: &[WireId],
    theta: &[f64],
    live_from: usize,
) -> Vec<f64> {
    let n = wires.len();
    debug_assert_eq!(theta.len(), 1usize << n);
    if n == 0 {
        return vec![0.0];
    }
    let pairs = theta.len() / 2;
    let mut theta = theta.to_vec();
    // a boundary pair with a dead low entry: replicate the live value
    if live_from % 2 == 1 {
        theta[live_from - 1] = theta[live_from];
    }
    let live_pairs = live_from / 2;
    let mut deltas = vec![0.0f64; pairs];
    let mut avgs = vec![0.0f64; pairs];
    for p in live_pairs..pairs {
        deltas[p] = theta[2 * p + 1] - theta[2 * p];
        avgs[p] = 0.5 * (theta[2 * p] + theta[2 * p + 1]);
    }
    let realized_delta = emit_mux(
        ops,
        Axis::Rz,
        &wires[..n - 1],
        wires[n - 1],
        &deltas,
        live_pairs,
    );
    let realized_avg = emit_diag(ops, &wires[..n - 1], &avgs, live_pairs);
    let mut realized = vec![0.0f64; theta.len()];
    for p in 0..pairs {
        realized[2 * p] = realized_avg[p] - realized_delta[p] / 2.0;
        realized[2 * p + 1] = realized_avg[p] + realized_delta[p] / 2.0;
    }
    realized
}

/// Emit `diag(e^{i gamma}, 1, ..., 1)` (phase on the all-zeros state), up
/// to a global phase.
pub fn emit_zero_flip(ops: &mut Vec<CircOp>, wires: &[WireId], gamma: f64) {
    match wires.len() {
        0 => {}
        1 => {
            // diag(e^{i g}, 1) = e^{i g/2} Rz(-g)
            rot(ops, Axis::Rz, wires[0], -gamma);
        }
        n => {
            let mut angles = vec![0.0f64; 1 << (n - 1)];
            angles[0] = -gamma;
            emit_mux(ops, Axis::Rz, &wires[..n - 1], wires[n - 1], &angles, 0);
            emit_zero_flip(ops, &wires[..n - 1], gamma / 2.0);
        }
    }
}

/// Reverse a block of pure rotation/CNOT ops.
pub fn invert_ops(ops: &[CircOp]) -> Vec<CircOp> {
    ops.iter()
        .rev()
        .map(|op| match op {
            CircOp::Gate {
                name,
                dagger,
                params,
                controls,
                targets,
            } => CircOp::Gate {
                name: *name,
                dagger: *dagger,
                params: if name.param_arity() > 0 {
                    params.iter().map(|p| -p).collect()
                } else {
                    params.clone()
                },
                controls: controls.clone(),
                targets: targets.clone(),
            },
            other => other.clone(),
        })
        .collect()
}

/// Structural description of an op for the commutation analysis.
enum OpShape {
    Cnot { control: WireId, target: WireId },
    Rot { axis: GateName, target: WireId },
    Other,
}

fn shape(op: &CircOp) -> OpShape {
    match op {
        CircOp::Gate {
            name: GateName::Cnot,
            controls,
            targets,
            ..
        } if controls.is_empty() => OpShape::Cnot {
            control: targets[0],
            target: targets[1],
        },
        CircOp::Gate {
            name: name @ (GateName::Rx | GateName::Ry | GateName::Rz),
            controls,
            targets,
            ..
        } if controls.is_empty() => OpShape::Rot {
            axis: *name,
            target: targets[0],
        },
        _ => OpShape::Other,
    }
}

/// Whether two plain ops commute. Conservative: CNOTs commute unless one's
/// target is the other's control; an Rz slides along a CNOT control leg;
/// rotations commute with anything disjoint.
fn commutes(a: &CircOp, b: &CircOp) -> bool {
    match (shape(a), shape(b)) {
        (
            OpShape::Cnot {
                control: c1,
                target: t1,
            },
            OpShape::Cnot {
                control: c2,
                target: t2,
            },
        ) => t1 != c2 && t2 != c1,
        (OpShape::Cnot { control, target }, OpShape::Rot { axis, target: rt })
        | (OpShape::Rot { axis, target: rt }, OpShape::Cnot { control, target }) => {
            rt != target && (rt != control || axis == GateName::Rz)
        }
        (OpShape::Rot { axis: a1, target: t1 }, OpShape::Rot { axis: a2, target: t2 }) => {
            t1 != t2 || a1 == a2
        }
        _ => false,
    }
}

/// Peephole pass: cancel CNOT pairs and merge same-axis rotations that can
/// be brought together by sliding over commuting ops.
pub fn peephole(mut ops: Vec<CircOp>) -> Vec<CircOp> {
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < ops.len() {
            let mut matched: Option<usize> = None;
            match shape(&ops[i]) {
                OpShape::Cnot { .. } => {
                    let mut j = i + 1;
                    while j < ops.len() {
                        if ops[j] == ops[i] {
                            matched = Some(j);
                            break;
                        }
                        if !commutes(&ops[i], &ops[j]) {
                            break;
                        }
                        j += 1;
                    }
                    if let Some(j) = matched {
                        ops.remove(j);
                        ops.remove(i);
                        changed = true;
                        continue;
                    }
                }
                OpShape::Rot { axis, target } => {
                    let mut j = i + 1;
                    while j < ops.len() {
                        if let OpShape::Rot {
                            axis: a2,
                            target: t2,
                        } = shape(&ops[j])
                        {
                            if a2 == axis && t2 == target {
                                matched = Some(j);
                                break;
                            }
                        }
                        if !commutes(&ops[i], &ops[j]) {
                            break;
                        }
                        j += 1;
                    }
                    if let Some(j) = matched {
                        let extra = match &ops[j] {
                            CircOp::Gate { params, .. } => params[0],
                            _ => unreachable!(),
                        };
                        ops.remove(j);
                        if let CircOp::Gate { params, .. } = &mut ops[i] {
                            params[0] += extra;
                            if params[0] == 0.0 {
                                ops.remove(i);
                            }
                        }
                        changed = true;
                        continue;
                    }
                }
                OpShape::Other => {}
            }
            i += 1;
        }
        if !changed {
            return ops;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{to_unitary, Circuit, WireKind};
    use crate::qnum::{StateVector, UMatrix, DEFAULT_MAX_QUBITS as MAXQ};
    use crate::rng::seeded_rng;
    use num_complex::Complex64;
    use rand::Rng;

    fn circ(n: usize, ops: Vec<CircOp>) -> Circuit {
        Circuit {
            inputs: (0..n as WireId).map(|w| (w, WireKind::Qbit)).collect(),
            ops,
            outputs: (0..n as WireId).map(|w| (w, WireKind::Qbit)).collect(),
        }
    }

    /// Reference multiplexed-rotation matrix.
    fn mux_matrix(axis: Axis, l: usize, angles: &[f64]) -> UMatrix {
        let dim = 1usize << (l + 1);
        let mut m = UMatrix::zero(dim);
        for j in 0..1usize << l {
            let g = crate::qnum::gate_matrix(axis.gate(), &[angles[j]]).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    m[(j * 2 + r, j * 2 + c)] = g[(r, c)];
                }
            }
        }
        m
    }

    #[test]
    fn full_mux_matches_reference() {
        let mut rng = seeded_rng(3);
        for l in 0..=3usize {
            let angles: Vec<f64> = (0..1 << l).map(|_| rng.random_range(-3.0..3.0)).collect();
            for axis in [Axis::Ry, Axis::Rz] {
                let mut ops = Vec::new();
                let selectors: Vec<WireId> = (0..l as WireId).collect();
                let realized =
                    emit_mux(&mut ops, axis, &selectors, l as WireId, &angles, 0);
                assert_eq!(realized, angles);
                let u = to_unitary(&circ(l + 1, ops), MAXQ).unwrap();
                u.assert_close(&mux_matrix(axis, l, &angles), 1e-9);
            }
        }
    }

    #[test]
    fn live_suffix_mux_realizes_live_angles() {
        let mut rng = seeded_rng(17);
        for l in 1..=3usize {
            let size = 1usize << l;
            for live_from in 1..size {
                let angles: Vec<f64> =
                    (0..size).map(|_| rng.random_range(-3.0..3.0)).collect();
                let mut ops = Vec::new();
                let selectors: Vec<WireId> = (0..l as WireId).collect();
                let realized =
                    emit_mux(&mut ops, Axis::Ry, &selectors, l as WireId, &angles, live_from);
                // live entries must be exact
                for j in live_from..size {
                    assert!(
                        (realized[j] - angles[j]).abs() < 1e-12,
                        "l={l} live_from={live_from} j={j}"
                    );
                }
                // the emitted circuit must realize the returned vector
                let u = to_unitary(&circ(l + 1, ops), MAXQ).unwrap();
                u.assert_close(&mux_matrix(Axis::Ry, l, &realized), 1e-9);
            }
        }
    }

    #[test]
    fn live_suffix_mux_saves_cnots() {
        // live range {6, 7} of 8: the mux strips to a single selector bit
        let angles = vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0];
        let mut ops = Vec::new();
        let realized = emit_mux(&mut ops, Axis::Ry, &[0, 1, 2], 3, &angles, 6);
        assert!((realized[6] - 1.0).abs() < 1e-12);
        let cnots = ops
            .iter()
            .filter(|op| matches!(op, CircOp::Gate { name: GateName::Cnot, .. }))
            .count();
        assert!(cnots <= 2, "expected a stripped mux, got {cnots} CNOTs");
    }

    #[test]
    fn diag_emission_matches_reference() {
        let mut rng = seeded_rng(23);
        for n in 1..=3usize {
            let dim = 1usize << n;
            let theta: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
            let mut ops = Vec::new();
            let wires: Vec<WireId> = (0..n as WireId).collect();
            let realized = emit_diag(&mut ops, &wires, &theta, 0);
            // realized must equal theta up to a uniform offset
            let offset = realized[0] - theta[0];
            for (r, t) in realized.iter().zip(&theta) {
                assert!((r - t - offset).abs() < 1e-9);
            }
            let u = to_unitary(&circ(n, ops), MAXQ).unwrap();
            let expected = UMatrix::from_fn(dim, |r, c| {
                if r == c {
                    Complex64::from_polar(1.0, theta[r])
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            assert!(u.global_phase_distance(&expected) < 1e-9);
        }
    }

    #[test]
    fn zero_flip_is_phase_on_all_zeros() {
        for n in 1..=4usize {
            let gamma = 2.2;
            let mut ops = Vec::new();
            let wires: Vec<WireId> = (0..n as WireId).collect();
            emit_zero_flip(&mut ops, &wires, gamma);
            let dim = 1usize << n;
            let u = to_unitary(&circ(n, ops.clone()), MAXQ).unwrap();
            let expected = UMatrix::from_fn(dim, |r, c| {
                if r == c {
                    if r == 0 {
                        Complex64::from_polar(1.0, gamma)
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            assert!(u.global_phase_distance(&expected) < 1e-9);
            let cnots = ops
                .iter()
                .filter(|op| matches!(op, CircOp::Gate { name: GateName::Cnot, .. }))
                .count();
            assert_eq!(cnots, (1 << n) - 2);
        }
    }

    #[test]
    fn invert_ops_roundtrip() {
        let mut ops = Vec::new();
        emit_mux(&mut ops, Axis::Ry, &[0, 1], 2, &[0.3, -0.4, 0.9, 0.1], 0);
        let mut all = ops.clone();
        all.extend(invert_ops(&ops));
        let u = to_unitary(&circ(3, all), MAXQ).unwrap();
        u.assert_close(&UMatrix::identity(8), 1e-9);
    }

    #[test]
    fn peephole_cancels_adjacent_cnots() {
        let ops = vec![
            CircOp::gate(GateName::Cnot, vec![0, 1]),
            CircOp::gate(GateName::Cnot, vec![0, 1]),
            CircOp::gate_with_params(GateName::Ry, vec![0.5], vec![0]),
            CircOp::gate_with_params(GateName::Ry, vec![-0.5], vec![0]),
            CircOp::gate(GateName::Cnot, vec![1, 0]),
        ];
        let out = peephole(ops);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn ry_prep_state_reaches_target() {
        // sanity for the state-prep use of muxes: prepare a random real
        // nonnegative state via the level-by-level angle computation
        let mut rng = seeded_rng(31);
        let n = 3usize;
        let dim = 1 << n;
        let raw: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        let norm: f64 = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let target: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        let ops = super::super::synth::ry_prep_ops(&(0..n as WireId).collect::<Vec<_>>(), &target, 0);
        let u = to_unitary(&circ(n, ops), MAXQ).unwrap();
        let got = u.mul_vec(StateVector::zeros(n).amplitudes());
        for (g, t) in got.iter().zip(&target) {
            assert!((g.re - t).abs() < 1e-9 && g.im.abs() < 1e-12);
        }
    }
}
