//! Circuit intermediate representation: typed wires, ops, the high-level
//! combinators (`seq`, `par`, `inverse`, `control`), gate counting, and the
//! JSON interchange format.
//!
//! Wires carry stable integer ids; combinators rename via a fresh-id supply
//! rather than positional splicing.

mod json;
mod sim;

pub use sim::{run, to_unitary, RunOutput};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use crate::qnum::Polarity;
use crate::qnum::{GateName, QnumError};

pub type WireId = u32;

/// Wires are either quantum or classical; bit wires are only ever produced
/// by measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WireKind {
    #[serde(rename = "qbit")]
    Qbit,
    #[serde(rename = "bit")]
    Bit,
}

/// A single circuit operation.
#[derive(Debug, Clone, PartialEq)]
pub enum CircOp {
    Init {
        wire: WireId,
        value: bool,
    },
    Gate {
        name: GateName,
        /// Inverted S/T are flagged rather than renamed; parametric gates
        /// invert by negating their angle instead.
        dagger: bool,
        params: Vec<f64>,
        controls: Vec<(WireId, Polarity)>,
        targets: Vec<WireId>,
    },
    Measure {
        qwire: WireId,
        bwire: WireId,
    },
    Discard {
        wire: WireId,
    },
}

impl CircOp {
    pub fn gate(name: GateName, targets: Vec<WireId>) -> CircOp {
        CircOp::Gate {
            name,
            dagger: false,
            params: Vec::new(),
            controls: Vec::new(),
            targets,
        }
    }

    pub fn gate_with_params(name: GateName, params: Vec<f64>, targets: Vec<WireId>) -> CircOp {
        CircOp::Gate {
            name,
            dagger: false,
            params,
            controls: Vec::new(),
            targets,
        }
    }

    pub fn kind_label(&self) -> &'static str {
        match self {
            CircOp::Init { .. } => "init",
            CircOp::Gate { .. } => "gate",
            CircOp::Measure { .. } => "measure",
            CircOp::Discard { .. } => "discard",
        }
    }
}

/// Ordered list of wire operations over typed wires.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub inputs: Vec<(WireId, WireKind)>,
    pub ops: Vec<CircOp>,
    pub outputs: Vec<(WireId, WireKind)>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("wire {0} referenced but not live")]
    WireNotLive(WireId),
    #[error("wire {0} introduced twice")]
    DuplicateWire(WireId),
    #[error("op {index} ({op}): controls and targets must be disjoint")]
    OverlappingOperands { index: usize, op: String },
    #[error("op {index}: wire {wire} has kind {kind:?}, expected {expected:?}")]
    KindMismatch {
        index: usize,
        wire: WireId,
        kind: WireKind,
        expected: WireKind,
    },
    #[error("outputs do not match the live wires at the end of the circuit")]
    BadOutputs,
    #[error("gate {gate} expects {expected} target(s), got {got}")]
    TargetArity {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("seq: output arity/kind of the first circuit does not match inputs of the second")]
    SeqMismatch,
    #[error("circuit is not pure: op {index} is a {kind}")]
    NotPure { index: usize, kind: &'static str },
    #[error("discard of wire {wire}: not in a classical basis state (min branch prob {prob:.3e})")]
    UnsafeDiscard { wire: WireId, prob: f64 },
    #[error("input width mismatch: circuit has {expected} qbit inputs, state has {got}")]
    InputWidth { expected: usize, got: usize },
    #[error(transparent)]
    Qnum(#[from] QnumError),
}

impl Circuit {
    /// Circuit with `n` fresh qbit inputs (ids `0..n`) and no ops.
    pub fn identity(n: usize) -> Circuit {
        let wires: Vec<(WireId, WireKind)> =
            (0..n as WireId).map(|w| (w, WireKind::Qbit)).collect();
        Circuit {
            inputs: wires.clone(),
            ops: Vec::new(),
            outputs: wires,
        }
    }

    /// Single-gate circuit over `n` wires.
    pub fn single(n: usize, op: CircOp) -> Circuit {
        let mut c = Circuit::identity(n);
        c.ops.push(op);
        c
    }

    pub fn n_qbit_inputs(&self) -> usize {
        self.inputs
            .iter()
            .filter(|(_, k)| *k == WireKind::Qbit)
            .count()
    }

    /// All wires ever live in the circuit, with their kinds.
    fn all_wires(&self) -> BTreeMap<WireId, WireKind> {
        let mut m: BTreeMap<WireId, WireKind> = self.inputs.iter().cloned().collect();
        for op in &self.ops {
            match op {
                CircOp::Init { wire, .. } => {
                    m.insert(*wire, WireKind::Qbit);
                }
                CircOp::Measure { bwire, .. } => {
                    m.insert(*bwire, WireKind::Bit);
                }
                _ => {}
            }
        }
        m
    }

    fn fresh_start(&self) -> WireId {
        self.all_wires().keys().max().map_or(0, |w| w + 1)
    }

    /// Check well-scopedness: every referenced wire is live (introduced by
    /// inputs or `Init`, not yet measured/discarded), controls and targets
    /// are disjoint, and the outputs are exactly the wires live at the end.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut live: BTreeMap<WireId, WireKind> = BTreeMap::new();
        for (w, k) in &self.inputs {
            if live.insert(*w, *k).is_some() {
                return Err(CircuitError::DuplicateWire(*w));
            }
        }
        for (index, op) in self.ops.iter().enumerate() {
            match op {
                CircOp::Init { wire, .. } => {
                    if live.contains_key(wire) {
                        return Err(CircuitError::DuplicateWire(*wire));
                    }
                    live.insert(*wire, WireKind::Qbit);
                }
                CircOp::Gate {
                    name,
                    controls,
                    targets,
                    ..
                } => {
                    let expected = name.target_arity();
                    if targets.len() != expected {
                        return Err(CircuitError::TargetArity {
                            gate: name.to_string(),
                            expected,
                            got: targets.len(),
                        });
                    }
                    let mut seen = Vec::new();
                    for w in targets.iter().chain(controls.iter().map(|(w, _)| w)) {
                        match live.get(w) {
                            None => return Err(CircuitError::WireNotLive(*w)),
                            Some(WireKind::Bit) => {
                                return Err(CircuitError::KindMismatch {
                                    index,
                                    wire: *w,
                                    kind: WireKind::Bit,
                                    expected: WireKind::Qbit,
                                })
                            }
                            Some(WireKind::Qbit) => {}
                        }
                        if seen.contains(w) {
                            return Err(CircuitError::OverlappingOperands {
                                index,
                                op: name.to_string(),
                            });
                        }
                        seen.push(*w);
                    }
                }
                CircOp::Measure { qwire, bwire } => {
                    match live.get(qwire) {
                        Some(WireKind::Qbit) => {}
                        Some(WireKind::Bit) => {
                            return Err(CircuitError::KindMismatch {
                                index,
                                wire: *qwire,
                                kind: WireKind::Bit,
                                expected: WireKind::Qbit,
                            })
                        }
                        None => return Err(CircuitError::WireNotLive(*qwire)),
                    }
                    live.remove(qwire);
                    if live.contains_key(bwire) {
                        return Err(CircuitError::DuplicateWire(*bwire));
                    }
                    live.insert(*bwire, WireKind::Bit);
                }
                CircOp::Discard { wire } => {
                    if live.remove(wire).is_none() {
                        return Err(CircuitError::WireNotLive(*wire));
                    }
                }
            }
        }
        let declared: BTreeMap<WireId, WireKind> = self.outputs.iter().cloned().collect();
        if declared != live || declared.len() != self.outputs.len() {
            return Err(CircuitError::BadOutputs);
        }
        Ok(())
    }

    /// Rename every wire id through `f`.
    fn rename(&self, f: impl Fn(WireId) -> WireId) -> Circuit {
        let map_list = |ws: &[(WireId, WireKind)]| ws.iter().map(|(w, k)| (f(*w), *k)).collect();
        Circuit {
            inputs: map_list(&self.inputs),
            ops: self
                .ops
                .iter()
                .map(|op| match op {
                    CircOp::Init { wire, value } => CircOp::Init {
                        wire: f(*wire),
                        value: *value,
                    },
                    CircOp::Gate {
                        name,
                        dagger,
                        params,
                        controls,
                        targets,
                    } => CircOp::Gate {
                        name: *name,
                        dagger: *dagger,
                        params: params.clone(),
                        controls: controls.iter().map(|(w, p)| (f(*w), *p)).collect(),
                        targets: targets.iter().map(|w| f(*w)).collect(),
                    },
                    CircOp::Measure { qwire, bwire } => CircOp::Measure {
                        qwire: f(*qwire),
                        bwire: f(*bwire),
                    },
                    CircOp::Discard { wire } => CircOp::Discard { wire: f(*wire) },
                })
                .collect(),
            outputs: map_list(&self.outputs),
        }
    }

    /// First op that is not a plain gate, if any.
    pub fn first_impure_op(&self) -> Option<(usize, &'static str)> {
        self.ops.iter().enumerate().find_map(|(i, op)| match op {
            CircOp::Gate { .. } => None,
            other => Some((i, other.kind_label())),
        })
    }

    pub fn is_pure(&self) -> bool {
        self.first_impure_op().is_none()
    }

    /// Exact multiset gate counts plus totals.
    pub fn gate_count(&self) -> GateCounts {
        let mut per_gate = BTreeMap::new();
        let mut counts = GateCounts::default();
        for op in &self.ops {
            match op {
                CircOp::Gate { name, dagger, .. } => {
                    let label = if *dagger {
                        format!("{name}dg")
                    } else {
                        name.to_string()
                    };
                    *per_gate.entry(label).or_insert(0) += 1;
                    counts.total_gates += 1;
                }
                CircOp::Init { .. } => counts.inits += 1,
                CircOp::Measure { .. } => counts.measurements += 1,
                CircOp::Discard { .. } => counts.discards += 1,
            }
        }
        counts.per_gate = per_gate;
        counts.qubits = self
            .all_wires()
            .values()
            .filter(|k| **k == WireKind::Qbit)
            .count();
        counts.ancillas = counts.inits;
        counts
    }

    /// CNOT-equivalent entangling count: gates named CNOT plus controlled X/NOT.
    pub fn cnot_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| match op {
                CircOp::Gate {
                    name, controls, ..
                } => match name {
                    GateName::Cnot => controls.is_empty(),
                    GateName::X | GateName::Not => controls.len() == 1,
                    _ => false,
                },
                _ => false,
            })
            .count()
    }

    pub fn rotation_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| {
                matches!(
                    op,
                    CircOp::Gate {
                        name: GateName::Rx | GateName::Ry | GateName::Rz,
                        ..
                    }
                )
            })
            .count()
    }
}

/// Gate-count report.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct GateCounts {
    pub per_gate: BTreeMap<String, usize>,
    pub total_gates: usize,
    pub inits: usize,
    pub measurements: usize,
    pub discards: usize,
    pub qubits: usize,
    pub ancillas: usize,
}

impl fmt::Display for GateCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits: {}", self.qubits)?;
        writeln!(f, "ancillas: {}", self.ancillas)?;
        writeln!(f, "gates: {}", self.total_gates)?;
        for (name, count) in &self.per_gate {
            writeln!(f, "  {name}: {count}")?;
        }
        writeln!(f, "inits: {}", self.inits)?;
        writeln!(f, "measurements: {}", self.measurements)?;
        write!(f, "discards: {}", self.discards)
    }
}

/// Sequential composition: wire-renamed concatenation. The outputs of `c1`
/// must match the inputs of `c2` in arity and kind.
pub fn seq(c1: &Circuit, c2: &Circuit) -> Result<Circuit, CircuitError> {
    if c1.outputs.len() != c2.inputs.len() {
        return Err(CircuitError::SeqMismatch);
    }
    for ((_, k1), (_, k2)) in c1.outputs.iter().zip(&c2.inputs) {
        if k1 != k2 {
            return Err(CircuitError::SeqMismatch);
        }
    }
    // c2's inputs take the ids of c1's outputs; c2's internal wires get
    // fresh ids above everything in c1.
    let fresh_base = c1.fresh_start();
    let mut map: BTreeMap<WireId, WireId> = BTreeMap::new();
    for ((out_id, _), (in_id, _)) in c1.outputs.iter().zip(&c2.inputs) {
        map.insert(*in_id, *out_id);
    }
    let mut next = fresh_base;
    for (w, _) in c2.all_wires() {
        map.entry(w).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
    }
    let renamed = c2.rename(|w| map[&w]);
    Ok(Circuit {
        inputs: c1.inputs.clone(),
        ops: c1.ops.iter().cloned().chain(renamed.ops).collect(),
        outputs: renamed.outputs,
    })
}

/// Parallel composition: disjoint union, `c1` on the high wires.
pub fn par(c1: &Circuit, c2: &Circuit) -> Circuit {
    let base = c1.fresh_start();
    let renamed = c2.rename(|w| w + base);
    Circuit {
        inputs: c1.inputs.iter().cloned().chain(renamed.inputs).collect(),
        ops: c1.ops.iter().cloned().chain(renamed.ops).collect(),
        outputs: c1.outputs.iter().cloned().chain(renamed.outputs).collect(),
    }
}

/// Invert a pure circuit: ops reversed, each gate replaced by its inverse.
pub fn inverse(c: &Circuit) -> Result<Circuit, CircuitError> {
    if let Some((index, kind)) = c.first_impure_op() {
        return Err(CircuitError::NotPure { index, kind });
    }
    let ops = c
        .ops
        .iter()
        .rev()
        .map(|op| match op {
            CircOp::Gate {
                name,
                dagger,
                params,
                controls,
                targets,
            } => {
                let (name, dagger, params) = if name.self_inverse() {
                    (*name, false, params.clone())
                } else if name.param_arity() > 0 {
                    (*name, false, params.iter().map(|p| -p).collect())
                } else {
                    (*name, !dagger, params.clone())
                };
                CircOp::Gate {
                    name,
                    dagger,
                    params,
                    controls: controls.clone(),
                    targets: targets.clone(),
                }
            }
            _ => unreachable!("pure circuit contains only gates"),
        })
        .collect();
    Ok(Circuit {
        inputs: c.outputs.clone(),
        ops,
        outputs: c.inputs.clone(),
    })
}

/// Add one fresh control wire (as the new first input); every gate gains
/// that control.
pub fn control(c: &Circuit, polarity: Polarity) -> Result<Circuit, CircuitError> {
    if let Some((index, kind)) = c.first_impure_op() {
        return Err(CircuitError::NotPure { index, kind });
    }
    let ctrl = c.fresh_start();
    let ops = c
        .ops
        .iter()
        .map(|op| match op {
            CircOp::Gate {
                name,
                dagger,
                params,
                controls,
                targets,
            } => {
                let mut controls = controls.clone();
                controls.insert(0, (ctrl, polarity));
                CircOp::Gate {
                    name: *name,
                    dagger: *dagger,
                    params: params.clone(),
                    controls,
                    targets: targets.clone(),
                }
            }
            _ => unreachable!("pure circuit contains only gates"),
        })
        .collect();
    let with_ctrl = |ws: &[(WireId, WireKind)]| {
        std::iter::once((ctrl, WireKind::Qbit))
            .chain(ws.iter().cloned())
            .collect()
    };
    Ok(Circuit {
        inputs: with_ctrl(&c.inputs),
        ops,
        outputs: with_ctrl(&c.outputs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::EQ_TOL;

    fn h_on(n: usize, w: WireId) -> Circuit {
        Circuit::single(n, CircOp::gate(GateName::H, vec![w]))
    }

    #[test]
    fn seq_identity_left_keeps_circuit() {
        let c = h_on(1, 0);
        let s = seq(&Circuit::identity(1), &c).unwrap();
        assert_eq!(s.ops, c.ops);
        assert_eq!(s.gate_count().total_gates, 1);
    }

    #[test]
    fn seq_counts_add() {
        let c = h_on(2, 0);
        let s = seq(&c, &c).unwrap();
        assert_eq!(s.gate_count().total_gates, 2);
        s.validate().unwrap();
    }

    #[test]
    fn seq_arity_mismatch_rejected() {
        assert!(matches!(
            seq(&Circuit::identity(1), &Circuit::identity(2)),
            Err(CircuitError::SeqMismatch)
        ));
    }

    #[test]
    fn par_of_empties_is_empty() {
        let p = par(&Circuit::identity(0), &Circuit::identity(0));
        assert!(p.inputs.is_empty() && p.ops.is_empty());
    }

    #[test]
    fn inverse_of_inverse_is_structural_identity() {
        let mut c = Circuit::identity(2);
        c.ops.push(CircOp::gate(GateName::H, vec![0]));
        c.ops.push(CircOp::gate(GateName::T, vec![1]));
        c.ops.push(CircOp::gate_with_params(GateName::Rz, vec![0.3], vec![0]));
        c.ops.push(CircOp::gate(GateName::Cnot, vec![0, 1]));
        let cc = inverse(&inverse(&c).unwrap()).unwrap();
        assert_eq!(c, cc);
    }

    #[test]
    fn inverse_rejects_measurement() {
        let mut c = Circuit::identity(1);
        c.ops.push(CircOp::Measure { qwire: 0, bwire: 1 });
        c.outputs = vec![(1, WireKind::Bit)];
        c.validate().unwrap();
        let err = inverse(&c).unwrap_err();
        assert!(matches!(
            err,
            CircuitError::NotPure {
                index: 0,
                kind: "measure"
            }
        ));
    }

    #[test]
    fn control_of_empty_is_wider_identity() {
        let c = control(&Circuit::identity(1), Polarity::Positive).unwrap();
        assert_eq!(c.inputs.len(), 2);
        assert!(c.ops.is_empty());
        c.validate().unwrap();
    }

    #[test]
    fn fig_c3_style_combinator_counts() {
        // seq(inverse(V), seq(control(U), V)) with 1-gate U and 1-gate V.
        let v = Circuit {
            inputs: vec![(0, WireKind::Qbit), (1, WireKind::Qbit)],
            ops: vec![CircOp::gate(GateName::H, vec![1])],
            outputs: vec![(0, WireKind::Qbit), (1, WireKind::Qbit)],
        };
        let u = h_on(1, 0);
        let cu = control(&u, Polarity::Positive).unwrap();
        let combined = seq(&inverse(&v).unwrap(), &seq(&cu, &v).unwrap()).unwrap();
        combined.validate().unwrap();
        let counts = combined.gate_count();
        assert_eq!(counts.per_gate["H"], 3); // V, V^-1 (H self-inverse) and controlled U
        assert_eq!(counts.total_gates, 3);
        let controlled_gates = combined
            .ops
            .iter()
            .filter(|op| matches!(op, CircOp::Gate { controls, .. } if !controls.is_empty()))
            .count();
        assert_eq!(controlled_gates, 1);
    }

    #[test]
    fn empty_circuit_counts_are_zero() {
        let counts = Circuit::identity(0).gate_count();
        assert_eq!(counts.total_gates, 0);
        assert_eq!(counts.qubits, 0);
        assert!(counts.per_gate.is_empty());
    }

    #[test]
    fn validate_catches_scope_errors() {
        let mut c = Circuit::identity(1);
        c.ops.push(CircOp::gate(GateName::H, vec![3]));
        assert!(matches!(c.validate(), Err(CircuitError::WireNotLive(3))));

        let mut c = Circuit::identity(2);
        c.ops.push(CircOp::Gate {
            name: GateName::X,
            dagger: false,
            params: vec![],
            controls: vec![(0, Polarity::Positive)],
            targets: vec![0],
        });
        assert!(matches!(
            c.validate(),
            Err(CircuitError::OverlappingOperands { .. })
        ));
    }

    #[test]
    fn validate_catches_use_after_measure() {
        let mut c = Circuit::identity(1);
        c.ops.push(CircOp::Measure { qwire: 0, bwire: 1 });
        c.ops.push(CircOp::gate(GateName::H, vec![0]));
        c.outputs = vec![(1, WireKind::Bit)];
        assert!(matches!(c.validate(), Err(CircuitError::WireNotLive(0))));
    }

    #[test]
    fn inverse_t_gate_is_dagger_flagged() {
        let c = Circuit::single(1, CircOp::gate(GateName::T, vec![0]));
        let inv = inverse(&c).unwrap();
        match &inv.ops[0] {
            CircOp::Gate { name, dagger, .. } => {
                assert_eq!(*name, GateName::T);
                assert!(dagger);
            }
            _ => panic!(),
        }
        let tdg = to_unitary(&inv, crate::qnum::DEFAULT_MAX_QUBITS).unwrap();
        let expected = crate::qnum::gate_matrix(GateName::T, &[]).unwrap().dagger();
        tdg.assert_close(&expected, EQ_TOL);
    }
}
