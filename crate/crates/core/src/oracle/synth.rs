//! Landauer-embedding partial evaluator and Bennett wrapping.
//!
//! The synthesis machine pairs a reversible circuit under construction
//! (Init/NOT/CNOT/Toffoli only) with a frontier term whose wire leaves name
//! live circuit wires. Each `and` on wires emits a fresh 0-initialized wire
//! plus a Toffoli; `not` on an input wire copies out-of-place (CNOT then
//! NOT) so that the inputs survive verbatim, while `not` on an internal
//! wire whose value is no longer referenced elsewhere flips in place.
//! Classical control (lambdas, statically-known tests, unrollable
//! recursion) reduces at compile time; a test on a circuit-carried bit
//! synthesizes both branches and selects under positive/negative controls.

use super::ast::BTerm;
use super::OracleError;
use crate::circuit::{CircOp, Circuit, Polarity, WireId, WireKind};
use crate::qnum::GateName;

/// Output of the Landauer embedding.
#[derive(Debug, Clone)]
pub struct Landauer {
    pub circuit: Circuit,
    /// Wires holding the function's result bits, in output order.
    pub output_wires: Vec<WireId>,
    pub n_inputs: usize,
}

/// A Bennett-wrapped oracle `(x, 0, y) -> (x, 0, y XOR f(x))`.
#[derive(Debug, Clone)]
pub struct OracleCircuit {
    pub circuit: Circuit,
    pub n_inputs: usize,
    pub m_outputs: usize,
    /// The target register wires (the trailing `m` qbit inputs).
    pub target_wires: Vec<WireId>,
}

const SYNTH_FUEL: usize = 200_000;

struct Machine {
    ops: Vec<CircOp>,
    next_wire: WireId,
    n_inputs: usize,
    fuel: usize,
    /// Inside branch compilation the liveness analysis for in-place NOT is
    /// not valid (the enclosing frontier is out of view), so fall back to
    /// out-of-place there.
    branch_depth: usize,
}

impl Machine {
    fn burn(&mut self) -> Result<(), OracleError> {
        if self.fuel == 0 {
            return Err(OracleError::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn fresh_wire(&mut self, value: bool) -> WireId {
        let w = self.next_wire;
        self.next_wire += 1;
        self.ops.push(CircOp::Init { wire: w, value: false });
        if value {
            self.ops.push(CircOp::gate(GateName::Not, vec![w]));
        }
        w
    }

    fn is_input(&self, w: WireId) -> bool {
        (w as usize) < self.n_inputs
    }

    /// Wire holding the value of `v`, materializing constants.
    fn wire_of(&mut self, v: &BTerm) -> Result<WireId, OracleError> {
        match v {
            BTerm::Wire(w) => Ok(*w),
            BTerm::Bool(b) => Ok(self.fresh_wire(*b)),
            other => Err(OracleError::Synth(format!(
                "expected a bit value, got {other}"
            ))),
        }
    }
}

/// One compile-time step; `root` is the whole frontier (for liveness).
fn step(machine: &mut Machine, root: &BTerm, term: &BTerm) -> Result<Option<BTerm>, OracleError> {
    machine.burn()?;
    if term.is_value() {
        return Ok(None);
    }
    match term {
        BTerm::App(f, a) => {
            // left-to-right call by value
            if !f.is_value() {
                return Ok(step(machine, root, f)?
                    .map(|f2| BTerm::app(f2, (**a).clone())));
            }
            if !a.is_value() {
                return Ok(step(machine, root, a)?
                    .map(|a2| BTerm::app((**f).clone(), a2)));
            }
            match &**f {
                BTerm::Lam(x, body) => Ok(Some(body.subst(x, a))),
                BTerm::Not => match &**a {
                    BTerm::Bool(b) => Ok(Some(BTerm::Bool(!b))),
                    BTerm::Wire(w) => {
                        // in place only when this occurrence is the last
                        // reference and the wire is not a circuit input
                        let unique = root.count_wire(*w) == 1;
                        if unique && !machine.is_input(*w) && machine.branch_depth == 0 {
                            machine.ops.push(CircOp::gate(GateName::Not, vec![*w]));
                            Ok(Some(BTerm::Wire(*w)))
                        } else {
                            let z = machine.fresh_wire(false);
                            machine.ops.push(CircOp::gate(GateName::Cnot, vec![*w, z]));
                            machine.ops.push(CircOp::gate(GateName::Not, vec![z]));
                            Ok(Some(BTerm::Wire(z)))
                        }
                    }
                    other => Err(OracleError::Synth(format!("not applied to {other}"))),
                },
                BTerm::App(g, first) if matches!(**g, BTerm::And) => {
                    let (v, w) = (&**first, &**a);
                    match (v, w) {
                        (BTerm::Bool(a1), BTerm::Bool(a2)) => Ok(Some(BTerm::Bool(*a1 && *a2))),
                        _ => {
                            let wv = machine.wire_of(v)?;
                            let ww = machine.wire_of(w)?;
                            let z = machine.fresh_wire(false);
                            machine
                                .ops
                                .push(CircOp::gate(GateName::Toffoli, vec![wv, ww, z]));
                            Ok(Some(BTerm::Wire(z)))
                        }
                    }
                }
                other => Err(OracleError::Synth(format!(
                    "cannot apply non-function value {other}"
                ))),
            }
        }
        BTerm::Pair(a, b) => {
            if !a.is_value() {
                Ok(step(machine, root, a)?
                    .map(|a2| BTerm::Pair(Box::new(a2), b.clone())))
            } else {
                Ok(step(machine, root, b)?
                    .map(|b2| BTerm::Pair(a.clone(), Box::new(b2))))
            }
        }
        BTerm::LetPair(x, y, s, body) => {
            if !s.is_value() {
                return Ok(step(machine, root, s)?.map(|s2| {
                    BTerm::LetPair(x.clone(), y.clone(), Box::new(s2), body.clone())
                }));
            }
            match &**s {
                BTerm::Pair(v, w) => Ok(Some(body.subst(x, v).subst(y, w))),
                other => Err(OracleError::Synth(format!(
                    "let-pair scrutinee is not a pair: {other}"
                ))),
            }
        }
        BTerm::If(c, t, e) => {
            if !c.is_value() {
                return Ok(step(machine, root, c)?
                    .map(|c2| BTerm::If(Box::new(c2), t.clone(), e.clone())));
            }
            match &**c {
                BTerm::Bool(true) => Ok(Some((**t).clone())),
                BTerm::Bool(false) => Ok(Some((**e).clone())),
                BTerm::Wire(cond) => Ok(Some(synth_branching(
                    machine,
                    *cond,
                    t,
                    e,
                )?)),
                other => Err(OracleError::Synth(format!(
                    "if condition is not a bit: {other}"
                ))),
            }
        }
        BTerm::LetRec(f, x, m, n) => {
            // unroll; recursion must bottom out on statically-known data
            let unrolled = BTerm::lam(
                x,
                BTerm::LetRec(f.clone(), x.clone(), m.clone(), m.clone()),
            );
            Ok(Some(n.subst(f, &unrolled)))
        }
        BTerm::Var(x) => Err(OracleError::Synth(format!("unbound variable `{x}`"))),
        _ => Err(OracleError::Synth(format!("stuck term {term}"))),
    }
}

/// Compile both branches of a wire-condition test, control their gates on
/// the condition, and select the outputs into fresh wires.
fn synth_branching(
    machine: &mut Machine,
    cond: WireId,
    then_term: &BTerm,
    else_term: &BTerm,
) -> Result<BTerm, OracleError> {
    let start = machine.ops.len();
    machine.branch_depth += 1;
    let vt = run_to_value(machine, then_term.clone());
    let mark_then = machine.ops.len();
    let ve = run_to_value(machine, else_term.clone());
    let mark_else = machine.ops.len();
    machine.branch_depth -= 1;
    let (vt, ve) = (vt?, ve?);
    // control the branch gates (inits stay unconditional: a dormant branch
    // leaves its fresh wires at |0>)
    control_gates(&mut machine.ops[start..mark_then], cond, Polarity::Positive);
    control_gates(
        &mut machine.ops[mark_then..mark_else],
        cond,
        Polarity::Negative,
    );
    select_outputs(machine, cond, &vt, &ve)
}

fn run_to_value(machine: &mut Machine, mut term: BTerm) -> Result<BTerm, OracleError> {
    loop {
        let root = term.clone();
        match step(machine, &root, &term)? {
            None => return Ok(term),
            Some(next) => term = next,
        }
    }
}

fn control_gates(ops: &mut [CircOp], cond: WireId, polarity: Polarity) {
    for op in ops {
        if let CircOp::Gate { controls, .. } = op {
            controls.insert(0, (cond, polarity));
        }
    }
}

/// Zip the branch values and build selected outputs.
fn select_outputs(
    machine: &mut Machine,
    cond: WireId,
    vt: &BTerm,
    ve: &BTerm,
) -> Result<BTerm, OracleError> {
    match (vt, ve) {
        (BTerm::Pair(a1, b1), BTerm::Pair(a2, b2)) => {
            let left = select_outputs(machine, cond, a1, a2)?;
            let right = select_outputs(machine, cond, b1, b2)?;
            Ok(BTerm::Pair(Box::new(left), Box::new(right)))
        }
        _ => {
            let out = machine.fresh_wire(false);
            copy_controlled(machine, cond, Polarity::Positive, vt, out)?;
            copy_controlled(machine, cond, Polarity::Negative, ve, out)?;
            Ok(BTerm::Wire(out))
        }
    }
}

fn copy_controlled(
    machine: &mut Machine,
    cond: WireId,
    polarity: Polarity,
    value: &BTerm,
    out: WireId,
) -> Result<(), OracleError> {
    match value {
        BTerm::Bool(false) => Ok(()),
        BTerm::Bool(true) => {
            machine.ops.push(CircOp::Gate {
                name: GateName::Not,
                dagger: false,
                params: vec![],
                controls: vec![(cond, polarity)],
                targets: vec![out],
            });
            Ok(())
        }
        BTerm::Wire(w) => {
            machine.ops.push(CircOp::Gate {
                name: GateName::Not,
                dagger: false,
                params: vec![],
                controls: vec![(cond, polarity), (*w, Polarity::Positive)],
                targets: vec![out],
            });
            Ok(())
        }
        other => Err(OracleError::Synth(format!(
            "branch produced a non-bit value {other}"
        ))),
    }
}

/// Flatten a bit-tree value into wires, materializing constants.
fn flatten_outputs(machine: &mut Machine, v: &BTerm, out: &mut Vec<WireId>) -> Result<(), OracleError> {
    match v {
        BTerm::Pair(a, b) => {
            flatten_outputs(machine, a, out)?;
            flatten_outputs(machine, b, out)
        }
        BTerm::Wire(_) | BTerm::Bool(_) => {
            let w = machine.wire_of(v)?;
            out.push(w);
            Ok(())
        }
        other => Err(OracleError::Synth(format!(
            "oracle result is not first-order: {other}"
        ))),
    }
}

/// Partially evaluate `term` applied to `n_inputs` fresh input wires.
pub fn synth_landauer(term: &BTerm, n_inputs: usize) -> Result<Landauer, OracleError> {
    let mut machine = Machine {
        ops: Vec::new(),
        next_wire: n_inputs as WireId,
        n_inputs,
        fuel: SYNTH_FUEL,
        branch_depth: 0,
    };
    let mut applied = term.clone();
    for w in 0..n_inputs as WireId {
        applied = BTerm::app(applied, BTerm::Wire(w));
    }
    let value = run_to_value(&mut machine, applied)?;
    let mut output_wires = Vec::new();
    flatten_outputs(&mut machine, &value, &mut output_wires)?;
    let inputs: Vec<(WireId, WireKind)> = (0..n_inputs as WireId)
        .map(|w| (w, WireKind::Qbit))
        .collect();
    let outputs: Vec<(WireId, WireKind)> = (0..machine.next_wire)
        .map(|w| (w, WireKind::Qbit))
        .collect();
    let circuit = Circuit {
        inputs,
        ops: machine.ops,
        outputs,
    };
    circuit
        .validate()
        .map_err(|e| OracleError::Synth(format!("emitted circuit is ill-formed: {e}")))?;
    Ok(Landauer {
        circuit,
        output_wires,
        n_inputs,
    })
}

/// Wrap a Landauer embedding into the oracle shape: compute, CNOT-fan the
/// results into a fresh target register, then uncompute. Garbage wires are
/// restored to |0> on every basis input.
pub fn bennett_wrap(landauer: &Landauer) -> Result<OracleCircuit, OracleError> {
    let c = &landauer.circuit;
    let m = landauer.output_wires.len();
    let first_target = c.outputs.iter().map(|(w, _)| w + 1).max().unwrap_or(0);
    let target_wires: Vec<WireId> = (0..m as WireId).map(|i| first_target + i).collect();

    let mut ops = c.ops.clone();
    for (out, target) in landauer.output_wires.iter().zip(&target_wires) {
        ops.push(CircOp::gate(GateName::Cnot, vec![*out, *target]));
    }
    for op in c.ops.iter().rev() {
        match op {
            CircOp::Gate { .. } => ops.push(op.clone()), // NOT/CNOT/Toffoli are self-inverse
            CircOp::Init { .. } => {} // ancilla wires stay allocated as the restored 0-register
            other => {
                return Err(OracleError::Synth(format!(
                    "landauer circuit must be measurement-free, found {}",
                    other.kind_label()
                )))
            }
        }
    }
    let inputs: Vec<(WireId, WireKind)> = c
        .inputs
        .iter()
        .cloned()
        .chain(target_wires.iter().map(|w| (*w, WireKind::Qbit)))
        .collect();
    let outputs: Vec<(WireId, WireKind)> = c
        .outputs
        .iter()
        .cloned()
        .chain(target_wires.iter().map(|w| (*w, WireKind::Qbit)))
        .collect();
    let circuit = Circuit {
        inputs,
        ops,
        outputs,
    };
    circuit
        .validate()
        .map_err(|e| OracleError::Synth(format!("wrapped circuit is ill-formed: {e}")))?;
    Ok(OracleCircuit {
        circuit,
        n_inputs: landauer.n_inputs,
        m_outputs: m,
        target_wires,
    })
}
