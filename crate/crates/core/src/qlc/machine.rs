//! The probabilistic QRAM abstract machine `[Q, L, M]` plus the symbolic
//! variant used by `box` to buffer gates into a circuit.
//!
//! `Q` is the coprocessor state, `M` a typed term whose free variables are
//! pointers to qubits, and `L` the linking function from pointers to qubit
//! positions. Call-by-value; one redex fires per step; every rule has
//! probability 1 except measurement, which collapses with the Born weight
//! of the drawn branch.

use std::rc::Rc;

use rand::Rng;

use super::ast::{QType, TNode, TTerm};
use super::QlcError;
use crate::circuit::{CircOp, Circuit, WireId, WireKind};
use crate::qnum::{gate_matrix, measure, GateName, StateVector, DEFAULT_MAX_QUBITS};

/// Step budget for the symbolic evaluation inside `box`.
const BOX_FUEL: usize = 100_000;

/// Machine configuration.
#[derive(Debug, Clone, Copy)]
pub struct MachineLimits {
    pub max_qubits: usize,
}

impl Default for MachineLimits {
    fn default() -> Self {
        MachineLimits {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

/// The program triple `[Q, L, M]`.
#[derive(Clone)]
pub struct Program {
    pub state: StateVector,
    /// `link[i]` is the variable pointing at qubit position `i`.
    pub link: Vec<String>,
    pub term: TTerm,
    fresh: usize,
}

impl std::fmt::Debug for Program {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{:?}, {{{}}}, {}]",
            self.state,
            self.link.join(", "),
            self.term
        )
    }
}

impl Program {
    /// Start from a closed, checked term with an empty quantum register.
    pub fn new(term: TTerm) -> Program {
        Program {
            state: StateVector::scalar(),
            link: Vec::new(),
            term,
            fresh: 0,
        }
    }

    pub fn is_value(&self) -> bool {
        self.term.is_value()
    }

    fn fresh_var(&mut self) -> String {
        // `%` is not a lexable identifier character, so these never collide
        // with source variables.
        let name = format!("q%{}", self.fresh);
        self.fresh += 1;
        name
    }
}

/// What a single step did.
#[derive(Debug, Clone)]
pub struct StepInfo {
    pub rule: &'static str,
    pub probability: f64,
    /// Both branch probabilities when the step was a measurement.
    pub meas_branches: Option<(f64, f64)>,
}

/// One entry of an evaluation trace.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub rule: &'static str,
    pub probability: f64,
    pub term_size: usize,
}

/// Result of running a program to completion.
#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub program: Program,
    pub trace: Vec<TraceEntry>,
    pub probability: f64,
}

/// Interface to the coprocessor; the concrete backend simulates, the
/// symbolic one records circuit operations.
trait QuantumBackend {
    fn qinit(&mut self, value: bool) -> Result<String, QlcError>;
    fn gate(&mut self, gate: GateName, vars: &[String]) -> Result<(), QlcError>;
    fn meas(&mut self, var: &str) -> Result<(bool, f64, (f64, f64)), QlcError>;
    fn discard(&mut self, var: &str) -> Result<(), QlcError>;
}

struct ConcreteBackend<'a, R: Rng> {
    program: &'a mut Program,
    rng: &'a mut R,
    limits: MachineLimits,
}

impl<R: Rng> QuantumBackend for ConcreteBackend<'_, R> {
    fn qinit(&mut self, value: bool) -> Result<String, QlcError> {
        let var = self.program.fresh_var();
        self.program.state = self
            .program
            .state
            .kron_within(&StateVector::basis(&[value]), self.limits.max_qubits)?;
        self.program.link.push(var.clone());
        Ok(var)
    }

    fn gate(&mut self, gate: GateName, vars: &[String]) -> Result<(), QlcError> {
        let positions = vars
            .iter()
            .map(|v| {
                self.program
                    .link
                    .iter()
                    .position(|x| x == v)
                    .ok_or_else(|| QlcError::Machine(format!("unlinked qubit pointer `{v}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = gate_matrix(gate, &[])?;
        self.program.state = self.program.state.apply(&m, &positions)?;
        Ok(())
    }

    fn meas(&mut self, var: &str) -> Result<(bool, f64, (f64, f64)), QlcError> {
        let pos = self
            .program
            .link
            .iter()
            .position(|x| x == var)
            .ok_or_else(|| QlcError::Machine(format!("unlinked qubit pointer `{var}`")))?;
        let outcome = measure(&self.program.state, pos, self.rng)?;
        self.program.state = outcome.state.drop_wire(pos, outcome.bit)?;
        self.program.link.remove(pos);
        Ok((outcome.bit, outcome.probability, outcome.branch_probs))
    }

    fn discard(&mut self, var: &str) -> Result<(), QlcError> {
        let pos = self
            .program
            .link
            .iter()
            .position(|x| x == var)
            .ok_or_else(|| QlcError::Machine(format!("unlinked qubit pointer `{var}`")))?;
        let p1 = self.program.state.prob_one(pos)?;
        let value = p1 >= 0.5;
        let err = if value { 1.0 - p1 } else { p1 };
        if err > crate::qnum::NORM_TOL {
            return Err(QlcError::Machine(format!(
                "discard of `{var}`: qubit is not in a classical basis state"
            )));
        }
        self.program.state = self.program.state.project(pos, value)?.drop_wire(pos, value)?;
        self.program.link.remove(pos);
        Ok(())
    }

}

/// Records ops instead of simulating; measurement is dynamic lifting and is
/// refused.
struct SymbolicBackend {
    ops: Vec<CircOp>,
    /// var name -> wire id
    wires: Vec<(String, WireId)>,
    next_wire: WireId,
    fresh: usize,
}

impl SymbolicBackend {
    fn wire_of(&self, var: &str) -> Result<WireId, QlcError> {
        self.wires
            .iter()
            .find(|(v, _)| v == var)
            .map(|(_, w)| *w)
            .ok_or_else(|| QlcError::Machine(format!("unlinked symbolic wire `{var}`")))
    }
}

impl QuantumBackend for SymbolicBackend {
    fn qinit(&mut self, value: bool) -> Result<String, QlcError> {
        let var = format!("w%{}", self.fresh);
        self.fresh += 1;
        let wire = self.next_wire;
        self.next_wire += 1;
        self.ops.push(CircOp::Init { wire, value });
        self.wires.push((var.clone(), wire));
        Ok(var)
    }

    fn gate(&mut self, gate: GateName, vars: &[String]) -> Result<(), QlcError> {
        let targets = vars
            .iter()
            .map(|v| self.wire_of(v))
            .collect::<Result<Vec<_>, _>>()?;
        self.ops.push(CircOp::gate(gate, targets));
        Ok(())
    }

    fn meas(&mut self, _var: &str) -> Result<(bool, f64, (f64, f64)), QlcError> {
        Err(QlcError::DynamicLifting)
    }

    fn discard(&mut self, var: &str) -> Result<(), QlcError> {
        let wire = self.wire_of(var)?;
        self.ops.push(CircOp::Discard { wire });
        self.wires.retain(|(v, _)| v != var);
        Ok(())
    }

}

/// Flatten a value of qubit-tree type into its pointer variables.
fn flatten_qubit_value(value: &TTerm, out: &mut Vec<String>) -> Result<(), QlcError> {
    match value.node() {
        TNode::Var(x) => {
            out.push(x.clone());
            Ok(())
        }
        TNode::Unit => Ok(()),
        TNode::Pair(a, b) => {
            flatten_qubit_value(a, out)?;
            flatten_qubit_value(b, out)
        }
        other => Err(QlcError::Machine(format!(
            "expected a tree of qubit pointers, got {}",
            TTerm::new(other.clone(), value.ty().clone())
        ))),
    }
}

/// Rebuild a value of the given wire-shaped type from leaves.
fn rebuild_value(
    ty: &QType,
    qubits: &mut std::vec::IntoIter<String>,
    bits: &mut std::vec::IntoIter<bool>,
) -> Result<TTerm, QlcError> {
    match ty {
        QType::Qbit => {
            let v = qubits
                .next()
                .ok_or_else(|| QlcError::Machine("circuit output arity mismatch".into()))?;
            Ok(TTerm::new(TNode::Var(v), QType::Qbit))
        }
        QType::Bit => {
            let b = bits
                .next()
                .ok_or_else(|| QlcError::Machine("circuit output arity mismatch".into()))?;
            Ok(TTerm::new(TNode::Bool(b), QType::Bit))
        }
        QType::One => Ok(TTerm::new(TNode::Unit, QType::One)),
        QType::Tensor(a, b) => {
            let left = rebuild_value(a, qubits, bits)?;
            let right = rebuild_value(b, qubits, bits)?;
            Ok(TTerm::new(TNode::Pair(left, right), ty.clone()))
        }
        other => Err(QlcError::Machine(format!(
            "circuit interface type {other} is not wire-shaped"
        ))),
    }
}

enum Stepped {
    Value,
    Reduced {
        term: TTerm,
        rule: &'static str,
        probability: f64,
        meas_branches: Option<(f64, f64)>,
    },
}

/// Contract the redex found by the applicative-context walk.
fn step_term(term: &TTerm, backend: &mut dyn QuantumBackend) -> Result<Stepped, QlcError> {
    if term.is_value() {
        return Ok(Stepped::Value);
    }
    let reduced = |term, rule| {
        Ok(Stepped::Reduced {
            term,
            rule,
            probability: 1.0,
            meas_branches: None,
        })
    };
    match term.node() {
        TNode::App(f, a) => {
            // arguments reduce before the function position consumes them
            if !a.is_value() {
                return step_inside(term, a, 1, backend);
            }
            if !f.is_value() {
                return step_inside(term, f, 0, backend);
            }
            match f.node() {
                TNode::Lam(x, body) => reduced(body.subst(x, a), "beta"),
                TNode::QInit => match a.node() {
                    TNode::Bool(b) => {
                        let var = backend.qinit(*b)?;
                        reduced(TTerm::new(TNode::Var(var), QType::Qbit), "qinit")
                    }
                    _ => Err(QlcError::Stuck(term.to_string())),
                },
                TNode::Meas => match a.node() {
                    TNode::Var(x) => {
                        let (bit, probability, branches) = backend.meas(x)?;
                        Ok(Stepped::Reduced {
                            term: TTerm::new(TNode::Bool(bit), QType::Bit),
                            rule: "meas",
                            probability,
                            meas_branches: Some(branches),
                        })
                    }
                    _ => Err(QlcError::Stuck(term.to_string())),
                },
                TNode::Gate(g) => {
                    let mut vars = Vec::new();
                    flatten_qubit_value(a, &mut vars)?;
                    if vars.len() != g.target_arity() {
                        return Err(QlcError::Stuck(term.to_string()));
                    }
                    let mut distinct = vars.clone();
                    distinct.sort();
                    distinct.dedup();
                    if distinct.len() != vars.len() {
                        return Err(QlcError::Machine(format!(
                            "gate {g} applied to aliased qubit pointers"
                        )));
                    }
                    backend.gate(*g, &vars)?;
                    reduced(a.clone(), "gate")
                }
                TNode::BoxC => {
                    let circuit = box_value(a)?;
                    let ty = term.ty().clone();
                    reduced(TTerm::new(TNode::CircVal(Rc::new(circuit)), ty), "box")
                }
                TNode::App(g, c) if matches!(g.node(), TNode::Unbox) => {
                    // (unbox C) V: replay the circuit through the backend
                    let circuit = match c.node() {
                        TNode::CircVal(circ) => circ.clone(),
                        _ => return Err(QlcError::Stuck(term.to_string())),
                    };
                    let (result, probability) =
                        replay_circuit(&circuit, a, term.ty(), backend)?;
                    Ok(Stepped::Reduced {
                        term: result,
                        rule: "unbox",
                        probability,
                        meas_branches: None,
                    })
                }
                _ => Err(QlcError::Stuck(term.to_string())),
            }
        }
        TNode::Pair(a, b) => {
            if !a.is_value() {
                step_inside(term, a, 0, backend)
            } else {
                step_inside(term, b, 1, backend)
            }
        }
        TNode::LetUnit(s, body) => {
            if !s.is_value() {
                return step_inside(term, s, 0, backend);
            }
            match s.node() {
                TNode::Unit => reduced(body.clone(), "let-unit"),
                _ => Err(QlcError::Stuck(term.to_string())),
            }
        }
        TNode::LetPair(x, y, s, body) => {
            if !s.is_value() {
                return step_inside(term, s, 0, backend);
            }
            match s.node() {
                TNode::Pair(v, w) => reduced(body.subst(x, v).subst(y, w), "let-pair"),
                _ => Err(QlcError::Stuck(term.to_string())),
            }
        }
        TNode::If(c, t, e) => {
            if !c.is_value() {
                return step_inside(term, c, 0, backend);
            }
            match c.node() {
                TNode::Bool(true) => reduced(t.clone(), "if-true"),
                TNode::Bool(false) => reduced(e.clone(), "if-false"),
                _ => Err(QlcError::Stuck(term.to_string())),
            }
        }
        TNode::LetRec(f, x, m, n) => {
            // N[f := fun x -> letrec f x = M in M]
            let fun_ty = match term_letrec_fun_ty(m, x) {
                Some(t) => t,
                None => QType::fun(QType::One, m.ty().clone()),
            };
            let unrolled = TTerm::new(
                TNode::Lam(
                    x.clone(),
                    TTerm::new(
                        TNode::LetRec(f.clone(), x.clone(), m.clone(), m.clone()),
                        m.ty().clone(),
                    ),
                ),
                fun_ty,
            );
            reduced(n.subst(f, &unrolled), "letrec")
        }
        _ => Err(QlcError::Stuck(term.to_string())),
    }
}

fn term_letrec_fun_ty(body: &TTerm, _arg: &str) -> Option<QType> {
    // The recursive function's type is Fun(arg_ty, body_ty); arg type is
    // recovered from any Var occurrence recorded during checking. Fall back
    // to the body type alone if the argument is unused.
    fn find_var_ty(t: &TTerm, name: &str) -> Option<QType> {
        match t.node() {
            TNode::Var(x) if x == name => Some(t.ty().clone()),
            TNode::Lam(x, b) if x != name => find_var_ty(b, name),
            TNode::App(a, b) | TNode::Pair(a, b) | TNode::LetUnit(a, b) => {
                find_var_ty(a, name).or_else(|| find_var_ty(b, name))
            }
            TNode::LetPair(x, y, a, b) => find_var_ty(a, name).or_else(|| {
                if x == name || y == name {
                    None
                } else {
                    find_var_ty(b, name)
                }
            }),
            TNode::If(a, b, c) => find_var_ty(a, name)
                .or_else(|| find_var_ty(b, name))
                .or_else(|| find_var_ty(c, name)),
            TNode::LetRec(f, x, m, n) => {
                let in_m = if f == name || x == name {
                    None
                } else {
                    find_var_ty(m, name)
                };
                in_m.or_else(|| if f == name { None } else { find_var_ty(n, name) })
            }
            _ => None,
        }
    }
    find_var_ty(body, _arg).map(|arg_ty| QType::fun(arg_ty, body.ty().clone()))
}

/// Step inside child `index` of a compound node and rebuild it.
fn step_inside(
    parent: &TTerm,
    child: &TTerm,
    index: usize,
    backend: &mut dyn QuantumBackend,
) -> Result<Stepped, QlcError> {
    match step_term(child, backend)? {
        Stepped::Value => Err(QlcError::Stuck(parent.to_string())),
        Stepped::Reduced {
            term: new_child,
            rule,
            probability,
            meas_branches,
        } => {
            let node = match (parent.node(), index) {
                (TNode::App(_, a), 0) => TNode::App(new_child, a.clone()),
                (TNode::App(f, _), 1) => TNode::App(f.clone(), new_child),
                (TNode::Pair(_, b), 0) => TNode::Pair(new_child, b.clone()),
                (TNode::Pair(a, _), 1) => TNode::Pair(a.clone(), new_child),
                (TNode::LetUnit(_, b), 0) => TNode::LetUnit(new_child, b.clone()),
                (TNode::LetPair(x, y, _, b), 0) => {
                    TNode::LetPair(x.clone(), y.clone(), new_child, b.clone())
                }
                (TNode::If(_, t, e), 0) => TNode::If(new_child, t.clone(), e.clone()),
                _ => unreachable!("step_inside indices cover the context grammar"),
            };
            Ok(Stepped::Reduced {
                term: TTerm::new(node, parent.ty().clone()),
                rule,
                probability,
                meas_branches,
            })
        }
    }
}

/// Evaluate `box`'s argument against fresh symbolic wires.
fn box_value(f: &TTerm) -> Result<Circuit, QlcError> {
    let (dom, cod) = match f.ty().unbang() {
        QType::Fun(a, b) => (a.clone(), b.clone()),
        other => {
            return Err(QlcError::Machine(format!(
                "box of a non-function value of type {other}"
            )))
        }
    };
    let n_in = dom.qubit_shape().ok_or_else(|| QlcError::Machine(format!(
        "box interface {dom} is not qubit-shaped"
    )))?;
    cod.qubit_shape().ok_or_else(|| QlcError::Machine(format!(
        "box interface {cod} is not qubit-shaped"
    )))?;

    let mut backend = SymbolicBackend {
        ops: Vec::new(),
        wires: Vec::new(),
        next_wire: 0,
        fresh: 0,
    };
    // fresh input wires and the argument value over them
    let mut input_vars = Vec::new();
    for i in 0..n_in {
        let var = format!("in%{i}");
        backend.wires.push((var.clone(), backend.next_wire));
        backend.next_wire += 1;
        input_vars.push(var);
    }
    let mut qubits = input_vars.clone().into_iter();
    let mut bits = Vec::new().into_iter();
    let arg = rebuild_value(&dom, &mut qubits, &mut bits)?;
    let mut term = TTerm::new(
        TNode::App(f.clone(), arg),
        (*cod).clone(),
    );
    let mut fuel = BOX_FUEL;
    loop {
        match step_term(&term, &mut backend)? {
            Stepped::Value => break,
            Stepped::Reduced { term: t, .. } => term = t,
        }
        fuel -= 1;
        if fuel == 0 {
            return Err(QlcError::FuelExhausted {
                steps: BOX_FUEL,
                residual: term.to_string(),
            });
        }
    }
    let mut out_vars = Vec::new();
    flatten_qubit_value(&term, &mut out_vars)?;
    let outputs = out_vars
        .iter()
        .map(|v| Ok((backend.wire_of(v)?, WireKind::Qbit)))
        .collect::<Result<Vec<_>, QlcError>>()?;
    let circuit = Circuit {
        inputs: (0..n_in as WireId).map(|w| (w, WireKind::Qbit)).collect(),
        ops: backend.ops,
        outputs,
    };
    circuit
        .validate()
        .map_err(|e| QlcError::Machine(format!("boxed circuit is ill-formed: {e}")))?;
    Ok(circuit)
}

/// Replay a circuit literal's ops through the backend, binding its input
/// wires to the applied value's qubit pointers.
fn replay_circuit(
    circuit: &Circuit,
    arg: &TTerm,
    result_ty: &QType,
    backend: &mut dyn QuantumBackend,
) -> Result<(TTerm, f64), QlcError> {
    let mut arg_vars = Vec::new();
    flatten_qubit_value(arg, &mut arg_vars)?;
    let qbit_inputs: Vec<WireId> = circuit
        .inputs
        .iter()
        .filter(|(_, k)| *k == WireKind::Qbit)
        .map(|(w, _)| *w)
        .collect();
    if arg_vars.len() != qbit_inputs.len() {
        return Err(QlcError::Machine(format!(
            "circuit expects {} qubits, got {}",
            qbit_inputs.len(),
            arg_vars.len()
        )));
    }
    let mut wire_var: Vec<(WireId, String)> =
        qbit_inputs.into_iter().zip(arg_vars).collect();
    let mut bit_values: Vec<(WireId, bool)> = Vec::new();
    let mut probability = 1.0;
    for op in &circuit.ops {
        match op {
            CircOp::Init { wire, value } => {
                let var = backend.qinit(*value)?;
                wire_var.push((*wire, var));
            }
            CircOp::Gate {
                name,
                dagger,
                params,
                controls,
                targets,
            } => {
                if *dagger || !params.is_empty() || !controls.is_empty() {
                    return Err(QlcError::Machine(format!(
                        "circuit replay supports plain gates only, got decorated {name}"
                    )));
                }
                let vars: Vec<String> = targets
                    .iter()
                    .map(|w| {
                        wire_var
                            .iter()
                            .find(|(id, _)| id == w)
                            .map(|(_, v)| v.clone())
                            .ok_or_else(|| {
                                QlcError::Machine(format!("circuit wire {w} is not bound"))
                            })
                    })
                    .collect::<Result<_, _>>()?;
                backend.gate(*name, &vars)?;
            }
            CircOp::Measure { qwire, bwire } => {
                let var = wire_var
                    .iter()
                    .find(|(id, _)| id == qwire)
                    .map(|(_, v)| v.clone())
                    .ok_or_else(|| {
                        QlcError::Machine(format!("circuit wire {qwire} is not bound"))
                    })?;
                let (bit, p, _) = backend.meas(&var)?;
                probability *= p;
                wire_var.retain(|(id, _)| id != qwire);
                bit_values.push((*bwire, bit));
            }
            CircOp::Discard { wire } => {
                let var = wire_var
                    .iter()
                    .find(|(id, _)| id == wire)
                    .map(|(_, v)| v.clone())
                    .ok_or_else(|| {
                        QlcError::Machine(format!("circuit wire {wire} is not bound"))
                    })?;
                backend.discard(&var)?;
                wire_var.retain(|(id, _)| id != wire);
            }
        }
    }
    // collect outputs in declaration order
    let mut out_qubits = Vec::new();
    let mut out_bits = Vec::new();
    for (w, kind) in &circuit.outputs {
        match kind {
            WireKind::Qbit => {
                let var = wire_var
                    .iter()
                    .find(|(id, _)| id == w)
                    .map(|(_, v)| v.clone())
                    .ok_or_else(|| {
                        QlcError::Machine(format!("circuit output wire {w} is not bound"))
                    })?;
                out_qubits.push(var);
            }
            WireKind::Bit => {
                let bit = bit_values
                    .iter()
                    .find(|(id, _)| id == w)
                    .map(|(_, b)| *b)
                    .ok_or_else(|| {
                        QlcError::Machine(format!("circuit bit output {w} has no value"))
                    })?;
                out_bits.push(bit);
            }
        }
    }
    let mut qubits = out_qubits.into_iter();
    let mut bits = out_bits.into_iter();
    let value = rebuild_value(result_ty, &mut qubits, &mut bits)?;
    Ok((value, probability))
}

/// Fire exactly one redex.
pub fn step(
    program: &Program,
    rng: &mut impl Rng,
    limits: MachineLimits,
) -> Result<(Program, StepInfo), QlcError> {
    if program.is_value() {
        return Err(QlcError::Machine("stepping a value program".into()));
    }
    let mut next = program.clone();
    let stepped = {
        let mut backend = ConcreteBackend {
            program: &mut next,
            rng,
            limits,
        };
        // borrow the term separately from the backend's program
        let term = program.term.clone();
        step_term(&term, &mut backend)?
    };
    match stepped {
        Stepped::Value => unreachable!("non-value program stepped to Value"),
        Stepped::Reduced {
            term,
            rule,
            probability,
            meas_branches,
        } => {
            next.term = term;
            Ok((
                next,
                StepInfo {
                    rule,
                    probability,
                    meas_branches,
                },
            ))
        }
    }
}

/// Iterate `step` until the program is a value or the fuel runs out.
pub fn eval(
    program: Program,
    rng: &mut impl Rng,
    fuel: usize,
    limits: MachineLimits,
) -> Result<EvalOutcome, QlcError> {
    let mut current = program;
    let mut trace = Vec::new();
    let mut probability = 1.0;
    for _ in 0..fuel {
        if current.is_value() {
            return Ok(EvalOutcome {
                program: current,
                trace,
                probability,
            });
        }
        let (next, info) = step(&current, rng, limits)?;
        probability *= info.probability;
        trace.push(TraceEntry {
            rule: info.rule,
            probability: info.probability,
            term_size: next.term.size(),
        });
        current = next;
    }
    if current.is_value() {
        Ok(EvalOutcome {
            program: current,
            trace,
            probability,
        })
    } else {
        Err(QlcError::FuelExhausted {
            steps: fuel,
            residual: current.term.to_string(),
        })
    }
}
