use std::fmt;
use std::rc::Rc;

use crate::circuit::Circuit;
use crate::qnum::GateName;

/// Types of the quantum lambda calculus.
///
/// The tensor is right-associative: `A ⊗ B ⊗ C = A ⊗ (B ⊗ C)`. The `!`
/// modality marks duplicable values and is only ever attached to function
/// types by the checker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QType {
    Qbit,
    Bit,
    One,
    Fun(Box<QType>, Box<QType>),
    Tensor(Box<QType>, Box<QType>),
    Bang(Box<QType>),
    Circ(Box<QType>, Box<QType>),
}

impl QType {
    pub fn fun(a: QType, b: QType) -> QType {
        QType::Fun(Box::new(a), Box::new(b))
    }

    pub fn tensor(a: QType, b: QType) -> QType {
        QType::Tensor(Box::new(a), Box::new(b))
    }

    pub fn bang(a: QType) -> QType {
        QType::Bang(Box::new(a))
    }

    pub fn circ(a: QType, b: QType) -> QType {
        QType::Circ(Box::new(a), Box::new(b))
    }

    /// Right-associated `qbit ⊗ ... ⊗ qbit` with `n` factors (`1` when n=0).
    pub fn qbits(n: usize) -> QType {
        match n {
            0 => QType::One,
            1 => QType::Qbit,
            _ => QType::tensor(QType::Qbit, QType::qbits(n - 1)),
        }
    }

    /// Strip an outer `!`, if any.
    pub fn unbang(&self) -> &QType {
        match self {
            QType::Bang(inner) => inner,
            other => other,
        }
    }

    pub fn is_function(&self) -> bool {
        matches!(self.unbang(), QType::Fun(_, _))
    }

    /// Number of qubit leaves when this is a tree of qbit/1/tensor; `None`
    /// if any other constructor occurs.
    pub fn qubit_shape(&self) -> Option<usize> {
        match self {
            QType::Qbit => Some(1),
            QType::One => Some(0),
            QType::Tensor(a, b) => Some(a.qubit_shape()? + b.qubit_shape()?),
            _ => None,
        }
    }

    /// Leaf kinds (qbit = true wire, bit = false) of a qbit/bit/1/tensor tree.
    pub fn wire_shape(&self) -> Option<Vec<bool>> {
        match self {
            QType::Qbit => Some(vec![true]),
            QType::Bit => Some(vec![false]),
            QType::One => Some(vec![]),
            QType::Tensor(a, b) => {
                let mut v = a.wire_shape()?;
                v.extend(b.wire_shape()?);
                Some(v)
            }
            _ => None,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            QType::Qbit => write!(f, "qbit"),
            QType::Bit => write!(f, "bit"),
            QType::One => write!(f, "1"),
            QType::Bang(a) => {
                write!(f, "!")?;
                a.fmt_prec(f, 2)
            }
            QType::Fun(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " ⊸ ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            QType::Tensor(a, b) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 2)?;
                write!(f, " ⊗ ")?;
                b.fmt_prec(f, 1)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            QType::Circ(a, b) => {
                write!(f, "circ(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ", ")?;
                b.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for QType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Source position for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Parser output: an untyped term with source positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub node: TermNode,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TermNode {
    Var(String),
    Lam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    LetPair(String, String, Box<Term>, Box<Term>),
    Unit,
    LetUnit(Box<Term>, Box<Term>),
    Bool(bool),
    If(Box<Term>, Box<Term>, Box<Term>),
    Gate(GateName),
    QInit,
    Meas,
    BoxC,
    Unbox,
    LetRec(String, String, Box<Term>, Box<Term>),
    /// Circuit literal with its interface types. Not produced by the
    /// parser; it appears when machine residuals are re-checked.
    CircRef(Rc<Circuit>, Box<QType>, Box<QType>),
}

impl Term {
    pub fn new(node: TermNode, span: Span) -> Term {
        Term { node, span }
    }
}

/// A checked term: every subterm carries its implicit type.
#[derive(Clone, PartialEq)]
pub struct TTerm(pub Rc<TTermData>);

#[derive(Clone, PartialEq)]
pub struct TTermData {
    pub node: TNode,
    pub ty: QType,
}

#[derive(Clone, PartialEq)]
pub enum TNode {
    Var(String),
    Lam(String, TTerm),
    App(TTerm, TTerm),
    Pair(TTerm, TTerm),
    LetPair(String, String, TTerm, TTerm),
    Unit,
    LetUnit(TTerm, TTerm),
    Bool(bool),
    If(TTerm, TTerm, TTerm),
    Gate(GateName),
    QInit,
    Meas,
    BoxC,
    Unbox,
    LetRec(String, String, TTerm, TTerm),
    /// Circuit literal (the result of `box`, or parsed interchange data).
    CircVal(Rc<Circuit>),
}

impl TTerm {
    pub fn new(node: TNode, ty: QType) -> TTerm {
        TTerm(Rc::new(TTermData { node, ty }))
    }

    pub fn ty(&self) -> &QType {
        &self.0.ty
    }

    pub fn node(&self) -> &TNode {
        &self.0.node
    }

    /// Syntactic values: variables, constants, lambdas, unit, booleans,
    /// pairs of values, circuit literals, and `unbox` applied to a value.
    pub fn is_value(&self) -> bool {
        match self.node() {
            TNode::Var(_)
            | TNode::Lam(_, _)
            | TNode::Unit
            | TNode::Bool(_)
            | TNode::Gate(_)
            | TNode::QInit
            | TNode::Meas
            | TNode::BoxC
            | TNode::Unbox
            | TNode::CircVal(_) => true,
            TNode::Pair(a, b) => a.is_value() && b.is_value(),
            TNode::App(f, a) => matches!(f.node(), TNode::Unbox) && a.is_value(),
            _ => false,
        }
    }

    /// Node count, used for trace reporting.
    pub fn size(&self) -> usize {
        match self.node() {
            TNode::Var(_)
            | TNode::Unit
            | TNode::Bool(_)
            | TNode::Gate(_)
            | TNode::QInit
            | TNode::Meas
            | TNode::BoxC
            | TNode::Unbox
            | TNode::CircVal(_) => 1,
            TNode::Lam(_, b) => 1 + b.size(),
            TNode::App(a, b) | TNode::Pair(a, b) | TNode::LetUnit(a, b) => 1 + a.size() + b.size(),
            TNode::LetPair(_, _, a, b) | TNode::LetRec(_, _, a, b) => 1 + a.size() + b.size(),
            TNode::If(a, b, c) => 1 + a.size() + b.size() + c.size(),
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        fn walk(t: &TTerm, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match t.node() {
                TNode::Var(x) => {
                    if !bound.contains(x) && !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                TNode::Lam(x, b) => {
                    bound.push(x.clone());
                    walk(b, bound, out);
                    bound.pop();
                }
                TNode::App(a, b) | TNode::Pair(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                TNode::LetUnit(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                TNode::LetPair(x, y, a, b) => {
                    walk(a, bound, out);
                    bound.push(x.clone());
                    bound.push(y.clone());
                    walk(b, bound, out);
                    bound.pop();
                    bound.pop();
                }
                TNode::LetRec(f, x, m, n) => {
                    bound.push(f.clone());
                    bound.push(x.clone());
                    walk(m, bound, out);
                    bound.pop();
                    walk(n, bound, out);
                    bound.pop();
                }
                TNode::If(a, b, c) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                    walk(c, bound, out);
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Capture-avoiding substitution of a closed-or-machine value for `var`.
    ///
    /// Machine values substituted here never contain variables that could be
    /// captured (their free variables are qubit pointers, which are never
    /// used as binders), so binder shadowing is the only case to respect.
    pub fn subst(&self, var: &str, value: &TTerm) -> TTerm {
        match self.node() {
            TNode::Var(x) => {
                if x == var {
                    value.clone()
                } else {
                    self.clone()
                }
            }
            TNode::Lam(x, b) => {
                if x == var {
                    self.clone()
                } else {
                    TTerm::new(TNode::Lam(x.clone(), b.subst(var, value)), self.ty().clone())
                }
            }
            TNode::App(a, b) => TTerm::new(
                TNode::App(a.subst(var, value), b.subst(var, value)),
                self.ty().clone(),
            ),
            TNode::Pair(a, b) => TTerm::new(
                TNode::Pair(a.subst(var, value), b.subst(var, value)),
                self.ty().clone(),
            ),
            TNode::LetUnit(a, b) => TTerm::new(
                TNode::LetUnit(a.subst(var, value), b.subst(var, value)),
                self.ty().clone(),
            ),
            TNode::LetPair(x, y, a, b) => {
                let a2 = a.subst(var, value);
                let b2 = if x == var || y == var {
                    b.clone()
                } else {
                    b.subst(var, value)
                };
                TTerm::new(TNode::LetPair(x.clone(), y.clone(), a2, b2), self.ty().clone())
            }
            TNode::LetRec(f, x, m, n) => {
                let m2 = if f == var || x == var {
                    m.clone()
                } else {
                    m.subst(var, value)
                };
                let n2 = if f == var {
                    n.clone()
                } else {
                    n.subst(var, value)
                };
                TTerm::new(TNode::LetRec(f.clone(), x.clone(), m2, n2), self.ty().clone())
            }
            TNode::If(a, b, c) => TTerm::new(
                TNode::If(
                    a.subst(var, value),
                    b.subst(var, value),
                    c.subst(var, value),
                ),
                self.ty().clone(),
            ),
            _ => self.clone(),
        }
    }
}

impl fmt::Debug for TTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            TNode::Var(x) => write!(f, "{x}"),
            TNode::Lam(x, b) => write!(f, "(fun {x} -> {b})"),
            TNode::App(a, b) => write!(f, "({a} {b})"),
            TNode::Pair(a, b) => write!(f, "({a}, {b})"),
            TNode::LetPair(x, y, a, b) => write!(f, "(let ({x}, {y}) = {a} in {b})"),
            TNode::Unit => write!(f, "()"),
            TNode::LetUnit(a, b) => write!(f, "(let () = {a} in {b})"),
            TNode::Bool(true) => write!(f, "tt"),
            TNode::Bool(false) => write!(f, "ff"),
            TNode::If(a, b, c) => write!(f, "(if {a} then {b} else {c})"),
            TNode::Gate(g) => write!(f, "{g}"),
            TNode::QInit => write!(f, "qinit"),
            TNode::Meas => write!(f, "meas"),
            TNode::BoxC => write!(f, "box"),
            TNode::Unbox => write!(f, "unbox"),
            TNode::LetRec(g, x, m, n) => write!(f, "(letrec {g} {x} = {m} in {n})"),
            TNode::CircVal(c) => write!(f, "<circuit:{} ops>", c.ops.len()),
        }
    }
}
