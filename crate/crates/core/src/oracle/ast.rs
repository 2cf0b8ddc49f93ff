use std::fmt;

use super::OracleError;
use crate::circuit::WireId;

/// Simply-typed Boolean functional terms.
#[derive(Debug, Clone, PartialEq)]
pub enum BTerm {
    Var(String),
    Lam(String, Box<BTerm>),
    App(Box<BTerm>, Box<BTerm>),
    Bool(bool),
    Not,
    And,
    Pair(Box<BTerm>, Box<BTerm>),
    LetPair(String, String, Box<BTerm>, Box<BTerm>),
    If(Box<BTerm>, Box<BTerm>, Box<BTerm>),
    LetRec(String, String, Box<BTerm>, Box<BTerm>),
    /// Internal to the synthesis machine: a live circuit wire.
    Wire(WireId),
}

impl BTerm {
    pub fn lam(x: &str, body: BTerm) -> BTerm {
        BTerm::Lam(x.into(), Box::new(body))
    }

    pub fn app(f: BTerm, a: BTerm) -> BTerm {
        BTerm::App(Box::new(f), Box::new(a))
    }

    pub fn var(x: &str) -> BTerm {
        BTerm::Var(x.into())
    }

    pub fn is_value(&self) -> bool {
        match self {
            BTerm::Var(_)
            | BTerm::Lam(_, _)
            | BTerm::Bool(_)
            | BTerm::Not
            | BTerm::And
            | BTerm::Wire(_) => true,
            BTerm::Pair(a, b) => a.is_value() && b.is_value(),
            // `and` is curried; a partial application is a value
            BTerm::App(f, a) => matches!(**f, BTerm::And) && a.is_value(),
            _ => false,
        }
    }

    /// Occurrences of a given wire in the term.
    pub fn count_wire(&self, wire: WireId) -> usize {
        match self {
            BTerm::Wire(w) => usize::from(*w == wire),
            BTerm::Lam(_, b) => b.count_wire(wire),
            BTerm::App(a, b) | BTerm::Pair(a, b) => a.count_wire(wire) + b.count_wire(wire),
            BTerm::LetPair(_, _, a, b) | BTerm::LetRec(_, _, a, b) => {
                a.count_wire(wire) + b.count_wire(wire)
            }
            BTerm::If(a, b, c) => a.count_wire(wire) + b.count_wire(wire) + c.count_wire(wire),
            _ => 0,
        }
    }

    pub fn subst(&self, var: &str, value: &BTerm) -> BTerm {
        match self {
            BTerm::Var(x) => {
                if x == var {
                    value.clone()
                } else {
                    self.clone()
                }
            }
            BTerm::Lam(x, b) => {
                if x == var {
                    self.clone()
                } else {
                    BTerm::lam(x, b.subst(var, value))
                }
            }
            BTerm::App(a, b) => BTerm::app(a.subst(var, value), b.subst(var, value)),
            BTerm::Pair(a, b) => BTerm::Pair(
                Box::new(a.subst(var, value)),
                Box::new(b.subst(var, value)),
            ),
            BTerm::LetPair(x, y, a, b) => {
                let b2 = if x == var || y == var {
                    (**b).clone()
                } else {
                    b.subst(var, value)
                };
                BTerm::LetPair(x.clone(), y.clone(), Box::new(a.subst(var, value)), Box::new(b2))
            }
            BTerm::If(c, t, e) => BTerm::If(
                Box::new(c.subst(var, value)),
                Box::new(t.subst(var, value)),
                Box::new(e.subst(var, value)),
            ),
            BTerm::LetRec(f, x, m, n) => {
                let m2 = if f == var || x == var {
                    (**m).clone()
                } else {
                    m.subst(var, value)
                };
                let n2 = if f == var {
                    (**n).clone()
                } else {
                    n.subst(var, value)
                };
                BTerm::LetRec(f.clone(), x.clone(), Box::new(m2), Box::new(n2))
            }
            BTerm::Bool(_) | BTerm::Not | BTerm::And | BTerm::Wire(_) => self.clone(),
        }
    }

    /// Operator count of the term: `not`, `and`, `if` nodes and Boolean
    /// constants. Used for the linear-size bound.
    pub fn operator_count(&self) -> usize {
        match self {
            BTerm::Not | BTerm::And | BTerm::Bool(_) => 1,
            BTerm::Var(_) | BTerm::Wire(_) => 0,
            BTerm::Lam(_, b) => b.operator_count(),
            BTerm::App(a, b) | BTerm::Pair(a, b) => a.operator_count() + b.operator_count(),
            BTerm::LetPair(_, _, a, b) | BTerm::LetRec(_, _, a, b) => {
                a.operator_count() + b.operator_count()
            }
            BTerm::If(a, b, c) => {
                1 + a.operator_count() + b.operator_count() + c.operator_count()
            }
        }
    }
}

impl fmt::Display for BTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BTerm::Var(x) => write!(f, "{x}"),
            BTerm::Lam(x, b) => write!(f, "(fun {x} -> {b})"),
            BTerm::App(a, b) => write!(f, "({a} {b})"),
            BTerm::Bool(true) => write!(f, "tt"),
            BTerm::Bool(false) => write!(f, "ff"),
            BTerm::Not => write!(f, "not"),
            BTerm::And => write!(f, "and"),
            BTerm::Pair(a, b) => write!(f, "({a}, {b})"),
            BTerm::LetPair(x, y, a, b) => write!(f, "(let ({x}, {y}) = {a} in {b})"),
            BTerm::If(c, t, e) => write!(f, "(if {c} then {t} else {e})"),
            BTerm::LetRec(g, x, m, n) => write!(f, "(letrec {g} {x} = {m} in {n})"),
            BTerm::Wire(w) => write!(f, "#{w}"),
        }
    }
}

/// Simple types over `bool`.
#[derive(Debug, Clone, PartialEq)]
pub enum BType {
    Bool,
    Fun(Box<BType>, Box<BType>),
    Prod(Box<BType>, Box<BType>),
}

impl BType {
    /// Number of Boolean leaves of a first-order output type.
    pub fn bool_width(&self) -> Result<usize, OracleError> {
        match self {
            BType::Bool => Ok(1),
            BType::Prod(a, b) => Ok(a.bool_width()? + b.bool_width()?),
            BType::Fun(_, _) => Err(OracleError::HigherOrderResult),
        }
    }
}

impl fmt::Display for BType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BType::Bool => write!(f, "bool"),
            BType::Fun(a, b) => write!(f, "({a} -> {b})"),
            BType::Prod(a, b) => write!(f, "({a} * {b})"),
        }
    }
}
