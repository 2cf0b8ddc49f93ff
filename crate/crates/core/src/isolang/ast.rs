use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::qnum::Amplitude;

/// Types: `X | 1 | a * b | a + b | mu X. a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoType {
    Var(String),
    One,
    Tensor(Box<IsoType>, Box<IsoType>),
    Sum(Box<IsoType>, Box<IsoType>),
    Mu(String, Box<IsoType>),
}

impl IsoType {
    pub fn tensor(a: IsoType, b: IsoType) -> IsoType {
        IsoType::Tensor(Box::new(a), Box::new(b))
    }

    pub fn sum(a: IsoType, b: IsoType) -> IsoType {
        IsoType::Sum(Box::new(a), Box::new(b))
    }

    /// `bool = 1 + 1` (false is the left injection).
    pub fn bool_type() -> IsoType {
        IsoType::sum(IsoType::One, IsoType::One)
    }

    /// `[a] = mu X. 1 + (a * X)`.
    pub fn list_of(a: IsoType) -> IsoType {
        IsoType::Mu(
            "X".into(),
            Box::new(IsoType::sum(
                IsoType::One,
                IsoType::tensor(a, IsoType::Var("X".into())),
            )),
        )
    }

    /// Substitute a type for a `mu`-bound variable.
    pub fn subst(&self, var: &str, ty: &IsoType) -> IsoType {
        match self {
            IsoType::Var(x) => {
                if x == var {
                    ty.clone()
                } else {
                    self.clone()
                }
            }
            IsoType::One => IsoType::One,
            IsoType::Tensor(a, b) => IsoType::tensor(a.subst(var, ty), b.subst(var, ty)),
            IsoType::Sum(a, b) => IsoType::sum(a.subst(var, ty), b.subst(var, ty)),
            IsoType::Mu(x, body) => {
                if x == var {
                    self.clone()
                } else {
                    IsoType::Mu(x.clone(), Box::new(body.subst(var, ty)))
                }
            }
        }
    }

    /// One unrolling of a `mu` type.
    pub fn unroll(&self) -> Option<IsoType> {
        match self {
            IsoType::Mu(x, body) => Some(body.subst(x, self)),
            _ => None,
        }
    }

    pub fn contains_mu(&self) -> bool {
        match self {
            IsoType::Mu(_, _) => true,
            IsoType::Tensor(a, b) | IsoType::Sum(a, b) => a.contains_mu() || b.contains_mu(),
            _ => false,
        }
    }

    pub fn contains_var(&self) -> bool {
        match self {
            IsoType::Var(_) => true,
            IsoType::Tensor(a, b) | IsoType::Sum(a, b) => a.contains_var() || b.contains_var(),
            IsoType::Mu(_, body) => body.contains_var(),
            IsoType::One => false,
        }
    }
}

impl fmt::Display for IsoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoType::Var(x) => write!(f, "{x}"),
            IsoType::One => write!(f, "1"),
            IsoType::Tensor(a, b) => write!(f, "({a} * {b})"),
            IsoType::Sum(a, b) => write!(f, "({a} + {b})"),
            IsoType::Mu(x, body) => write!(f, "mu {x}. {body}"),
        }
    }
}

/// Patterns; closed patterns are values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pattern {
    Unit,
    Var(String),
    Pair(Box<Pattern>, Box<Pattern>),
    InL(Box<Pattern>),
    InR(Box<Pattern>),
    Fold(Box<Pattern>),
}

impl Pattern {
    pub fn pair(a: Pattern, b: Pattern) -> Pattern {
        Pattern::Pair(Box::new(a), Box::new(b))
    }

    pub fn inl(p: Pattern) -> Pattern {
        Pattern::InL(Box::new(p))
    }

    pub fn inr(p: Pattern) -> Pattern {
        Pattern::InR(Box::new(p))
    }

    pub fn fold(p: Pattern) -> Pattern {
        Pattern::Fold(Box::new(p))
    }

    /// `ff = inl ()`, `tt = inr ()` — false first so that the Boolean basis
    /// order matches the computational basis.
    pub fn bool_value(b: bool) -> Pattern {
        if b {
            Pattern::inr(Pattern::Unit)
        } else {
            Pattern::inl(Pattern::Unit)
        }
    }

    pub fn nil() -> Pattern {
        Pattern::fold(Pattern::inl(Pattern::Unit))
    }

    pub fn cons(head: Pattern, tail: Pattern) -> Pattern {
        Pattern::fold(Pattern::inr(Pattern::pair(head, tail)))
    }

    pub fn list(items: Vec<Pattern>) -> Pattern {
        items
            .into_iter()
            .rev()
            .fold(Pattern::nil(), |tail, head| Pattern::cons(head, tail))
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Pattern::Var(_) => false,
            Pattern::Unit => true,
            Pattern::Pair(a, b) => a.is_closed() && b.is_closed(),
            Pattern::InL(p) | Pattern::InR(p) | Pattern::Fold(p) => p.is_closed(),
        }
    }

    /// Variables in order of appearance; each appears at most once in a
    /// linear pattern.
    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Var(x) => out.push(x.clone()),
            Pattern::Unit => {}
            Pattern::Pair(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Pattern::InL(p) | Pattern::InR(p) | Pattern::Fold(p) => p.vars(out),
        }
    }

    /// Match a closed value, producing bindings.
    pub fn match_value(&self, value: &Pattern) -> Option<BTreeMap<String, Pattern>> {
        let mut bindings = BTreeMap::new();
        if self.match_into(value, &mut bindings) {
            Some(bindings)
        } else {
            None
        }
    }

    fn match_into(&self, value: &Pattern, bindings: &mut BTreeMap<String, Pattern>) -> bool {
        match (self, value) {
            (Pattern::Var(x), v) => {
                bindings.insert(x.clone(), v.clone());
                true
            }
            (Pattern::Unit, Pattern::Unit) => true,
            (Pattern::Pair(a, b), Pattern::Pair(v, w)) => {
                a.match_into(v, bindings) && b.match_into(w, bindings)
            }
            (Pattern::InL(p), Pattern::InL(v))
            | (Pattern::InR(p), Pattern::InR(v))
            | (Pattern::Fold(p), Pattern::Fold(v)) => p.match_into(v, bindings),
            _ => false,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // booleans and lists print through their sugar
        if *self == Pattern::bool_value(false) {
            return write!(f, "ff");
        }
        if *self == Pattern::bool_value(true) {
            return write!(f, "tt");
        }
        if let Some(items) = self.as_list() {
            let rendered: Vec<String> = items.iter().map(|p| p.to_string()).collect();
            return write!(f, "[{}]", rendered.join(", "));
        }
        match self {
            Pattern::Unit => write!(f, "()"),
            Pattern::Var(x) => write!(f, "{x}"),
            Pattern::Pair(a, b) => write!(f, "({a}, {b})"),
            Pattern::InL(p) => write!(f, "inl {p}"),
            Pattern::InR(p) => write!(f, "inr {p}"),
            Pattern::Fold(p) => write!(f, "fold {p}"),
        }
    }
}

impl Pattern {
    fn as_list(&self) -> Option<Vec<Pattern>> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Pattern::Fold(inner) => match &**inner {
                    Pattern::InL(u) if **u == Pattern::Unit => return Some(items),
                    Pattern::InR(pair) => match &**pair {
                        Pattern::Pair(h, t) => {
                            items.push((**h).clone());
                            cur = t;
                        }
                        _ => return None,
                    },
                    _ => return None,
                },
                _ => return None,
            }
        }
    }
}

/// Right-hand-side expression: a pattern skeleton with iso applications.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Unit,
    Var(String),
    Pair(Box<Expr>, Box<Expr>),
    InL(Box<Expr>),
    InR(Box<Expr>),
    Fold(Box<Expr>),
    /// Application of a named iso, an iso parameter, or the fixpoint self.
    App(IsoRef, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoRef {
    Named(String),
    Param(String),
    SelfRec,
}

impl Expr {
    pub fn from_pattern(p: &Pattern) -> Expr {
        match p {
            Pattern::Unit => Expr::Unit,
            Pattern::Var(x) => Expr::Var(x.clone()),
            Pattern::Pair(a, b) => Expr::Pair(
                Box::new(Expr::from_pattern(a)),
                Box::new(Expr::from_pattern(b)),
            ),
            Pattern::InL(p) => Expr::InL(Box::new(Expr::from_pattern(p))),
            Pattern::InR(p) => Expr::InR(Box::new(Expr::from_pattern(p))),
            Pattern::Fold(p) => Expr::Fold(Box::new(Expr::from_pattern(p))),
        }
    }

    /// The pattern skeleton with applications replaced by fresh variables
    /// (an application of a bijection is covering by induction).
    pub fn skeleton(&self, fresh: &mut usize) -> Pattern {
        match self {
            Expr::Unit => Pattern::Unit,
            Expr::Var(x) => Pattern::Var(x.clone()),
            Expr::Pair(a, b) => Pattern::pair(a.skeleton(fresh), b.skeleton(fresh)),
            Expr::InL(e) => Pattern::inl(e.skeleton(fresh)),
            Expr::InR(e) => Pattern::inr(e.skeleton(fresh)),
            Expr::Fold(e) => Pattern::fold(e.skeleton(fresh)),
            Expr::App(_, _) => {
                *fresh += 1;
                Pattern::Var(format!("_app{fresh}"))
            }
        }
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Var(x) => out.push(x.clone()),
            Expr::Unit => {}
            Expr::Pair(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Expr::InL(e) | Expr::InR(e) | Expr::Fold(e) => e.vars(out),
            Expr::App(_, e) => e.vars(out),
        }
    }

    pub fn substitute_param(&self, param: &str, target: &IsoRef) -> Expr {
        match self {
            Expr::App(IsoRef::Param(p), e) if p == param => Expr::App(
                target.clone(),
                Box::new(e.substitute_param(param, target)),
            ),
            Expr::App(r, e) => Expr::App(r.clone(), Box::new(e.substitute_param(param, target))),
            Expr::Pair(a, b) => Expr::Pair(
                Box::new(a.substitute_param(param, target)),
                Box::new(b.substitute_param(param, target)),
            ),
            Expr::InL(e) => Expr::InL(Box::new(e.substitute_param(param, target))),
            Expr::InR(e) => Expr::InR(Box::new(e.substitute_param(param, target))),
            Expr::Fold(e) => Expr::Fold(Box::new(e.substitute_param(param, target))),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Unit => write!(f, "()"),
            Expr::Var(x) => write!(f, "{x}"),
            Expr::Pair(a, b) => write!(f, "({a}, {b})"),
            Expr::InL(e) => write!(f, "inl {e}"),
            Expr::InR(e) => write!(f, "inr {e}"),
            Expr::Fold(e) => write!(f, "fold {e}"),
            Expr::App(IsoRef::Named(g), e) => write!(f, "{g} ({e})"),
            Expr::App(IsoRef::Param(g), e) => write!(f, "{g} ({e})"),
            Expr::App(IsoRef::SelfRec, e) => write!(f, "self ({e})"),
        }
    }
}

/// One clause: a left pattern and a formal combination of right expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub lhs: Pattern,
    /// Classical clauses have a single summand with amplitude 1.
    pub rhs: Vec<(Amplitude, Expr)>,
}

impl Clause {
    pub fn is_classical(&self) -> bool {
        self.rhs.len() == 1 && (self.rhs[0].0 - Complex64::new(1.0, 0.0)).norm() < 1e-12
    }
}

/// An iso definition.
#[derive(Debug, Clone, PartialEq)]
pub struct Iso {
    pub name: Option<String>,
    /// First-order iso parameters with their declared types.
    pub params: Vec<(String, IsoType, IsoType)>,
    /// Fixpoint binder, if the body is recursive.
    pub fix: Option<String>,
    pub lhs_ty: IsoType,
    pub rhs_ty: IsoType,
    pub clauses: Vec<Clause>,
}

impl Iso {
    pub fn is_classical(&self) -> bool {
        self.clauses.iter().all(Clause::is_classical)
    }

    /// Substitute an argument iso for the first parameter.
    pub fn instantiate(&self, arg_name: &str) -> Iso {
        let mut out = self.clone();
        if let Some((param, _, _)) = out.params.first().cloned() {
            out.params.remove(0);
            let target = IsoRef::Named(arg_name.to_string());
            for clause in &mut out.clauses {
                for (_, expr) in &mut clause.rhs {
                    *expr = expr.substitute_param(&param, &target);
                }
            }
        }
        out
    }
}

/// Formal finite linear combination of closed values.
#[derive(Debug, Clone, PartialEq)]
pub struct AmpValue {
    /// Pairwise distinct values in canonical order.
    pub terms: Vec<(Amplitude, Pattern)>,
}

impl AmpValue {
    pub fn basis(value: Pattern) -> AmpValue {
        AmpValue {
            terms: vec![(Complex64::new(1.0, 0.0), value)],
        }
    }

    /// Merge like values, drop near-zero amplitudes, sort canonically.
    pub fn normalize(mut terms: Vec<(Amplitude, Pattern)>) -> AmpValue {
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(Amplitude, Pattern)> = Vec::new();
        for (amp, value) in terms {
            match merged.last_mut() {
                Some((acc, last)) if *last == value => *acc += amp,
                _ => merged.push((amp, value)),
            }
        }
        merged.retain(|(amp, _)| amp.norm() > 1e-12);
        AmpValue { terms: merged }
    }

    pub fn norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|(a, _)| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for AmpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|(a, v)| {
                if (a - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
                    v.to_string()
                } else if a.im.abs() < 1e-12 {
                    format!("{} * {v}", a.re)
                } else {
                    format!("({} + {}i) * {v}", a.re, a.im)
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}
