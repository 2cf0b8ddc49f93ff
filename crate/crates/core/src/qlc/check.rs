//! Linear type checker.
//!
//! Checking runs in two phases. A unification pass infers the simple-type
//! skeleton (no `!`), then a resource pass enforces the linear discipline on
//! the typed tree:
//!
//! - a lambda-bound variable used exactly once stays linear; used zero or
//!   two-plus times it must be of function type and is marked duplicable
//!   (its domain is reported as `!(A ⊸ B)`),
//! - both branches of an `if` must consume the same linear variables,
//! - an argument fed to a duplicating lambda (and the argument of `box`)
//!   must be promotable: a syntactic value of function type whose free
//!   variables are themselves duplicable — or an `unbox` value, whose
//!   duplicability comes from its type rather than promotion,
//! - qubit-typed data can never be promoted, so `!qbit` stays empty.

use std::collections::BTreeMap;
use std::rc::Rc;

use super::ast::{QType, Span, TNode, TTerm, Term, TermNode};
use super::QlcError;
use crate::circuit::Circuit;
use crate::qnum::GateName;

/// Inference types: the skeleton language plus metavariables.
#[derive(Debug, Clone, PartialEq)]
enum ITy {
    Var(u32),
    Qbit,
    Bit,
    One,
    Fun(Rc<ITy>, Rc<ITy>),
    Tensor(Rc<ITy>, Rc<ITy>),
    Circ(Rc<ITy>, Rc<ITy>),
}

struct Infer {
    subst: Vec<Option<ITy>>,
}

impl Infer {
    fn fresh(&mut self) -> ITy {
        self.subst.push(None);
        ITy::Var(self.subst.len() as u32 - 1)
    }

    fn prune(&self, t: &ITy) -> ITy {
        match t {
            ITy::Var(v) => match &self.subst[*v as usize] {
                Some(inner) => self.prune(inner),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn occurs(&self, v: u32, t: &ITy) -> bool {
        match self.prune(t) {
            ITy::Var(w) => w == v,
            ITy::Fun(a, b) | ITy::Tensor(a, b) | ITy::Circ(a, b) => {
                self.occurs(v, &a) || self.occurs(v, &b)
            }
            _ => false,
        }
    }

    fn unify(&mut self, a: &ITy, b: &ITy, span: Span) -> Result<(), QlcError> {
        let (a, b) = (self.prune(a), self.prune(b));
        match (&a, &b) {
            (ITy::Var(v), _) => {
                if let ITy::Var(w) = b {
                    if w == *v {
                        return Ok(());
                    }
                }
                if self.occurs(*v, &b) {
                    return Err(QlcError::Type {
                        span,
                        msg: "infinite type".into(),
                    });
                }
                self.subst[*v as usize] = Some(b);
                Ok(())
            }
            (_, ITy::Var(_)) => self.unify(&b, &a, span),
            (ITy::Qbit, ITy::Qbit) | (ITy::Bit, ITy::Bit) | (ITy::One, ITy::One) => Ok(()),
            (ITy::Fun(a1, b1), ITy::Fun(a2, b2))
            | (ITy::Tensor(a1, b1), ITy::Tensor(a2, b2))
            | (ITy::Circ(a1, b1), ITy::Circ(a2, b2)) => {
                self.unify(a1, a2, span)?;
                self.unify(b1, b2, span)
            }
            _ => Err(QlcError::Type {
                span,
                msg: format!(
                    "type mismatch: {} vs {}",
                    self.render(&a),
                    self.render(&b)
                ),
            }),
        }
    }

    fn render(&self, t: &ITy) -> String {
        match self.prune(t) {
            ITy::Var(v) => format!("?{v}"),
            ITy::Qbit => "qbit".into(),
            ITy::Bit => "bit".into(),
            ITy::One => "1".into(),
            ITy::Fun(a, b) => format!("({} ⊸ {})", self.render(&a), self.render(&b)),
            ITy::Tensor(a, b) => format!("({} ⊗ {})", self.render(&a), self.render(&b)),
            ITy::Circ(a, b) => format!("circ({}, {})", self.render(&a), self.render(&b)),
        }
    }

    /// Fully resolve to a QType; unresolved metavariables are ambiguity.
    fn resolve(&self, t: &ITy, span: Span) -> Result<QType, QlcError> {
        match self.prune(t) {
            ITy::Var(_) => Err(QlcError::Type {
                span,
                msg: "ambiguous type: the term has no unique implicit type".into(),
            }),
            ITy::Qbit => Ok(QType::Qbit),
            ITy::Bit => Ok(QType::Bit),
            ITy::One => Ok(QType::One),
            ITy::Fun(a, b) => Ok(QType::fun(self.resolve(&a, span)?, self.resolve(&b, span)?)),
            ITy::Tensor(a, b) => Ok(QType::tensor(
                self.resolve(&a, span)?,
                self.resolve(&b, span)?,
            )),
            ITy::Circ(a, b) => Ok(QType::circ(self.resolve(&a, span)?, self.resolve(&b, span)?)),
        }
    }
}

fn ity_of_qtype(t: &QType) -> ITy {
    match t.unbang() {
        QType::Qbit => ITy::Qbit,
        QType::Bit => ITy::Bit,
        QType::One => ITy::One,
        QType::Fun(a, b) => ITy::Fun(Rc::new(ity_of_qtype(a)), Rc::new(ity_of_qtype(b))),
        QType::Tensor(a, b) => ITy::Tensor(Rc::new(ity_of_qtype(a)), Rc::new(ity_of_qtype(b))),
        QType::Circ(a, b) => ITy::Circ(Rc::new(ity_of_qtype(a)), Rc::new(ity_of_qtype(b))),
        QType::Bang(_) => unreachable!("unbang strips the bang"),
    }
}

fn gate_ity(g: GateName) -> ITy {
    let n = g.target_arity();
    fn qbits(n: usize) -> ITy {
        if n == 1 {
            ITy::Qbit
        } else {
            ITy::Tensor(Rc::new(ITy::Qbit), Rc::new(qbits(n - 1)))
        }
    }
    ITy::Fun(Rc::new(qbits(n)), Rc::new(qbits(n)))
}

/// Skeleton-typed tree produced by the unification pass.
struct Skel {
    node: SkelNode,
    ty: ITy,
    span: Span,
}

enum SkelNode {
    Var(String),
    Lam(String, ITy, Box<Skel>),
    App(Box<Skel>, Box<Skel>),
    Pair(Box<Skel>, Box<Skel>),
    LetPair(String, ITy, String, ITy, Box<Skel>, Box<Skel>),
    Unit,
    LetUnit(Box<Skel>, Box<Skel>),
    Bool(bool),
    If(Box<Skel>, Box<Skel>, Box<Skel>),
    Gate(GateName),
    QInit,
    Meas,
    BoxC,
    Unbox,
    LetRec(String, ITy, String, ITy, Box<Skel>, Box<Skel>),
    CircRef(Rc<Circuit>),
}

fn infer(
    inf: &mut Infer,
    env: &mut Vec<(String, ITy)>,
    term: &Term,
) -> Result<Skel, QlcError> {
    let span = term.span;
    let (node, ty) = match &term.node {
        TermNode::Var(x) => {
            let ty = env
                .iter()
                .rev()
                .find(|(name, _)| name == x)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| QlcError::Type {
                    span,
                    msg: format!("unbound variable `{x}`"),
                })?;
            (SkelNode::Var(x.clone()), ty)
        }
        TermNode::Lam(x, body) => {
            let dom = inf.fresh();
            env.push((x.clone(), dom.clone()));
            let body = infer(inf, env, body)?;
            env.pop();
            let ty = ITy::Fun(Rc::new(dom.clone()), Rc::new(body.ty.clone()));
            (SkelNode::Lam(x.clone(), dom, Box::new(body)), ty)
        }
        TermNode::App(f, a) => {
            let f = infer(inf, env, f)?;
            let a = infer(inf, env, a)?;
            let out = inf.fresh();
            inf.unify(
                &f.ty,
                &ITy::Fun(Rc::new(a.ty.clone()), Rc::new(out.clone())),
                span,
            )?;
            (SkelNode::App(Box::new(f), Box::new(a)), out)
        }
        TermNode::Pair(a, b) => {
            let a = infer(inf, env, a)?;
            let b = infer(inf, env, b)?;
            let ty = ITy::Tensor(Rc::new(a.ty.clone()), Rc::new(b.ty.clone()));
            (SkelNode::Pair(Box::new(a), Box::new(b)), ty)
        }
        TermNode::LetPair(x, y, scrutinee, body) => {
            let s = infer(inf, env, scrutinee)?;
            let tx = inf.fresh();
            let ty_ = inf.fresh();
            inf.unify(
                &s.ty,
                &ITy::Tensor(Rc::new(tx.clone()), Rc::new(ty_.clone())),
                span,
            )?;
            env.push((x.clone(), tx.clone()));
            env.push((y.clone(), ty_.clone()));
            let body = infer(inf, env, body)?;
            env.pop();
            env.pop();
            let out = body.ty.clone();
            (
                SkelNode::LetPair(x.clone(), tx, y.clone(), ty_, Box::new(s), Box::new(body)),
                out,
            )
        }
        TermNode::Unit => (SkelNode::Unit, ITy::One),
        TermNode::LetUnit(scrutinee, body) => {
            let s = infer(inf, env, scrutinee)?;
            inf.unify(&s.ty, &ITy::One, span)?;
            let body = infer(inf, env, body)?;
            let out = body.ty.clone();
            (SkelNode::LetUnit(Box::new(s), Box::new(body)), out)
        }
        TermNode::Bool(b) => (SkelNode::Bool(*b), ITy::Bit),
        TermNode::If(cond, then, els) => {
            let c = infer(inf, env, cond)?;
            inf.unify(&c.ty, &ITy::Bit, span)?;
            let t = infer(inf, env, then)?;
            let e = infer(inf, env, els)?;
            inf.unify(&t.ty, &e.ty, span)?;
            let out = t.ty.clone();
            (SkelNode::If(Box::new(c), Box::new(t), Box::new(e)), out)
        }
        TermNode::Gate(g) => (SkelNode::Gate(*g), gate_ity(*g)),
        TermNode::QInit => (
            SkelNode::QInit,
            ITy::Fun(Rc::new(ITy::Bit), Rc::new(ITy::Qbit)),
        ),
        TermNode::Meas => (
            SkelNode::Meas,
            ITy::Fun(Rc::new(ITy::Qbit), Rc::new(ITy::Bit)),
        ),
        TermNode::BoxC => {
            let a = inf.fresh();
            let b = inf.fresh();
            (
                SkelNode::BoxC,
                ITy::Fun(
                    Rc::new(ITy::Fun(Rc::new(a.clone()), Rc::new(b.clone()))),
                    Rc::new(ITy::Circ(Rc::new(a), Rc::new(b))),
                ),
            )
        }
        TermNode::Unbox => {
            let a = inf.fresh();
            let b = inf.fresh();
            (
                SkelNode::Unbox,
                ITy::Fun(
                    Rc::new(ITy::Circ(Rc::new(a.clone()), Rc::new(b.clone()))),
                    Rc::new(ITy::Fun(Rc::new(a), Rc::new(b))),
                ),
            )
        }
        TermNode::LetRec(f, x, fbody, rest) => {
            let dom = inf.fresh();
            let cod = inf.fresh();
            let fty = ITy::Fun(Rc::new(dom.clone()), Rc::new(cod.clone()));
            env.push((f.clone(), fty.clone()));
            env.push((x.clone(), dom.clone()));
            let fb = infer(inf, env, fbody)?;
            env.pop();
            inf.unify(&fb.ty, &cod, span)?;
            let rest = infer(inf, env, rest)?;
            env.pop();
            let out = rest.ty.clone();
            (
                SkelNode::LetRec(f.clone(), fty, x.clone(), dom, Box::new(fb), Box::new(rest)),
                out,
            )
        }
        TermNode::CircRef(c, a, b) => {
            let ty = ITy::Circ(Rc::new(ity_of_qtype(a)), Rc::new(ity_of_qtype(b)));
            (SkelNode::CircRef(c.clone()), ty)
        }
    };
    Ok(Skel { node, ty, span })
}

/// Typed-tree builder: resolves every skeleton type and rewrites duplicable
/// binder domains to `!`-types.
struct ResourceCtx<'a> {
    inf: &'a Infer,
    /// variable -> duplicable?
    dup: BTreeMap<String, bool>,
}

type Usage = BTreeMap<String, usize>;

fn merge_usage(a: &mut Usage, b: Usage) {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
}

impl ResourceCtx<'_> {
    fn check(&mut self, skel: &Skel) -> Result<(TTerm, Usage), QlcError> {
        let span = skel.span;
        let ty = self.inf.resolve(&skel.ty, span)?;
        match &skel.node {
            SkelNode::Var(x) => {
                let mut u = Usage::new();
                u.insert(x.clone(), 1);
                Ok((TTerm::new(TNode::Var(x.clone()), ty), u))
            }
            SkelNode::Lam(x, dom, body) => {
                let dom_ty = self.inf.resolve(dom, span)?;
                let (body_t, usage, dup) = self.bind_one(x, dom, span, body)?;
                let reported = if dup {
                    QType::fun(QType::bang(dom_ty), body_t.ty().clone())
                } else {
                    QType::fun(dom_ty, body_t.ty().clone())
                };
                Ok((TTerm::new(TNode::Lam(x.clone(), body_t), reported), usage))
            }
            SkelNode::App(f, a) => {
                let (ft, mut fu) = self.check(f)?;
                let (at, au) = self.check(a)?;
                // a direct lambda that duplicates its binder demands a
                // promotable argument; so does `box`
                if matches!(ft.node(), TNode::Lam(_, _)) {
                    let needs_bang = matches!(ft.ty().unbang(), QType::Fun(d, _) if matches!(**d, QType::Bang(_)));
                    if needs_bang {
                        self.require_promotable(&at, span)?;
                    }
                }
                if matches!(ft.node(), TNode::BoxC) {
                    self.require_promotable(&at, span)?;
                    // the boxed interface must be qubit-shaped
                    if let QType::Circ(ia, ib) = &ty {
                        if ia.qubit_shape().is_none() || ib.qubit_shape().is_none() {
                            return Err(QlcError::Type {
                                span,
                                msg: format!("box requires a qubit-shaped interface, got circ({ia}, {ib})"),
                            });
                        }
                    }
                }
                merge_usage(&mut fu, au);
                Ok((TTerm::new(TNode::App(ft, at), ty), fu))
            }
            SkelNode::Pair(a, b) => {
                let (at, mut au) = self.check(a)?;
                let (bt, bu) = self.check(b)?;
                merge_usage(&mut au, bu);
                Ok((TTerm::new(TNode::Pair(at, bt), ty), au))
            }
            SkelNode::LetPair(x, tx, y, ty_, scrutinee, body) => {
                let (st, mut su) = self.check(scrutinee)?;
                let (body_t, bu) = self.bind_two(x, tx, y, ty_, span, body)?;
                merge_usage(&mut su, bu);
                Ok((
                    TTerm::new(TNode::LetPair(x.clone(), y.clone(), st, body_t), ty),
                    su,
                ))
            }
            SkelNode::Unit => Ok((TTerm::new(TNode::Unit, ty), Usage::new())),
            SkelNode::LetUnit(s, body) => {
                let (st, mut su) = self.check(s)?;
                let (bt, bu) = self.check(body)?;
                merge_usage(&mut su, bu);
                Ok((TTerm::new(TNode::LetUnit(st, bt), ty), su))
            }
            SkelNode::Bool(b) => Ok((TTerm::new(TNode::Bool(*b), ty), Usage::new())),
            SkelNode::If(c, t, e) => {
                let (ct, mut cu) = self.check(c)?;
                let (tt, tu) = self.check(t)?;
                let (et, eu) = self.check(e)?;
                // both branches must consume the same linear variables
                let keys: Vec<&String> = tu.keys().chain(eu.keys()).collect();
                for k in keys {
                    if self.dup.get(k).copied().unwrap_or(false) {
                        continue;
                    }
                    let a = tu.get(k).copied().unwrap_or(0);
                    let b = eu.get(k).copied().unwrap_or(0);
                    if a != b {
                        return Err(QlcError::Type {
                            span,
                            msg: format!(
                                "linear variable `{k}` is used {a} time(s) in the then-branch but {b} in the else-branch"
                            ),
                        });
                    }
                }
                // count each branch's usage once (they share the context)
                let mut shared = tu;
                for (k, v) in eu {
                    shared.entry(k).or_insert(v);
                }
                merge_usage(&mut cu, shared);
                Ok((TTerm::new(TNode::If(ct, tt, et), ty), cu))
            }
            SkelNode::Gate(g) => Ok((TTerm::new(TNode::Gate(*g), ty), Usage::new())),
            SkelNode::QInit => Ok((TTerm::new(TNode::QInit, ty), Usage::new())),
            SkelNode::Meas => Ok((TTerm::new(TNode::Meas, ty), Usage::new())),
            SkelNode::BoxC => Ok((TTerm::new(TNode::BoxC, ty), Usage::new())),
            SkelNode::Unbox => Ok((TTerm::new(TNode::Unbox, ty), Usage::new())),
            SkelNode::CircRef(c) => {
                Ok((TTerm::new(TNode::CircVal(c.clone()), ty), Usage::new()))
            }
            SkelNode::LetRec(f, fty, x, dom, fbody, rest) => {
                // the recursive function is duplicable by construction; its
                // closure must not capture linear data
                let saved_f = self.dup.insert(f.clone(), true);
                let body_result = self.bind_one(x, dom, span, fbody);
                let rest_result = body_result.and_then(|(fb, mut fu, _)| {
                    fu.remove(f);
                    for (var, count) in &fu {
                        if *count > 0 && !self.dup.get(var).copied().unwrap_or(false) {
                            return Err(QlcError::Type {
                                span,
                                msg: format!(
                                    "recursive function captures linear variable `{var}`"
                                ),
                            });
                        }
                    }
                    let (rest_t, ru) = self.check(rest)?;
                    Ok((fb, fu, rest_t, ru))
                });
                match saved_f {
                    Some(prev) => {
                        self.dup.insert(f.clone(), prev);
                    }
                    None => {
                        self.dup.remove(f);
                    }
                }
                let (fb, mut usage, rest_t, ru) = rest_result?;
                merge_usage(&mut usage, ru);
                usage.remove(f);
                let _ = fty;
                Ok((
                    TTerm::new(TNode::LetRec(f.clone(), x.clone(), fb, rest_t), ty),
                    usage,
                ))
            }
        }
    }

    /// Check a body under one binder, enforcing the use-once rule or the
    /// duplicability conditions. Returns the body, its usage without the
    /// bound name, and whether the binder is duplicable. Shadowed entries
    /// of the duplicability scope are restored.
    fn bind_one(
        &mut self,
        x: &str,
        dom: &ITy,
        span: Span,
        body: &Skel,
    ) -> Result<(TTerm, Usage, bool), QlcError> {
        let count = count_uses(body, x);
        let dup = if count != 1 {
            let resolved = self.inf.resolve(dom, span)?;
            if !resolved.is_function() {
                return Err(if count == 0 {
                    QlcError::Type {
                        span,
                        msg: format!("linear variable `{x}` of type {resolved} is never used"),
                    }
                } else {
                    QlcError::Type {
                        span,
                        msg: format!(
                            "linear variable `{x}` of type {resolved} is used {count} times"
                        ),
                    }
                });
            }
            true
        } else {
            false
        };
        let saved = self.dup.insert(x.to_string(), dup);
        let result = self.check(body);
        match saved {
            Some(prev) => {
                self.dup.insert(x.to_string(), prev);
            }
            None => {
                self.dup.remove(x);
            }
        }
        let (body_t, mut usage) = result?;
        usage.remove(x);
        Ok((body_t, usage, dup))
    }

    fn bind_two(
        &mut self,
        x: &str,
        tx: &ITy,
        y: &str,
        ty_: &ITy,
        span: Span,
        body: &Skel,
    ) -> Result<(TTerm, Usage), QlcError> {
        let mut saved = Vec::new();
        for (name, dom) in [(x, tx), (y, ty_)] {
            let count = count_uses(body, name);
            let dup = if count != 1 {
                let resolved = self.inf.resolve(dom, span)?;
                if !resolved.is_function() {
                    // restore anything already scoped before bailing
                    for (name, prev) in saved {
                        restore(&mut self.dup, name, prev);
                    }
                    return Err(QlcError::Type {
                        span,
                        msg: format!(
                            "linear variable `{name}` of type {resolved} is used {count} time(s)"
                        ),
                    });
                }
                true
            } else {
                false
            };
            saved.push((name.to_string(), self.dup.insert(name.to_string(), dup)));
        }
        let result = self.check(body);
        for (name, prev) in saved {
            restore(&mut self.dup, name, prev);
        }
        let (body_t, mut usage) = result?;
        usage.remove(x);
        usage.remove(y);
        Ok((body_t, usage))
    }

    /// Promotion: only values of function type whose free variables are all
    /// duplicable may be promoted. `unbox` values carry their own `!`.
    fn require_promotable(&self, arg: &TTerm, span: Span) -> Result<(), QlcError> {
        if let TNode::App(f, _) = arg.node() {
            if matches!(f.node(), TNode::Unbox) {
                return Ok(());
            }
        }
        if !arg.is_value() {
            return Err(QlcError::Type {
                span,
                msg: "cannot promote: the argument is not a value".into(),
            });
        }
        if !arg.ty().is_function() {
            return Err(QlcError::Type {
                span,
                msg: format!("cannot promote a value of type {}", arg.ty()),
            });
        }
        for v in arg.free_vars() {
            if !self.dup.get(&v).copied().unwrap_or(false) {
                return Err(QlcError::Type {
                    span,
                    msg: format!(
                        "cannot promote: captures the non-duplicable variable `{v}`"
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Syntactic use count of `name` in a skeleton body (respecting shadowing).
fn count_uses(skel: &Skel, name: &str) -> usize {
    match &skel.node {
        SkelNode::Var(x) => usize::from(x == name),
        SkelNode::Lam(x, _, b) => {
            if x == name {
                0
            } else {
                count_uses(b, name)
            }
        }
        SkelNode::App(a, b) | SkelNode::Pair(a, b) | SkelNode::LetUnit(a, b) => {
            count_uses(a, name) + count_uses(b, name)
        }
        SkelNode::LetPair(x, _, y, _, s, b) => {
            count_uses(s, name)
                + if x == name || y == name {
                    0
                } else {
                    count_uses(b, name)
                }
        }
        SkelNode::If(c, t, e) => {
            // branches share the context; report the max so that a variable
            // used once in each branch counts as a single use
            count_uses(c, name) + count_uses(t, name).max(count_uses(e, name))
        }
        SkelNode::LetRec(f, _, x, _, m, n) => {
            let in_m = if f == name || x == name {
                0
            } else {
                count_uses(m, name)
            };
            let in_n = if f == name { 0 } else { count_uses(n, name) };
            in_m + in_n
        }
        _ => 0,
    }
}

/// Result of checking: the typed tree and its (possibly promoted) type.
#[derive(Debug, Clone)]
pub struct Checked {
    pub term: TTerm,
    pub ty: QType,
}

/// Typecheck a closed term.
pub fn typecheck(term: &Term) -> Result<Checked, QlcError> {
    typecheck_in(term, &[])
}

/// Typecheck with a context (used for machine residuals whose free
/// variables are qubit pointers).
pub fn typecheck_in(term: &Term, ctx: &[(String, QType)]) -> Result<Checked, QlcError> {
    let mut inf = Infer { subst: Vec::new() };
    let mut env: Vec<(String, ITy)> = ctx
        .iter()
        .map(|(name, t)| (name.clone(), ity_of_qtype(t)))
        .collect();
    let skel = infer(&mut inf, &mut env, term)?;
    let mut rc = ResourceCtx {
        inf: &inf,
        dup: BTreeMap::new(),
    };
    // context variables: qubits and other data are linear; duplicable
    // context entries are marked from their declared bang
    for (name, t) in ctx {
        rc.dup
            .insert(name.clone(), matches!(t, QType::Bang(_)));
    }
    let (tt, usage) = rc.check(&skel)?;
    // every linear context variable must be consumed exactly once
    for (name, t) in ctx {
        if matches!(t, QType::Bang(_)) {
            continue;
        }
        let n = usage.get(name).copied().unwrap_or(0);
        if n != 1 {
            return Err(QlcError::Type {
                span: term.span,
                msg: format!("context variable `{name}` is used {n} time(s)"),
            });
        }
    }
    // top-level promotion: a closed value of function type is duplicable
    let ty = if tt.is_value() && tt.ty().is_function() && usage.is_empty() && ctx.is_empty() {
        match tt.ty() {
            QType::Bang(_) => tt.ty().clone(),
            other => QType::bang(other.clone()),
        }
    } else {
        tt.ty().clone()
    };
    Ok(Checked { term: tt, ty })
}

/// Re-derive the type of an already-typed machine term (subject-reduction
/// checks). Free variables are the machine's qubit pointers.
pub fn recheck_machine_term(term: &TTerm, qubit_vars: &[String]) -> Result<QType, QlcError> {
    let ctx: Vec<(String, QType)> = qubit_vars
        .iter()
        .map(|v| (v.clone(), QType::Qbit))
        .collect();
    let untyped = strip(term);
    typecheck_in(&untyped, &ctx).map(|c| c.ty)
}

/// Forget types and spans, mapping circuit literals to a placeholder that
/// types identically (`unbox`-style values keep their applied shape).
fn strip(t: &TTerm) -> Term {
    let span = Span::default();
    let node = match t.node() {
        TNode::Var(x) => TermNode::Var(x.clone()),
        TNode::Lam(x, b) => TermNode::Lam(x.clone(), Box::new(strip(b))),
        TNode::App(a, b) => TermNode::App(Box::new(strip(a)), Box::new(strip(b))),
        TNode::Pair(a, b) => TermNode::Pair(Box::new(strip(a)), Box::new(strip(b))),
        TNode::LetPair(x, y, a, b) => {
            TermNode::LetPair(x.clone(), y.clone(), Box::new(strip(a)), Box::new(strip(b)))
        }
        TNode::Unit => TermNode::Unit,
        TNode::LetUnit(a, b) => TermNode::LetUnit(Box::new(strip(a)), Box::new(strip(b))),
        TNode::Bool(b) => TermNode::Bool(*b),
        TNode::If(a, b, c) => TermNode::If(
            Box::new(strip(a)),
            Box::new(strip(b)),
            Box::new(strip(c)),
        ),
        TNode::Gate(g) => TermNode::Gate(*g),
        TNode::QInit => TermNode::QInit,
        TNode::Meas => TermNode::Meas,
        TNode::BoxC => TermNode::BoxC,
        TNode::Unbox => TermNode::Unbox,
        TNode::LetRec(f, x, m, n) => {
            TermNode::LetRec(f.clone(), x.clone(), Box::new(strip(m)), Box::new(strip(n)))
        }
        TNode::CircVal(c) => match t.ty() {
            QType::Circ(a, b) => TermNode::CircRef(c.clone(), a.clone(), b.clone()),
            other => TermNode::CircRef(
                c.clone(),
                Box::new(other.clone()),
                Box::new(other.clone()),
            ),
        },
    };
    Term::new(node, span)
}

fn restore(dup: &mut BTreeMap<String, bool>, name: String, prev: Option<bool>) {
    match prev {
        Some(v) => {
            dup.insert(name, v);
        }
        None => {
            dup.remove(&name);
        }
    }
}
