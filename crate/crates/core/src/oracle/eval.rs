//! Standard call-by-value evaluation of Boolean terms, plus a light
//! type inferencer used to size oracle interfaces.

use std::rc::Rc;

use super::ast::{BTerm, BType};
use super::OracleError;

/// Big-step CBV evaluation by substitution; `fuel` bounds beta steps.
pub fn eval_bool(term: &BTerm, fuel: &mut usize) -> Result<BTerm, OracleError> {
    if *fuel == 0 {
        return Err(OracleError::Fuel);
    }
    *fuel -= 1;
    match term {
        t if t.is_value() => Ok(t.clone()),
        BTerm::App(f, a) => {
            let fv = eval_bool(f, fuel)?;
            let av = eval_bool(a, fuel)?;
            match &fv {
                BTerm::Lam(x, body) => eval_bool(&body.subst(x, &av), fuel),
                BTerm::Not => match av {
                    BTerm::Bool(b) => Ok(BTerm::Bool(!b)),
                    other => Err(OracleError::Eval(format!("not applied to {other}"))),
                },
                BTerm::And => Ok(BTerm::app(BTerm::And, av)),
                BTerm::App(g, first) if matches!(**g, BTerm::And) => {
                    match (&**first, &av) {
                        (BTerm::Bool(x), BTerm::Bool(y)) => Ok(BTerm::Bool(*x && *y)),
                        _ => Err(OracleError::Eval("and applied to non-bools".into())),
                    }
                }
                other => Err(OracleError::Eval(format!("cannot apply {other}"))),
            }
        }
        BTerm::Pair(a, b) => Ok(BTerm::Pair(
            Box::new(eval_bool(a, fuel)?),
            Box::new(eval_bool(b, fuel)?),
        )),
        BTerm::LetPair(x, y, s, body) => {
            let sv = eval_bool(s, fuel)?;
            match sv {
                BTerm::Pair(v, w) => eval_bool(&body.subst(x, &v).subst(y, &w), fuel),
                other => Err(OracleError::Eval(format!("let-pair of non-pair {other}"))),
            }
        }
        BTerm::If(c, t, e) => match eval_bool(c, fuel)? {
            BTerm::Bool(true) => eval_bool(t, fuel),
            BTerm::Bool(false) => eval_bool(e, fuel),
            other => Err(OracleError::Eval(format!("if of non-bool {other}"))),
        },
        BTerm::LetRec(f, x, m, n) => {
            let unrolled = BTerm::lam(
                x,
                BTerm::LetRec(f.clone(), x.clone(), m.clone(), m.clone()),
            );
            eval_bool(&n.subst(f, &unrolled), fuel)
        }
        BTerm::Var(x) => Err(OracleError::Eval(format!("unbound variable `{x}`"))),
        _ => Err(OracleError::Eval(format!("stuck term {term}"))),
    }
}

/// Apply `f` to the bits of `x` (most significant first) and evaluate,
/// returning the result bits.
pub fn apply_classical(
    term: &BTerm,
    n_inputs: usize,
    x: usize,
) -> Result<Vec<bool>, OracleError> {
    let mut applied = term.clone();
    for i in 0..n_inputs {
        let bit = (x >> (n_inputs - 1 - i)) & 1 == 1;
        applied = BTerm::app(applied, BTerm::Bool(bit));
    }
    let mut fuel = 1_000_000;
    let v = eval_bool(&applied, &mut fuel)?;
    let mut bits = Vec::new();
    flatten_bools(&v, &mut bits)?;
    Ok(bits)
}

fn flatten_bools(v: &BTerm, out: &mut Vec<bool>) -> Result<(), OracleError> {
    match v {
        BTerm::Bool(b) => {
            out.push(*b);
            Ok(())
        }
        BTerm::Pair(a, b) => {
            flatten_bools(a, out)?;
            flatten_bools(b, out)
        }
        other => Err(OracleError::Eval(format!(
            "result is not a tuple of booleans: {other}"
        ))),
    }
}

// ---- minimal unification-based type inference -------------------------------

#[derive(Debug, Clone, PartialEq)]
enum ITy {
    Var(u32),
    Bool,
    Fun(Rc<ITy>, Rc<ITy>),
    Prod(Rc<ITy>, Rc<ITy>),
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
            ITy::Fun(a, b) | ITy::Prod(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
            _ => false,
        }
    }

    fn unify(&mut self, a: &ITy, b: &ITy) -> Result<(), OracleError> {
        let (a, b) = (self.prune(a), self.prune(b));
        match (&a, &b) {
            (ITy::Var(v), _) => {
                if matches!(b, ITy::Var(w) if w == *v) {
                    return Ok(());
                }
                if self.occurs(*v, &b) {
                    return Err(OracleError::TypeError("infinite type".into()));
                }
                self.subst[*v as usize] = Some(b);
                Ok(())
            }
            (_, ITy::Var(_)) => self.unify(&b, &a),
            (ITy::Bool, ITy::Bool) => Ok(()),
            (ITy::Fun(a1, b1), ITy::Fun(a2, b2)) | (ITy::Prod(a1, b1), ITy::Prod(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ => Err(OracleError::TypeError(format!(
                "type mismatch: {a:?} vs {b:?}"
            ))),
        }
    }

    fn infer(&mut self, env: &mut Vec<(String, ITy)>, t: &BTerm) -> Result<ITy, OracleError> {
        Ok(match t {
            BTerm::Var(x) => env
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| OracleError::TypeError(format!("unbound variable `{x}`")))?,
            BTerm::Wire(_) => ITy::Bool,
            BTerm::Bool(_) => ITy::Bool,
            BTerm::Not => ITy::Fun(Rc::new(ITy::Bool), Rc::new(ITy::Bool)),
            BTerm::And => ITy::Fun(
                Rc::new(ITy::Bool),
                Rc::new(ITy::Fun(Rc::new(ITy::Bool), Rc::new(ITy::Bool))),
            ),
            BTerm::Lam(x, body) => {
                let dom = self.fresh();
                env.push((x.clone(), dom.clone()));
                let cod = self.infer(env, body)?;
                env.pop();
                ITy::Fun(Rc::new(dom), Rc::new(cod))
            }
            BTerm::App(f, a) => {
                let ft = self.infer(env, f)?;
                let at = self.infer(env, a)?;
                let out = self.fresh();
                self.unify(&ft, &ITy::Fun(Rc::new(at), Rc::new(out.clone())))?;
                out
            }
            BTerm::Pair(a, b) => ITy::Prod(
                Rc::new(self.infer(env, a)?),
                Rc::new(self.infer(env, b)?),
            ),
            BTerm::LetPair(x, y, s, body) => {
                let st = self.infer(env, s)?;
                let tx = self.fresh();
                let ty = self.fresh();
                self.unify(
                    &st,
                    &ITy::Prod(Rc::new(tx.clone()), Rc::new(ty.clone())),
                )?;
                env.push((x.clone(), tx));
                env.push((y.clone(), ty));
                let out = self.infer(env, body)?;
                env.pop();
                env.pop();
                out
            }
            BTerm::If(c, t1, t2) => {
                let ct = self.infer(env, c)?;
                self.unify(&ct, &ITy::Bool)?;
                let a = self.infer(env, t1)?;
                let b = self.infer(env, t2)?;
                self.unify(&a, &b)?;
                a
            }
            BTerm::LetRec(f, x, m, n) => {
                let dom = self.fresh();
                let cod = self.fresh();
                let fty = ITy::Fun(Rc::new(dom.clone()), Rc::new(cod.clone()));
                env.push((f.clone(), fty));
                env.push((x.clone(), dom));
                let mt = self.infer(env, m)?;
                env.pop();
                self.unify(&mt, &cod)?;
                let out = self.infer(env, n)?;
                env.pop();
                out
            }
        })
    }

    fn resolve(&self, t: &ITy) -> Result<BType, OracleError> {
        match self.prune(t) {
            // free type variables default to bool; the corpus is Boolean
            ITy::Var(_) | ITy::Bool => Ok(BType::Bool),
            ITy::Fun(a, b) => Ok(BType::Fun(
                Box::new(self.resolve(&a)?),
                Box::new(self.resolve(&b)?),
            )),
            ITy::Prod(a, b) => Ok(BType::Prod(
                Box::new(self.resolve(&a)?),
                Box::new(self.resolve(&b)?),
            )),
        }
    }
}

/// Infer the type of the term applied to `n_inputs` Boolean arguments.
pub fn infer_applied_type(term: &BTerm, n_inputs: usize) -> Result<BType, OracleError> {
    let mut inf = Infer { subst: Vec::new() };
    let mut env = Vec::new();
    let mut ty = inf.infer(&mut env, term)?;
    for _ in 0..n_inputs {
        let out = inf.fresh();
        inf.unify(&ty, &ITy::Fun(Rc::new(ITy::Bool), Rc::new(out.clone())))?;
        ty = out;
    }
    inf.resolve(&ty)
}
