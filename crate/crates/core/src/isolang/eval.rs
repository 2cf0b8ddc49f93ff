//! Iso evaluation: classical application, the linear extension to value
//! superpositions, and structural inversion.

use num_complex::Complex64;

use super::ast::{AmpValue, Clause, Expr, Iso, IsoRef, Pattern};
use super::check::IsoEnv;
use super::IsoError;
use crate::qnum::Amplitude;

/// Apply a checked classical iso to a closed value.
pub fn apply(iso: &Iso, value: &Pattern, env: &IsoEnv, fuel: &mut usize) -> Result<Pattern, IsoError> {
    let av = apply_quantum(iso, &AmpValue::basis(value.clone()), env, fuel)?;
    match av.terms.as_slice() {
        [(amp, v)] if (amp - Complex64::new(1.0, 0.0)).norm() < 1e-9 => Ok(v.clone()),
        _ => Err(IsoError::Eval(format!(
            "classical application produced a superposition: {av}"
        ))),
    }
}

/// Linear extension of application to amplitude-weighted values.
pub fn apply_quantum(
    iso: &Iso,
    av: &AmpValue,
    env: &IsoEnv,
    fuel: &mut usize,
) -> Result<AmpValue, IsoError> {
    let mut out = Vec::new();
    for (amp, value) in &av.terms {
        let image = apply_basis(iso, value, env, fuel)?;
        for (a2, v2) in image.terms {
            out.push((amp * a2, v2));
        }
    }
    Ok(AmpValue::normalize(out))
}

fn apply_basis(
    iso: &Iso,
    value: &Pattern,
    env: &IsoEnv,
    fuel: &mut usize,
) -> Result<AmpValue, IsoError> {
    if *fuel == 0 {
        return Err(IsoError::Fuel);
    }
    *fuel -= 1;
    let (clause, bindings) = match_clause(&iso.clauses, value)?;
    let mut out: Vec<(Amplitude, Pattern)> = Vec::new();
    for (amp, expr) in &clause.rhs {
        let image = eval_expr(expr, &bindings, iso, env, fuel)?;
        for (a2, v2) in image.terms {
            out.push((amp * a2, v2));
        }
    }
    Ok(AmpValue::normalize(out))
}

fn match_clause<'a>(
    clauses: &'a [Clause],
    value: &Pattern,
) -> Result<(&'a Clause, std::collections::BTreeMap<String, Pattern>), IsoError> {
    for clause in clauses {
        if let Some(bindings) = clause.lhs.match_value(value) {
            return Ok((clause, bindings));
        }
    }
    Err(IsoError::Eval(format!(
        "no clause matches `{value}` (checked isos are exhaustive; is the value well-typed?)"
    )))
}

/// Evaluate an rhs expression to a superposition of values.
fn eval_expr(
    expr: &Expr,
    bindings: &std::collections::BTreeMap<String, Pattern>,
    iso: &Iso,
    env: &IsoEnv,
    fuel: &mut usize,
) -> Result<AmpValue, IsoError> {
    Ok(match expr {
        Expr::Unit => AmpValue::basis(Pattern::Unit),
        Expr::Var(x) => {
            let v = bindings
                .get(x)
                .ok_or_else(|| IsoError::Eval(format!("unbound variable `{x}`")))?;
            AmpValue::basis(v.clone())
        }
        Expr::Pair(a, b) => {
            let left = eval_expr(a, bindings, iso, env, fuel)?;
            let right = eval_expr(b, bindings, iso, env, fuel)?;
            let mut out = Vec::new();
            for (la, lv) in &left.terms {
                for (ra, rv) in &right.terms {
                    out.push((la * ra, Pattern::pair(lv.clone(), rv.clone())));
                }
            }
            AmpValue::normalize(out)
        }
        Expr::InL(e) => map_values(eval_expr(e, bindings, iso, env, fuel)?, Pattern::inl),
        Expr::InR(e) => map_values(eval_expr(e, bindings, iso, env, fuel)?, Pattern::inr),
        Expr::Fold(e) => map_values(eval_expr(e, bindings, iso, env, fuel)?, Pattern::fold),
        Expr::App(r, e) => {
            let arg = eval_expr(e, bindings, iso, env, fuel)?;
            let target: &Iso = match r {
                IsoRef::SelfRec => iso,
                IsoRef::Named(name) => env
                    .get(name)
                    .ok_or_else(|| IsoError::Eval(format!("unknown iso `{name}`")))?,
                IsoRef::Param(p) => {
                    return Err(IsoError::Eval(format!(
                        "uninstantiated iso parameter `{p}`"
                    )))
                }
            };
            apply_quantum(target, &arg, env, fuel)?
        }
    })
}

fn map_values(av: AmpValue, f: impl Fn(Pattern) -> Pattern) -> AmpValue {
    AmpValue {
        terms: av.terms.into_iter().map(|(a, v)| (a, f(v))).collect(),
    }
}

/// Structurally invert a classical iso: clause sides swap; iso applications
/// on the right must form chains over a single variable and invert to
/// chains of the inverted isos in reverse order.
pub fn invert(iso: &Iso, env: &IsoEnv) -> Result<Iso, IsoError> {
    if !iso.is_classical() {
        return Err(IsoError::QuantumInvert);
    }
    let mut clauses = Vec::new();
    for clause in &iso.clauses {
        let (new_lhs, rebuilt_rhs) = invert_expr_side(&clause.rhs[0].1, &clause.lhs)?;
        clauses.push(Clause {
            lhs: new_lhs,
            rhs: vec![(Complex64::new(1.0, 0.0), rebuilt_rhs)],
        });
    }
    let mut out = Iso {
        name: iso.name.as_ref().map(|n| format!("{n}_inv")),
        params: Vec::new(),
        fix: iso.fix.clone(),
        lhs_ty: iso.rhs_ty.clone(),
        rhs_ty: iso.lhs_ty.clone(),
        clauses,
    };
    // inverting the body of a fixpoint leaves the recursive calls pointing
    // at the inverted iso itself, which is exactly the fixpoint semantics
    let _ = env;
    out.name = iso.name.as_ref().map(|n| format!("{n}_inv"));
    Ok(out)
}

/// Turn an rhs expression into a matchable pattern, rewriting application
/// chains `g (f x)` into fresh variables and producing the corresponding
/// inverted chain on the other side.
fn invert_expr_side(rhs: &Expr, lhs: &Pattern) -> Result<(Pattern, Expr), IsoError> {
    // replacements: original variable -> expression over the new variable
    let mut subst: Vec<(String, Expr)> = Vec::new();
    let mut counter = 0usize;
    let new_lhs = strip_apps(rhs, &mut subst, &mut counter)?;
    let rebuilt = substitute_expr(&Expr::from_pattern(lhs), &subst);
    Ok((new_lhs, rebuilt))
}

fn strip_apps(
    e: &Expr,
    subst: &mut Vec<(String, Expr)>,
    counter: &mut usize,
) -> Result<Pattern, IsoError> {
    Ok(match e {
        Expr::Unit => Pattern::Unit,
        Expr::Var(x) => Pattern::Var(x.clone()),
        Expr::Pair(a, b) => Pattern::pair(
            strip_apps(a, subst, counter)?,
            strip_apps(b, subst, counter)?,
        ),
        Expr::InL(x) => Pattern::inl(strip_apps(x, subst, counter)?),
        Expr::InR(x) => Pattern::inr(strip_apps(x, subst, counter)?),
        Expr::Fold(x) => Pattern::fold(strip_apps(x, subst, counter)?),
        Expr::App(_, _) => {
            // peel the application chain down to a single variable
            let mut chain: Vec<IsoRef> = Vec::new();
            let mut cur = e;
            loop {
                match cur {
                    Expr::App(r, inner) => {
                        chain.push(r.clone());
                        cur = inner;
                    }
                    Expr::Var(x) => {
                        *counter += 1;
                        let fresh = format!("w{counter}");
                        // invert the chain: innermost-first application of
                        // the inverted isos, in reversed order
                        let mut rebuilt = Expr::Var(fresh.clone());
                        for r in chain {
                            let inv_ref = match r {
                                IsoRef::SelfRec => IsoRef::SelfRec,
                                IsoRef::Named(n) => IsoRef::Named(format!("{n}_inv")),
                                IsoRef::Param(p) => IsoRef::Param(p),
                            };
                            rebuilt = Expr::App(inv_ref, Box::new(rebuilt));
                        }
                        subst.push((x.clone(), rebuilt));
                        return Ok(Pattern::Var(fresh));
                    }
                    other => {
                        return Err(IsoError::Eval(format!(
                            "cannot invert an application of `{other}`; only chains over a variable are supported"
                        )))
                    }
                }
            }
        }
    })
}

fn substitute_expr(e: &Expr, subst: &[(String, Expr)]) -> Expr {
    match e {
        Expr::Var(x) => subst
            .iter()
            .find(|(name, _)| name == x)
            .map(|(_, rep)| rep.clone())
            .unwrap_or_else(|| e.clone()),
        Expr::Unit => Expr::Unit,
        Expr::Pair(a, b) => Expr::Pair(
            Box::new(substitute_expr(a, subst)),
            Box::new(substitute_expr(b, subst)),
        ),
        Expr::InL(x) => Expr::InL(Box::new(substitute_expr(x, subst))),
        Expr::InR(x) => Expr::InR(Box::new(substitute_expr(x, subst))),
        Expr::Fold(x) => Expr::Fold(Box::new(substitute_expr(x, subst))),
        Expr::App(r, x) => Expr::App(r.clone(), Box::new(substitute_expr(x, subst))),
    }
}
