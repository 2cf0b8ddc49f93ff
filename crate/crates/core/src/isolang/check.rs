//! Iso well-formedness: pattern linearity and typing, clause variable
//! balance, non-overlap and exhaustivity on both sides (classical
//! fragment), and the unitarity check for quantum clauses.

use std::collections::BTreeMap;

use super::ast::{Expr, Iso, IsoRef, IsoType, Pattern};
use super::matrix::{enumerate_basis, to_matrix};
use super::IsoError;

/// Environment of previously checked isos.
pub type IsoEnv = BTreeMap<String, Iso>;

/// Default mu-unrolling depth for matrix-level checks.
pub const DEFAULT_DEPTH: usize = 4;

/// Type a pattern against an expected type, accumulating bindings.
fn type_pattern(
    pat: &Pattern,
    ty: &IsoType,
    bindings: &mut Vec<(String, IsoType)>,
) -> Result<(), IsoError> {
    match (pat, ty) {
        (Pattern::Var(x), t) => {
            if bindings.iter().any(|(name, _)| name == x) {
                return Err(IsoError::Check(format!(
                    "variable `{x}` appears twice in a pattern"
                )));
            }
            bindings.push((x.clone(), t.clone()));
            Ok(())
        }
        (Pattern::Unit, IsoType::One) => Ok(()),
        (Pattern::Pair(a, b), IsoType::Tensor(ta, tb)) => {
            type_pattern(a, ta, bindings)?;
            type_pattern(b, tb, bindings)
        }
        (Pattern::InL(p), IsoType::Sum(ta, _)) => type_pattern(p, ta, bindings),
        (Pattern::InR(p), IsoType::Sum(_, tb)) => type_pattern(p, tb, bindings),
        (Pattern::Fold(p), mu @ IsoType::Mu(_, _)) => {
            let unrolled = mu.unroll().expect("mu unrolls");
            type_pattern(p, &unrolled, bindings)
        }
        (p, t) => Err(IsoError::Check(format!(
            "pattern `{p}` does not fit type {t}"
        ))),
    }
}

/// Type an rhs expression against an expected type using lhs bindings.
fn type_expr(
    expr: &Expr,
    ty: &IsoType,
    bindings: &[(String, IsoType)],
    iso: &Iso,
    env: &IsoEnv,
) -> Result<(), IsoError> {
    match (expr, ty) {
        (Expr::Var(x), t) => {
            let bound = bindings
                .iter()
                .find(|(name, _)| name == x)
                .map(|(_, bt)| bt)
                .ok_or_else(|| IsoError::Check(format!("unbound rhs variable `{x}`")))?;
            if bound != t {
                return Err(IsoError::Check(format!(
                    "variable `{x}` has type {bound}, expected {t}"
                )));
            }
            Ok(())
        }
        (Expr::Unit, IsoType::One) => Ok(()),
        (Expr::Pair(a, b), IsoType::Tensor(ta, tb)) => {
            type_expr(a, ta, bindings, iso, env)?;
            type_expr(b, tb, bindings, iso, env)
        }
        (Expr::InL(e), IsoType::Sum(ta, _)) => type_expr(e, ta, bindings, iso, env),
        (Expr::InR(e), IsoType::Sum(_, tb)) => type_expr(e, tb, bindings, iso, env),
        (Expr::Fold(e), mu @ IsoType::Mu(_, _)) => {
            let unrolled = mu.unroll().expect("mu unrolls");
            type_expr(e, &unrolled, bindings, iso, env)
        }
        (Expr::App(r, e), t) => {
            let (dom, cod): (IsoType, IsoType) = match r {
                IsoRef::SelfRec => (iso.lhs_ty.clone(), iso.rhs_ty.clone()),
                IsoRef::Named(name) => {
                    let target = env.get(name).ok_or_else(|| {
                        IsoError::Check(format!("unknown iso `{name}`"))
                    })?;
                    (target.lhs_ty.clone(), target.rhs_ty.clone())
                }
                IsoRef::Param(p) => iso
                    .params
                    .iter()
                    .find(|(name, _, _)| name == p)
                    .map(|(_, a, b)| (a.clone(), b.clone()))
                    .ok_or_else(|| IsoError::Check(format!("unknown iso parameter `{p}`")))?,
            };
            if &cod != t {
                return Err(IsoError::Check(format!(
                    "application produces {cod}, expected {t}"
                )));
            }
            type_expr(e, &dom, bindings, iso, env)
        }
        (e, t) => Err(IsoError::Check(format!(
            "expression `{e}` does not fit type {t}"
        ))),
    }
}

/// A witness value of the given (inhabited) type.
fn any_value(ty: &IsoType, depth: usize) -> Option<Pattern> {
    if depth == 0 {
        return None;
    }
    match ty {
        IsoType::One => Some(Pattern::Unit),
        IsoType::Var(_) => Some(Pattern::Var("_".into())), // schematic witness
        IsoType::Tensor(a, b) => Some(Pattern::pair(
            any_value(a, depth - 1)?,
            any_value(b, depth - 1)?,
        )),
        IsoType::Sum(a, b) => any_value(a, depth - 1)
            .map(Pattern::inl)
            .or_else(|| any_value(b, depth - 1).map(Pattern::inr)),
        IsoType::Mu(_, _) => {
            let unrolled = ty.unroll().expect("mu unrolls");
            any_value(&unrolled, depth - 1).map(Pattern::fold)
        }
    }
}

/// Search for a value of the row of types not matched by any pattern row.
/// Patterns are column vectors of equal length; `None` means covered.
fn find_uncovered(tys: &[IsoType], rows: &[Vec<Pattern>]) -> Option<Vec<Pattern>> {
    if tys.is_empty() {
        // an empty row matches the empty value vector
        return if rows.is_empty() { Some(vec![]) } else { None };
    }
    let head_ty = &tys[0];
    let rest_tys = &tys[1..];
    // rows whose head is a variable constrain nothing
    match head_ty {
        IsoType::Var(_) | IsoType::One => {
            // a single value inhabits (schematically) the head
            let sub_rows: Vec<Vec<Pattern>> = rows
                .iter()
                .filter(|r| matches!(r[0], Pattern::Var(_) | Pattern::Unit))
                .map(|r| r[1..].to_vec())
                .collect();
            let witness_head = match head_ty {
                IsoType::One => Pattern::Unit,
                _ => Pattern::Var("_".into()),
            };
            find_uncovered(rest_tys, &sub_rows).map(|mut w| {
                w.insert(0, witness_head);
                w
            })
        }
        IsoType::Tensor(a, b) => {
            let mut new_tys = vec![(**a).clone(), (**b).clone()];
            new_tys.extend_from_slice(rest_tys);
            let new_rows: Vec<Vec<Pattern>> = rows
                .iter()
                .map(|r| {
                    let mut row = match &r[0] {
                        Pattern::Pair(p, q) => vec![(**p).clone(), (**q).clone()],
                        Pattern::Var(_) => {
                            vec![Pattern::Var("_".into()), Pattern::Var("_".into())]
                        }
                        other => unreachable!("ill-typed pattern {other} at tensor"),
                    };
                    row.extend_from_slice(&r[1..]);
                    row
                })
                .collect();
            find_uncovered(&new_tys, &new_rows).map(|mut w| {
                let q = w.remove(1);
                let p = w.remove(0);
                w.insert(0, Pattern::pair(p, q));
                w
            })
        }
        IsoType::Sum(a, b) => {
            for (side, sub_ty) in [(true, a), (false, b)] {
                let mut new_tys = vec![(**sub_ty).clone()];
                new_tys.extend_from_slice(rest_tys);
                let new_rows: Vec<Vec<Pattern>> = rows
                    .iter()
                    .filter_map(|r| {
                        let head = match (&r[0], side) {
                            (Pattern::InL(p), true) | (Pattern::InR(p), false) => {
                                Some((**p).clone())
                            }
                            (Pattern::Var(_), _) => Some(Pattern::Var("_".into())),
                            _ => None,
                        };
                        head.map(|h| {
                            let mut row = vec![h];
                            row.extend_from_slice(&r[1..]);
                            row
                        })
                    })
                    .collect();
                if let Some(mut w) = find_uncovered(&new_tys, &new_rows) {
                    let inner = w.remove(0);
                    let wrapped = if side {
                        Pattern::inl(inner)
                    } else {
                        Pattern::inr(inner)
                    };
                    w.insert(0, wrapped);
                    return Some(w);
                }
            }
            None
        }
        IsoType::Mu(_, _) => {
            // all-variable columns need no unrolling; otherwise peel folds
            if rows.iter().all(|r| matches!(r[0], Pattern::Var(_))) {
                let sub_rows: Vec<Vec<Pattern>> =
                    rows.iter().map(|r| r[1..].to_vec()).collect();
                return find_uncovered(rest_tys, &sub_rows).map(|mut w| {
                    let witness = any_value(head_ty, 64)
                        .unwrap_or_else(|| Pattern::Var("_".into()));
                    w.insert(0, witness);
                    w
                });
            }
            let unrolled = head_ty.unroll().expect("mu unrolls");
            let mut new_tys = vec![unrolled];
            new_tys.extend_from_slice(rest_tys);
            let new_rows: Vec<Vec<Pattern>> = rows
                .iter()
                .map(|r| {
                    let head = match &r[0] {
                        Pattern::Fold(p) => (**p).clone(),
                        Pattern::Var(_) => Pattern::Var("_".into()),
                        other => unreachable!("ill-typed pattern {other} at mu"),
                    };
                    let mut row = vec![head];
                    row.extend_from_slice(&r[1..]);
                    row
                })
                .collect();
            find_uncovered(&new_tys, &new_rows).map(|mut w| {
                let inner = w.remove(0);
                w.insert(0, Pattern::fold(inner));
                w
            })
        }
    }
}

/// Syntactic overlap: do two linear patterns match a common value?
fn overlaps(p1: &Pattern, p2: &Pattern) -> bool {
    match (p1, p2) {
        (Pattern::Var(_), _) | (_, Pattern::Var(_)) => true,
        (Pattern::Unit, Pattern::Unit) => true,
        (Pattern::Pair(a1, b1), Pattern::Pair(a2, b2)) => overlaps(a1, a2) && overlaps(b1, b2),
        (Pattern::InL(a), Pattern::InL(b))
        | (Pattern::InR(a), Pattern::InR(b))
        | (Pattern::Fold(a), Pattern::Fold(b)) => overlaps(a, b),
        _ => false,
    }
}

fn check_pattern_side(
    label: &str,
    ty: &IsoType,
    patterns: &[Pattern],
) -> Result<(), IsoError> {
    for (i, p) in patterns.iter().enumerate() {
        for q in patterns.iter().skip(i + 1) {
            if overlaps(p, q) {
                return Err(IsoError::Check(format!(
                    "{label} patterns `{p}` and `{q}` overlap"
                )));
            }
        }
    }
    let rows: Vec<Vec<Pattern>> = patterns.iter().map(|p| vec![p.clone()]).collect();
    if let Some(witness) = find_uncovered(&[ty.clone()], &rows) {
        return Err(IsoError::Check(format!(
            "{label} patterns are not exhaustive at {ty}: `{}` is uncovered",
            witness[0]
        )));
    }
    Ok(())
}

/// Check an iso against its declared type.
///
/// For quantum clauses the right-hand pattern checks are replaced by the
/// unitarity of the matrix interpretation at the default truncation depth.
pub fn check_iso(iso: &Iso, env: &IsoEnv) -> Result<(), IsoError> {
    if !iso.params.is_empty() {
        return Err(IsoError::Check(
            "iso parameters must be instantiated before checking".into(),
        ));
    }
    if iso.clauses.is_empty() {
        return Err(IsoError::Check("an iso needs at least one clause".into()));
    }
    for clause in &iso.clauses {
        let mut bindings = Vec::new();
        type_pattern(&clause.lhs, &iso.lhs_ty, &mut bindings)?;
        let mut lhs_vars: Vec<String> = bindings.iter().map(|(v, _)| v.clone()).collect();
        lhs_vars.sort();
        for (_, expr) in &clause.rhs {
            type_expr(expr, &iso.rhs_ty, &bindings, iso, env)?;
            let mut rhs_vars = Vec::new();
            expr.vars(&mut rhs_vars);
            let mut sorted = rhs_vars.clone();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(IsoError::Check(format!(
                    "rhs `{expr}` uses a variable twice"
                )));
            }
            if sorted != lhs_vars {
                return Err(IsoError::Check(format!(
                    "clause `{} <-> {expr}`: left and right variables differ",
                    clause.lhs
                )));
            }
        }
    }
    // left side: non-overlap and exhaustivity always
    let lhs_patterns: Vec<Pattern> = iso.clauses.iter().map(|c| c.lhs.clone()).collect();
    check_pattern_side("left", &iso.lhs_ty, &lhs_patterns)?;

    if iso.is_classical() {
        // right side: same two constraints on the skeletons
        let mut fresh = 0usize;
        let rhs_patterns: Vec<Pattern> = iso
            .clauses
            .iter()
            .map(|c| c.rhs[0].1.skeleton(&mut fresh))
            .collect();
        check_pattern_side("right", &iso.rhs_ty, &rhs_patterns)?;
    } else {
        // quantum validity: matrix unitarity at the truncation depth
        if iso.lhs_ty.contains_var() || iso.rhs_ty.contains_var() {
            return Err(IsoError::Check(
                "quantum isos need closed types for the unitarity check".into(),
            ));
        }
        let m = to_matrix(iso, env, DEFAULT_DEPTH)?;
        let deviation = m.unitarity_deviation();
        if deviation > 1e-9 {
            return Err(IsoError::NotUnitary { deviation });
        }
    }
    Ok(())
}

/// Structural-recursion guard: every recursive call must consume a variable
/// bound strictly under a `fold` of the clause's left pattern.
pub fn structural_guard(iso: &Iso) -> Vec<String> {
    let mut warnings = Vec::new();
    if iso.fix.is_none() {
        return warnings;
    }
    for clause in &iso.clauses {
        // variables bound under at least one fold
        let mut under_fold = Vec::new();
        collect_fold_vars(&clause.lhs, false, &mut under_fold);
        for (_, expr) in &clause.rhs {
            collect_self_args(expr, &mut |arg: &Expr| {
                let ok = matches!(arg, Expr::Var(x) if under_fold.contains(x));
                if !ok {
                    warnings.push(format!(
                        "recursive call on `{arg}` in clause `{}` is not structurally decreasing",
                        clause.lhs
                    ));
                }
            });
        }
    }
    warnings
}

fn collect_fold_vars(p: &Pattern, under: bool, out: &mut Vec<String>) {
    match p {
        Pattern::Var(x) => {
            if under {
                out.push(x.clone());
            }
        }
        Pattern::Unit => {}
        Pattern::Pair(a, b) => {
            collect_fold_vars(a, under, out);
            collect_fold_vars(b, under, out);
        }
        Pattern::InL(q) | Pattern::InR(q) => collect_fold_vars(q, under, out),
        Pattern::Fold(q) => collect_fold_vars(q, true, out),
    }
}

fn collect_self_args(e: &Expr, f: &mut impl FnMut(&Expr)) {
    match e {
        Expr::App(IsoRef::SelfRec, arg) => {
            f(arg);
            collect_self_args(arg, f);
        }
        Expr::App(_, arg) => collect_self_args(arg, f),
        Expr::Pair(a, b) => {
            collect_self_args(a, f);
            collect_self_args(b, f);
        }
        Expr::InL(x) | Expr::InR(x) | Expr::Fold(x) => collect_self_args(x, f),
        _ => {}
    }
}

/// Enumerate all closed values of a type up to the depth bound (used by the
/// exhaustive bijectivity tests and the matrix interpretation).
pub fn enumerate_values(ty: &IsoType, depth: usize) -> Result<Vec<Pattern>, IsoError> {
    enumerate_basis(ty, depth)
}
