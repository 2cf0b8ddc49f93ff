//! The reversible pattern-matching iso language: inductive types,
//! structural fixpoints, and the complex-amplitude extension compiling
//! closed finite-type isos to unitary matrices.

mod ast;
mod check;
mod eval;
mod matrix;
mod parser;

pub use ast::{AmpValue, Clause, Expr, Iso, IsoRef, IsoType, Pattern};
pub use check::{check_iso, enumerate_values, structural_guard, IsoEnv, DEFAULT_DEPTH};
pub use eval::{apply, apply_quantum, invert};
pub use matrix::{enumerate_basis, to_matrix, truncated_dim, MAX_DIM};
pub use parser::{parse_file, parse_value, IsoDecl};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsoError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("check error: {0}")]
    Check(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("fuel exhausted (non-terminating fixpoint?)")]
    Fuel,
    #[error("quantum isos invert at the matrix level only (conjugate transpose); structural swap refused")]
    QuantumInvert,
    #[error("matrix interpretation is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("enumeration budget exceeded (dimension {dim})")]
    Budget { dim: usize },
}

/// Load a file: parse, instantiate, and check every definition in order.
/// Returns the environment and the definition order.
pub fn load_file(src: &str) -> Result<(IsoEnv, Vec<String>), IsoError> {
    let defs = parse_file(src)?;
    let mut env = IsoEnv::new();
    let mut order = Vec::new();
    for (name, decl) in defs {
        let iso = match decl {
            IsoDecl::Def(iso) => iso,
            IsoDecl::Instantiate {
                base,
                args,
                lhs_ty,
                rhs_ty,
            } => {
                let mut base_iso = env
                    .get(&base)
                    .ok_or_else(|| IsoError::Check(format!("unknown iso `{base}`")))?
                    .clone();
                if base_iso.params.len() != args.len() {
                    return Err(IsoError::Check(format!(
                        "`{base}` takes {} iso argument(s), got {}",
                        base_iso.params.len(),
                        args.len()
                    )));
                }
                for arg in &args {
                    if !env.contains_key(arg) {
                        return Err(IsoError::Check(format!("unknown iso `{arg}`")));
                    }
                    base_iso = base_iso.instantiate(arg);
                }
                Iso {
                    name: Some(name.clone()),
                    lhs_ty,
                    rhs_ty,
                    ..base_iso
                }
            }
        };
        // generic isos (with parameters or abstract types) are checked per
        // instantiation; concrete ones right away
        if iso.params.is_empty() {
            check_iso(&iso, &env)?;
        }
        env.insert(name.clone(), iso);
        order.push(name);
    }
    Ok((env, order))
}

/// Invert an iso together with every named iso its clauses invoke,
/// registering the inverses as `<name>_inv` in a copy of the environment.
pub fn invert_closure(iso: &Iso, env: &IsoEnv) -> Result<(Iso, IsoEnv), IsoError> {
    let mut extended = env.clone();
    let mut stack: Vec<String> = Vec::new();
    collect_named(iso, &mut stack);
    while let Some(name) = stack.pop() {
        let inv_name = format!("{name}_inv");
        if extended.contains_key(&inv_name) {
            continue;
        }
        let target = extended
            .get(&name)
            .ok_or_else(|| IsoError::Eval(format!("unknown iso `{name}`")))?
            .clone();
        let inverted = invert(&target, &extended)?;
        collect_named(&target, &mut stack);
        extended.insert(inv_name, inverted);
    }
    let inverted = invert(iso, &extended)?;
    Ok((inverted, extended))
}

fn collect_named(iso: &Iso, out: &mut Vec<String>) {
    fn walk(e: &Expr, out: &mut Vec<String>) {
        match e {
            Expr::App(IsoRef::Named(n), inner) => {
                out.push(n.clone());
                walk(inner, out);
            }
            Expr::App(_, inner) => walk(inner, out),
            Expr::Pair(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Expr::InL(x) | Expr::InR(x) | Expr::Fold(x) => walk(x, out),
            _ => {}
        }
    }
    for clause in &iso.clauses {
        for (_, expr) in &clause.rhs {
            walk(expr, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::{gate_matrix, GateName, UMatrix};
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    const OMEGA: &str = "
iso omega : a * (b + c) <-> (a * b) + (a * c) {
  | (x, inl y) <-> inl (x, y)
  | (x, inr y) <-> inr (x, y)
}
";

    const HAD: &str = "
iso had : bool <-> bool {
  | ff <-> sqrt(2)/2 * ff + sqrt(2)/2 * tt
  | tt <-> sqrt(2)/2 * ff - sqrt(2)/2 * tt
}
";

    const NOTB: &str = "
iso notb : bool <-> bool {
  | ff <-> tt
  | tt <-> ff
}
";

    const MAP: &str = "
iso map (g : a <-> b) : [a] <-> [b] = fix f {
  | nil <-> nil
  | cons (h, t) <-> cons (g h, f t)
}
";

    fn load(src: &str) -> (IsoEnv, Vec<String>) {
        load_file(src).unwrap_or_else(|e| panic!("load failed: {e}"))
    }

    #[test]
    fn omega_accepted_and_bijective() {
        let (env, _) = load(OMEGA);
        let omega = &env["omega"];
        // instantiate types for a concrete exhaustive test: a=b=c=1
        let concrete = Iso {
            lhs_ty: IsoType::tensor(IsoType::One, IsoType::bool_type()),
            rhs_ty: IsoType::sum(
                IsoType::tensor(IsoType::One, IsoType::One),
                IsoType::tensor(IsoType::One, IsoType::One),
            ),
            ..omega.clone()
        };
        check_iso(&concrete, &env).unwrap();
        // apply to <*, inr *> gives inr <*, *>
        let v = Pattern::pair(Pattern::Unit, Pattern::inr(Pattern::Unit));
        let mut fuel = 1000;
        let out = apply(&concrete, &v, &env, &mut fuel).unwrap();
        assert_eq!(out, Pattern::inr(Pattern::pair(Pattern::Unit, Pattern::Unit)));
        // exhaustive roundtrip through the inverse
        let (inv, inv_env) = invert_closure(&concrete, &env).unwrap();
        for value in enumerate_values(&concrete.lhs_ty, 4).unwrap() {
            let mut fuel = 1000;
            let image = apply(&concrete, &value, &env, &mut fuel).unwrap();
            let mut fuel = 1000;
            let back = apply(&inv, &image, &inv_env, &mut fuel).unwrap();
            assert_eq!(back, value);
        }
    }

    #[test]
    fn non_exhaustive_lhs_rejected() {
        let src = "
iso partial : bool <-> bool {
  | ff <-> tt
}
";
        let err = load_file(src).unwrap_err();
        match err {
            IsoError::Check(msg) => assert!(msg.contains("exhaustive"), "{msg}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn overlapping_lhs_rejected() {
        let src = "
iso dup : bool <-> bool {
  | x <-> x
  | tt <-> ff
}
";
        let err = load_file(src).unwrap_err();
        match err {
            IsoError::Check(msg) => assert!(msg.contains("overlap"), "{msg}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn nonlinear_rhs_rejected() {
        let src = "
iso dupvar : bool <-> bool * bool {
  | x <-> (x, x)
}
";
        assert!(load_file(src).is_err());
    }

    #[test]
    fn had_matrix_is_hadamard() {
        let (env, _) = load(HAD);
        let m = to_matrix(&env["had"], &env, 4).unwrap();
        let h = gate_matrix(GateName::H, &[]).unwrap();
        assert!(m.distance(&h) < 1e-12);
    }

    #[test]
    fn had_on_false_gives_plus() {
        let (env, _) = load(HAD);
        let mut fuel = 100;
        let out = apply_quantum(
            &env["had"],
            &AmpValue::basis(Pattern::bool_value(false)),
            &env,
            &mut fuel,
        )
        .unwrap();
        assert_eq!(out.terms.len(), 2);
        for (amp, _) in &out.terms {
            assert!((amp.re - FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn had_interference_cancels() {
        let (env, _) = load(HAD);
        let plus = AmpValue::normalize(vec![
            (Complex64::new(FRAC_1_SQRT_2, 0.0), Pattern::bool_value(false)),
            (Complex64::new(FRAC_1_SQRT_2, 0.0), Pattern::bool_value(true)),
        ]);
        let mut fuel = 100;
        let out = apply_quantum(&env["had"], &plus, &env, &mut fuel).unwrap();
        assert_eq!(out.terms.len(), 1);
        assert_eq!(out.terms[0].1, Pattern::bool_value(false));
        assert!((out.terms[0].0.re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identity_iso_preserves_superpositions() {
        let (env, _) = load(NOTB);
        let id = Iso {
            name: Some("idb".into()),
            params: vec![],
            fix: None,
            lhs_ty: IsoType::bool_type(),
            rhs_ty: IsoType::bool_type(),
            clauses: vec![Clause {
                lhs: Pattern::Var("x".into()),
                rhs: vec![(Complex64::new(1.0, 0.0), Expr::Var("x".into()))],
            }],
        };
        check_iso(&id, &env).unwrap();
        let av = AmpValue::normalize(vec![
            (Complex64::new(0.6, 0.0), Pattern::bool_value(false)),
            (Complex64::new(0.8, 0.0), Pattern::bool_value(true)),
        ]);
        let mut fuel = 100;
        let out = apply_quantum(&id, &av, &env, &mut fuel).unwrap();
        assert_eq!(out, av);
    }

    #[test]
    fn map_not_over_lists() {
        let src = format!("{NOTB}\n{MAP}\niso mapnot : [bool] <-> [bool] = map notb");
        let (env, _) = load(&src);
        let input = Pattern::list(vec![Pattern::bool_value(true), Pattern::bool_value(false)]);
        let mut fuel = 10_000;
        let out = apply(&env["mapnot"], &input, &env, &mut fuel).unwrap();
        let expected =
            Pattern::list(vec![Pattern::bool_value(false), Pattern::bool_value(true)]);
        assert_eq!(out, expected);
        // nil maps to nil
        let mut fuel = 100;
        assert_eq!(
            apply(&env["mapnot"], &Pattern::nil(), &env, &mut fuel).unwrap(),
            Pattern::nil()
        );
    }

    #[test]
    fn map_functoriality_small_lists() {
        let src = format!(
            "{NOTB}\n{MAP}\niso mapnot : [bool] <-> [bool] = map notb\niso mapnot2 : [bool] <-> [bool] = map notb"
        );
        let (env, _) = load(&src);
        for len in 0..=5usize {
            for bits in 0..1usize << len {
                let items: Vec<Pattern> = (0..len)
                    .map(|i| Pattern::bool_value((bits >> i) & 1 == 1))
                    .collect();
                let value = Pattern::list(items.clone());
                // direct recursive oracle
                let expected =
                    Pattern::list(items.iter().map(|b| {
                        if *b == Pattern::bool_value(true) {
                            Pattern::bool_value(false)
                        } else {
                            Pattern::bool_value(true)
                        }
                    }).collect());
                let mut fuel = 10_000;
                let got = apply(&env["mapnot"], &value, &env, &mut fuel).unwrap();
                assert_eq!(got, expected);
                // map notb then map notb is the identity
                let mut fuel = 10_000;
                let back = apply(&env["mapnot2"], &got, &env, &mut fuel).unwrap();
                assert_eq!(back, value);
            }
        }
    }

    #[test]
    fn inverted_map_is_map_of_inverse() {
        let src = format!("{NOTB}\n{MAP}\niso mapnot : [bool] <-> [bool] = map notb");
        let (env, _) = load(&src);
        let (inv, inv_env) = invert_closure(&env["mapnot"], &env).unwrap();
        let value = Pattern::list(vec![Pattern::bool_value(true), Pattern::bool_value(true)]);
        let mut fuel = 10_000;
        let image = apply(&env["mapnot"], &value, &env, &mut fuel).unwrap();
        let mut fuel = 10_000;
        let back = apply(&inv, &image, &inv_env, &mut fuel).unwrap();
        assert_eq!(back, value);
    }

    #[test]
    fn identity_iso_is_its_own_inverse() {
        let src = "
iso idb : bool <-> bool {
  | x <-> x
}
";
        let (env, _) = load(src);
        let (inv, _) = invert_closure(&env["idb"], &env).unwrap();
        assert_eq!(inv.clauses.len(), 1);
        // the clause swap is the identity clause again (up to the fresh name)
        match (&inv.clauses[0].lhs, &inv.clauses[0].rhs[0].1) {
            (Pattern::Var(l), Expr::Var(r)) => assert_eq!(l, r),
            other => panic!("unexpected inverse clause {other:?}"),
        }
    }

    #[test]
    fn quantum_iso_inversion_refused() {
        let (env, _) = load(HAD);
        assert!(matches!(
            invert(&env["had"], &env),
            Err(IsoError::QuantumInvert)
        ));
    }

    #[test]
    fn non_unitary_quantum_iso_rejected() {
        let src = "
iso bad : bool <-> bool {
  | ff <-> sqrt(2)/2 * ff + sqrt(2)/2 * tt
  | tt <-> sqrt(2)/2 * ff + sqrt(2)/2 * tt
}
";
        assert!(matches!(
            load_file(src),
            Err(IsoError::NotUnitary { .. })
        ));
    }

    #[test]
    fn switch_iso_is_block_diagonal() {
        // switch with u = X-iso, v = Z-iso on bool + bool
        let src = "
iso xiso : bool <-> bool {
  | ff <-> tt
  | tt <-> ff
}
iso ziso : bool <-> bool {
  | ff <-> ff
  | tt <-> -1.0 * tt
}
iso switch : bool + bool <-> bool + bool {
  | inl x <-> inl ziso (xiso x)
  | inr x <-> inr xiso (ziso x)
}
";
        let (env, _) = load(src);
        let m = to_matrix(&env["switch"], &env, 4).unwrap();
        let x = gate_matrix(GateName::X, &[]).unwrap();
        let z = gate_matrix(GateName::Z, &[]).unwrap();
        let zx = z.mul(&x); // v after u on the left branch
        let xz = x.mul(&z);
        let mut expected = UMatrix::zero(4);
        for r in 0..2 {
            for c in 0..2 {
                expected[(r, c)] = zx[(r, c)];
                expected[(2 + r, 2 + c)] = xz[(r, c)];
            }
        }
        assert!(m.distance(&expected) < 1e-12);
    }

    #[test]
    fn structural_guard_flags_non_decreasing() {
        let ok = "
iso idlist : [bool] <-> [bool] = fix f {
  | nil <-> nil
  | cons (h, t) <-> cons (h, f t)
}
";
        let (env, _) = load(ok);
        assert!(structural_guard(&env["idlist"]).is_empty());

        let bad = "
iso spin : bool <-> bool = fix f {
  | x <-> f x
}
";
        // the guard is warning-only; checking may fail on recursion, so
        // parse directly
        let defs = parse_file(bad).unwrap();
        if let IsoDecl::Def(iso) = &defs[0].1 {
            let warnings = structural_guard(iso);
            assert_eq!(warnings.len(), 1);
        } else {
            panic!("expected a definition");
        }

        // recursing on the reassembled pair is not a strict sub-pattern
        let pair_arg = "
iso churn : [bool] <-> [bool] = fix f {
  | nil <-> nil
  | cons (h, t) <-> f (cons (h, t))
}
";
        let defs = parse_file(pair_arg).unwrap();
        if let IsoDecl::Def(iso) = &defs[0].1 {
            assert_eq!(structural_guard(iso).len(), 1);
        } else {
            panic!("expected a definition");
        }
    }

    #[test]
    fn value_parsing_roundtrip() {
        for src in ["()", "tt", "[tt, ff]", "(tt, inl ())", "fold inl ()"] {
            let v = parse_value(src).unwrap();
            let printed = v.to_string();
            let again = parse_value(&printed).unwrap();
            assert_eq!(v, again, "{src} -> {printed}");
        }
        assert!(parse_value("x").is_err()); // open
    }

    #[test]
    fn basis_enumeration_order() {
        let basis = enumerate_basis(&IsoType::bool_type(), 4).unwrap();
        assert_eq!(basis, vec![Pattern::bool_value(false), Pattern::bool_value(true)]);
        let pairs = enumerate_basis(
            &IsoType::tensor(IsoType::bool_type(), IsoType::bool_type()),
            4,
        )
        .unwrap();
        assert_eq!(pairs.len(), 4);
        // lexicographic: (ff,ff), (ff,tt), (tt,ff), (tt,tt)
        assert_eq!(
            pairs[1],
            Pattern::pair(Pattern::bool_value(false), Pattern::bool_value(true))
        );
        let lists = enumerate_basis(&IsoType::list_of(IsoType::bool_type()), 3).unwrap();
        // depth 3: nil, then 1- and 2-element lists
        assert_eq!(lists.len(), 1 + 2 + 4);
        assert_eq!(lists[0], Pattern::nil());
    }

    #[test]
    fn omega_at_unit_types_is_a_basis_bijection() {
        let (env, _) = load(OMEGA);
        let unit = IsoType::One;
        let concrete = Iso {
            lhs_ty: IsoType::tensor(unit.clone(), IsoType::sum(unit.clone(), unit.clone())),
            rhs_ty: IsoType::sum(
                IsoType::tensor(unit.clone(), unit.clone()),
                IsoType::tensor(unit.clone(), unit),
            ),
            ..env["omega"].clone()
        };
        check_iso(&concrete, &env).unwrap();
        let m = to_matrix(&concrete, &env, 4).unwrap();
        // both types have two values; the relabeling preserves their order
        assert_eq!(m.dim(), 2);
        m.assert_close(&UMatrix::identity(2), 1e-15);
    }

    #[test]
    fn every_value_matches_exactly_one_clause() {
        let srcs = format!("{OMEGA}\n{NOTB}\n{HAD}");
        let (env, order) = load(&srcs);
        for name in &order {
            let iso = &env[name];
            let lhs_ty = if name == "omega" {
                IsoType::tensor(IsoType::bool_type(), IsoType::sum(IsoType::One, IsoType::One))
            } else {
                iso.lhs_ty.clone()
            };
            let concrete = Iso {
                lhs_ty: lhs_ty.clone(),
                ..iso.clone()
            };
            for value in enumerate_values(&lhs_ty, 4).unwrap() {
                let matching = concrete
                    .clauses
                    .iter()
                    .filter(|c| c.lhs.match_value(&value).is_some())
                    .count();
                assert_eq!(matching, 1, "{name}: `{value}` matches {matching} clauses");
            }
        }
    }

    #[test]
    fn norm_preserved_by_checked_quantum_isos() {
        let (env, _) = load(HAD);
        let av = AmpValue::normalize(vec![
            (Complex64::new(0.6, 0.0), Pattern::bool_value(false)),
            (Complex64::new(0.0, 0.8), Pattern::bool_value(true)),
        ]);
        let mut fuel = 100;
        let out = apply_quantum(&env["had"], &av, &env, &mut fuel).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-9);
    }
}
