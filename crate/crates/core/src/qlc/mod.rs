//! The quantum lambda calculus: parser, linear type checker and the
//! probabilistic QRAM abstract machine, plus `box`/`unbox` circuit
//! buffering.

mod ast;
mod check;
pub mod gen;
mod machine;
mod parser;

pub use ast::{QType, Span, TNode, TTerm, Term, TermNode};
pub use check::{recheck_machine_term, typecheck, typecheck_in, Checked};
pub use machine::{eval, step, EvalOutcome, MachineLimits, Program, StepInfo, TraceEntry};
pub use parser::parse;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QlcError {
    #[error("parse error at {span}: {msg}")]
    Parse { span: Span, msg: String },
    #[error("type error at {span}: {msg}")]
    Type { span: Span, msg: String },
    #[error("machine error: {0}")]
    Machine(String),
    #[error("stuck non-value program (progress violated): {0}")]
    Stuck(String),
    #[error("fuel exhausted after {steps} steps; residual term: {residual}")]
    FuelExhausted { steps: usize, residual: String },
    #[error("dynamic lifting unsupported: measurement inside box")]
    DynamicLifting,
    #[error(transparent)]
    Qnum(#[from] crate::qnum::QnumError),
}

/// Parse and typecheck a source string, returning the checked program term
/// and its type.
pub fn load(src: &str) -> Result<Checked, QlcError> {
    let term = parse(src)?;
    typecheck(&term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    const D7: &str = "fun x -> let () = x in H (qinit ff)";

    #[test]
    fn example_d7_is_duplicable() {
        let checked = load(D7).unwrap();
        assert_eq!(checked.ty.to_string(), "!(1 ⊸ qbit)");
    }

    #[test]
    fn cnot_reuse_rejected() {
        // (CNOT x) x applies a tensor to an argument
        assert!(load("fun x -> (CNOT x) x").is_err());
        // CNOT (x, x) duplicates the qubit pointer
        let err = load("fun x -> CNOT (x, x)").unwrap_err();
        assert!(matches!(err, QlcError::Type { .. }), "{err}");
    }

    #[test]
    fn no_closed_term_of_type_bang_qbit() {
        // promotions of qubit-producing terms are rejected wherever demanded
        for src in [
            "(fun f -> (f, f)) (qinit tt)",
            "(fun f -> (f (), f ())) ((fun y -> fun u -> y) (qinit tt))",
        ] {
            assert!(load(src).is_err(), "{src}");
        }
        // even accepted programs never report !qbit
        for src in ["qinit tt", "H (qinit ff)", D7] {
            if let Ok(c) = load(src) {
                assert_ne!(c.ty.to_string(), "!qbit");
            }
        }
    }

    #[test]
    fn duplicable_closed_function_argument_accepted() {
        let src = format!("(fun f -> (f (), f ())) ({D7})");
        let checked = load(&src).unwrap();
        assert_eq!(checked.ty.to_string(), "qbit ⊗ qbit");
    }

    #[test]
    fn coin_evaluates_to_bool() {
        let checked = load("meas (H (qinit ff))").unwrap();
        assert_eq!(checked.ty, QType::Bit);
        let mut rng = seeded_rng(1);
        let out = eval(
            Program::new(checked.term),
            &mut rng,
            1000,
            MachineLimits::default(),
        )
        .unwrap();
        assert!(matches!(out.program.term.node(), TNode::Bool(_)));
        assert_eq!(out.program.state.n_qubits(), 0);
        // trace: qinit, gate, meas
        let rules: Vec<_> = out.trace.iter().map(|t| t.rule).collect();
        assert_eq!(rules, vec!["qinit", "gate", "meas"]);
        assert!((out.trace[2].probability - 0.5).abs() < 1e-12);
    }

    #[test]
    fn coin_statistics() {
        let checked = load("meas (H (qinit ff))").unwrap();
        let mut rng = seeded_rng(7);
        let shots = 10_000;
        let mut heads = 0usize;
        for _ in 0..shots {
            let out = eval(
                Program::new(checked.term.clone()),
                &mut rng,
                1000,
                MachineLimits::default(),
            )
            .unwrap();
            if matches!(out.program.term.node(), TNode::Bool(true)) {
                heads += 1;
            }
        }
        let freq = heads as f64 / shots as f64;
        assert!((freq - 0.5).abs() <= 0.015, "freq = {freq}");
    }

    #[test]
    fn qinit_rule_extends_register() {
        let checked = load("qinit tt").unwrap();
        let mut rng = seeded_rng(0);
        let (next, info) = step(&Program::new(checked.term), &mut rng, MachineLimits::default())
            .unwrap();
        assert_eq!(info.rule, "qinit");
        assert_eq!(info.probability, 1.0);
        assert_eq!(next.state.n_qubits(), 1);
        assert_eq!(next.link.len(), 1);
        assert!(matches!(next.term.node(), TNode::Var(_)));
        assert!(
            next.state
                .distance(&crate::qnum::StateVector::basis(&[true]))
                < 1e-12
        );
    }

    #[test]
    fn if_true_steps_classically() {
        let checked = load("if tt then ff else tt").unwrap();
        let mut rng = seeded_rng(0);
        let (next, info) = step(&Program::new(checked.term), &mut rng, MachineLimits::default())
            .unwrap();
        assert_eq!(info.rule, "if-true");
        assert!(matches!(next.term.node(), TNode::Bool(false)));
    }

    #[test]
    fn letrec_example_terminates() {
        let checked = load("letrec f x = if x then ff else f tt in f tt").unwrap();
        let mut rng = seeded_rng(0);
        let out = eval(
            Program::new(checked.term),
            &mut rng,
            100,
            MachineLimits::default(),
        )
        .unwrap();
        assert!(matches!(out.program.term.node(), TNode::Bool(false)));
    }

    #[test]
    fn eval_of_value_is_empty_trace() {
        let checked = load(D7).unwrap();
        let mut rng = seeded_rng(0);
        let out = eval(
            Program::new(checked.term),
            &mut rng,
            10,
            MachineLimits::default(),
        )
        .unwrap();
        assert!(out.trace.is_empty());
        assert_eq!(out.probability, 1.0);
    }

    #[test]
    fn divergence_reports_fuel_exhaustion() {
        let checked = load("if (letrec f x = f x in f tt) then tt else ff").unwrap();
        let mut rng = seeded_rng(0);
        let err = eval(
            Program::new(checked.term),
            &mut rng,
            50,
            MachineLimits::default(),
        )
        .unwrap_err();
        assert!(matches!(err, QlcError::FuelExhausted { steps: 50, .. }));
    }

    #[test]
    fn identical_seeds_give_identical_traces() {
        let checked = load("(meas (H (qinit ff)), meas (H (qinit tt)))").unwrap();
        let render = |seed: u64| {
            let mut rng = seeded_rng(seed);
            let out = eval(
                Program::new(checked.term.clone()),
                &mut rng,
                100,
                MachineLimits::default(),
            )
            .unwrap();
            format!(
                "{} | {:?}",
                out.program.term,
                out.trace
                    .iter()
                    .map(|t| format!("{}:{:.6}:{}", t.rule, t.probability, t.term_size))
                    .collect::<Vec<_>>()
            )
        };
        assert_eq!(render(42), render(42));
    }

    #[test]
    fn negative_corpus_rejected() {
        let negatives: &[&str] = &[
            // linear reuse
            "fun x -> CNOT (x, x)",
            "fun x -> (x, x)",
            "fun x -> (meas x, meas x)",
            "fun x -> SWAP (x, x)",
            "(fun x -> (x, x)) (qinit tt)",
            "fun x -> let (a, b) = x in (a, a)",
            // discarding linear data
            "fun x -> (fun y -> tt) (meas x)",
            "fun x -> let (a, b) = x in a",
            "fun x -> let () = meas x in tt",
            // branch usage mismatch / reuse across branches
            "fun x -> if x then x else ff",
            "fun x -> fun y -> if meas x then y else qinit ff",
            // promotion failures: argument not a value or capturing a qubit
            "(fun f -> (f (), f ())) ((fun y -> fun u -> y) (qinit tt))",
            "fun z -> (fun f -> (f (), f ())) (fun u -> let () = u in z)",
            // plain type errors
            "qinit (qinit ff)",
            "meas tt",
            "H tt",
            "if tt then qinit tt else ff",
            "unbox tt",
            "qinit tt tt",
            "let (a, b) = tt in (a, b)",
        ];
        for src in negatives {
            assert!(load(src).is_err(), "should reject: {src}");
        }
    }

    #[test]
    fn positive_corpus_accepted() {
        let positives: &[&str] = &[
            D7,
            "meas (H (qinit ff))",
            "fun x -> H x",
            "fun w -> let (x, y) = w in CNOT (x, H y)",
            "(fun x -> x) (qinit tt)",
            "letrec f x = if x then ff else f tt in f tt",
            "if meas (qinit tt) then qinit ff else qinit tt",
            "(fun x -> let (a, b) = x in (b, a)) (CNOT (qinit tt, qinit ff))",
            "(fun f -> (f (), f ())) (fun u -> let () = u in qinit ff)",
        ];
        for src in positives {
            load(src).unwrap_or_else(|e| panic!("should accept `{src}`: {e}"));
        }
    }

    #[test]
    fn ambiguous_terms_are_errors() {
        assert!(matches!(
            load("fun x -> x"),
            Err(QlcError::Type { .. })
        ));
    }
}
