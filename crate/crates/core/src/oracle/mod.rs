//! Compile classical Boolean functional programs to reversible circuits via
//! the Landauer embedding and Bennett uncomputation, with brute-force
//! coincidence verification against the standard evaluation semantics.

mod ast;
mod eval;
mod parser;
mod synth;
mod verify;

pub use ast::{BTerm, BType};
pub use eval::{apply_classical, eval_bool, infer_applied_type};
pub use parser::parse_bool;
pub use synth::{bennett_wrap, synth_landauer, Landauer, OracleCircuit};
pub use verify::{is_permutation, simulate_classical, verify_oracle, VerifyResult};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("type error: {0}")]
    TypeError(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("synthesis error: {0}")]
    Synth(String),
    #[error("verification error: {0}")]
    Verify(String),
    #[error("fuel exhausted (recursion is not compile-time unrollable?)")]
    Fuel,
    #[error("oracle result type must be built from bool and pairs")]
    HigherOrderResult,
}

/// Full pipeline: parse nothing, just synthesize and wrap.
pub fn synthesize_oracle(term: &BTerm, n_inputs: usize) -> Result<OracleCircuit, OracleError> {
    let landauer = synth_landauer(term, n_inputs)?;
    bennett_wrap(&landauer)
}
