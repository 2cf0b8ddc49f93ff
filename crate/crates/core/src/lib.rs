//! Toolchain for a typed quantum circuit-description language.
//!
//! The crate is organized around a small number of subsystems:
//!
//! - [`qnum`] — complex linear algebra substrate: state vectors, gate
//!   matrices, tensor products, controlled gates, projective measurement and
//!   Householder reflections.
//! - [`circuit`] — the circuit intermediate representation with high-level
//!   combinators (`seq`, `par`, `inverse`, `control`), simulation, gate
//!   counting and a JSON interchange format.
//! - [`qlc`] — a quantum lambda calculus: parser, linear type checker and a
//!   probabilistic abstract machine driving a simulated coprocessor, plus
//!   `box`/`unbox` circuit buffering.
//! - [`oracle`] — compilation of classical Boolean programs to reversible
//!   circuits (Landauer embedding + Bennett uncomputation) with brute-force
//!   verification.
//! - [`usynth`] — circuit synthesis from dense unitary matrices: Householder
//!   QR, trapped-ion ansatz fitting via BFGS, and the MS-layer lower bound.
//! - [`pathsum`] — sum-over-paths representation of circuits with
//!   composition, tensoring, matrix semantics and equivalence checking.
//! - [`isolang`] — a reversible pattern-matching iso language with inductive
//!   types and a complex-amplitude extension compiling isos to unitaries.

pub mod circuit;
pub mod isolang;
pub mod oracle;
pub mod pathsum;
pub mod qlc;
pub mod qnum;
pub mod usynth;
pub mod rng;

pub use circuit::{CircOp, Circuit, GateCounts, Polarity, WireKind};
pub use isolang::{AmpValue, Iso, IsoType, Pattern};
pub use pathsum::{BoolPoly, PathSum, PhasePoly};
pub use qlc::{Program, QType, Term};
pub use qnum::{Amplitude, GateName, HouseholderFactor, StateVector, UMatrix};
pub use usynth::IonAnsatz;
pub use rng::seeded_rng;
