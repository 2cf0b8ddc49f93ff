//! Concrete sum-over-paths representation of circuits.
//!
//! An operator is carried as a triple of a phase denominator exponent `m`,
//! an integer phase polynomial `P` over Boolean input and path variables,
//! and Boolean output polynomials, denoting
//!
//! ```text
//! |x>  ->  (1 / sqrt(2^k)) * sum_{y in {0,1}^k} e^{2 i pi P(x,y) / 2^m} |outs(x,y)>
//! ```
//!
//! Phase polynomials are multilinear (x^2 = x is applied eagerly) with
//! coefficients reduced mod `2^m`; output polynomials are XOR-of-AND normal
//! forms. The representation is closed under functional composition and
//! Kronecker product; no path-variable rewriting is performed — equivalence
//! is decided through the matrix interpretation at desk scale.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{CircOp, Circuit, Polarity, WireId};
use crate::qnum::{GateName, UMatrix};

/// Variable identifier local to one path-sum: inputs are `0..n_inputs`,
/// path variables `n_inputs..n_inputs+n_paths`.
pub type Var = u32;

/// A monomial: a product of distinct Boolean variables (empty = constant 1).
pub type Monomial = BTreeSet<Var>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathsumError {
    #[error("unsupported gate for path-sums: {0}")]
    UnsupportedGate(String),
    #[error("unsupported op at circuit position {index}: {msg}")]
    UnsupportedOp { index: usize, msg: String },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("rotation angle {0} is not dyadic (2*pi*c/2^m)")]
    NonDyadicAngle(f64),
    #[error("enumeration budget exceeded: {vars} variables (max {max})")]
    Budget { vars: u32, max: u32 },
}

/// Integer polynomial over Boolean variables, coefficients mod `2^m`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhasePoly {
    /// Phase unit exponent: phases are multiples of `2 pi / 2^m`.
    pub m: u32,
    /// Monomial -> coefficient in `[0, 2^m)`; no zero coefficients stored.
    pub terms: BTreeMap<Monomial, u64>,
}

impl PhasePoly {
    pub fn zero(m: u32) -> Self {
        PhasePoly {
            m,
            terms: BTreeMap::new(),
        }
    }

    fn modulus(&self) -> u64 {
        1u64 << self.m
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: i64) {
        let modulus = self.modulus();
        let c = coeff.rem_euclid(modulus as i64) as u64;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(mono.clone()).or_insert(0);
        *entry = (*entry + c) % modulus;
        if *entry == 0 {
            self.terms.remove(&mono);
        }
    }

    pub fn add(&mut self, other: &PhasePoly) {
        assert_eq!(self.m, other.m, "phase polynomials must share a modulus");
        for (mono, c) in &other.terms {
            self.add_term(mono.clone(), *c as i64);
        }
    }

    /// Lift to a larger modulus, rescaling coefficients by `2^(m'-m)`.
    pub fn lift(&self, m: u32) -> PhasePoly {
        assert!(m >= self.m);
        let shift = m - self.m;
        PhasePoly {
            m,
            terms: self
                .terms
                .iter()
                .map(|(mono, c)| (mono.clone(), c << shift))
                .collect(),
        }
    }

    /// Substitute variables through integer multilinear polynomials.
    fn substitute(&self, subst: &BTreeMap<Var, IntPoly>, m: u32) -> PhasePoly {
        let mut out = PhasePoly::zero(m);
        for (mono, c) in &self.terms {
            let mut acc = IntPoly::one();
            for v in mono {
                let p = subst
                    .get(v)
                    .cloned()
                    .unwrap_or_else(|| IntPoly::var(*v));
                acc = acc.mul(&p, m);
            }
            // acc is Boolean-valued; scale by the coefficient
            for (am, ac) in acc.0 {
                let cc = ((*c as i128 * ac as i128) % (1i128 << m)) as i64;
                out.add_term(am, cc);
            }
        }
        out
    }

    pub fn eval(&self, assign: &dyn Fn(Var) -> bool) -> u64 {
        let mut total = 0u64;
        for (mono, c) in &self.terms {
            if mono.iter().all(|v| assign(*v)) {
                total = (total + c) % self.modulus();
            }
        }
        total
    }

    fn rename(&self, f: &dyn Fn(Var) -> Var) -> PhasePoly {
        PhasePoly {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(mono, c)| (mono.iter().map(|v| f(*v)).collect(), *c))
                .collect(),
        }
    }
}

/// Integer multilinear polynomial with signed coefficients (used for the
/// exact XOR -> integer lifting `a xor b = a + b - 2ab`).
#[derive(Debug, Clone, Default)]
struct IntPoly(BTreeMap<Monomial, i64>);

impl IntPoly {
    fn zero() -> Self {
        IntPoly(BTreeMap::new())
    }

    fn one() -> Self {
        let mut m = BTreeMap::new();
        m.insert(Monomial::new(), 1);
        IntPoly(m)
    }

    fn var(v: Var) -> Self {
        let mut m = BTreeMap::new();
        m.insert([v].into_iter().collect(), 1);
        IntPoly(m)
    }

    fn add_term(&mut self, mono: Monomial, c: i64, modulus: i128) {
        let entry = self.0.entry(mono.clone()).or_insert(0);
        *entry = ((*entry as i128 + c as i128).rem_euclid(modulus)) as i64;
        if *entry == 0 {
            self.0.remove(&mono);
        }
    }

    fn add(&self, other: &IntPoly, m: u32) -> IntPoly {
        let modulus = 1i128 << m;
        let mut out = self.clone();
        for (mono, c) in &other.0 {
            out.add_term(mono.clone(), *c, modulus);
        }
        out
    }

    fn mul(&self, other: &IntPoly, m: u32) -> IntPoly {
        let modulus = 1i128 << m;
        let mut out = IntPoly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let mono: Monomial = ma.union(mb).copied().collect();
                let c = ((*ca as i128 * *cb as i128).rem_euclid(modulus)) as i64;
                out.add_term(mono, c, modulus);
            }
        }
        out
    }

    /// `self xor other` as integers: `a + b - 2ab` (exact on {0,1} values).
    fn xor(&self, other: &IntPoly, m: u32) -> IntPoly {
        let prod = self.mul(other, m).mul_scalar(-2, m);
        self.add(other, m).add(&prod, m)
    }

    fn mul_scalar(&self, s: i64, m: u32) -> IntPoly {
        let modulus = 1i128 << m;
        IntPoly(
            self.0
                .iter()
                .filter_map(|(mono, c)| {
                    let v = ((*c as i128 * s as i128).rem_euclid(modulus)) as i64;
                    (v != 0).then(|| (mono.clone(), v))
                })
                .collect(),
        )
    }
}

/// Boolean polynomial: XOR-of-AND normal form plus a constant bit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoolPoly {
    pub monomials: BTreeSet<Monomial>,
    pub constant: bool,
}

impl BoolPoly {
    pub fn var(v: Var) -> BoolPoly {
        BoolPoly {
            monomials: [[v].into_iter().collect()].into_iter().collect(),
            constant: false,
        }
    }

    pub fn constant(b: bool) -> BoolPoly {
        BoolPoly {
            monomials: BTreeSet::new(),
            constant: b,
        }
    }

    pub fn xor_mono(&mut self, mono: Monomial) {
        if mono.is_empty() {
            self.constant = !self.constant;
        } else if !self.monomials.remove(&mono) {
            self.monomials.insert(mono);
        }
    }

    pub fn xor(&self, other: &BoolPoly) -> BoolPoly {
        let mut out = self.clone();
        for mono in &other.monomials {
            out.xor_mono(mono.clone());
        }
        out.constant ^= other.constant;
        out
    }

    /// GF(2) product.
    pub fn and(&self, other: &BoolPoly) -> BoolPoly {
        let mut out = BoolPoly::constant(false);
        let self_terms: Vec<Option<&Monomial>> = self
            .monomials
            .iter()
            .map(Some)
            .chain(self.constant.then_some(None))
            .collect();
        let other_terms: Vec<Option<&Monomial>> = other
            .monomials
            .iter()
            .map(Some)
            .chain(other.constant.then_some(None))
            .collect();
        for a in &self_terms {
            for b in &other_terms {
                let mono: Monomial = match (a, b) {
                    (Some(x), Some(y)) => x.union(y).copied().collect(),
                    (Some(x), None) | (None, Some(x)) => (*x).clone(),
                    (None, None) => Monomial::new(),
                };
                out.xor_mono(mono);
            }
        }
        out
    }

    pub fn eval(&self, assign: &dyn Fn(Var) -> bool) -> bool {
        let mut acc = self.constant;
        for mono in &self.monomials {
            if mono.iter().all(|v| assign(*v)) {
                acc = !acc;
            }
        }
        acc
    }

    fn rename(&self, f: &dyn Fn(Var) -> Var) -> BoolPoly {
        BoolPoly {
            monomials: self
                .monomials
                .iter()
                .map(|mono| mono.iter().map(|v| f(*v)).collect())
                .collect(),
            constant: self.constant,
        }
    }

    /// GF(2) substitution of variables by Boolean polynomials.
    fn substitute(&self, subst: &BTreeMap<Var, BoolPoly>) -> BoolPoly {
        let mut out = BoolPoly::constant(self.constant);
        for mono in &self.monomials {
            let mut acc = BoolPoly::constant(true);
            for v in mono {
                let p = subst.get(v).cloned().unwrap_or_else(|| BoolPoly::var(*v));
                acc = acc.and(&p);
            }
            out = out.xor(&acc);
        }
        out
    }

    /// Integer lifting of the XOR normal form (exact on Boolean values).
    fn to_int_poly(&self, m: u32) -> IntPoly {
        let mut acc = if self.constant {
            IntPoly::one()
        } else {
            IntPoly::zero()
        };
        for mono in &self.monomials {
            let mut term = IntPoly::one();
            for v in mono {
                term = term.mul(&IntPoly::var(*v), m);
            }
            acc = acc.xor(&term, m);
        }
        acc
    }
}

/// The path-sum triple with explicit variable bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSum {
    pub n_inputs: u32,
    pub n_paths: u32,
    pub phase: PhasePoly,
    pub outs: Vec<BoolPoly>,
}

/// Enumeration budget for the matrix interpretation.
pub const MATRIX_VAR_BUDGET: u32 = 22;

impl PathSum {
    /// Identity on `n` wires.
    pub fn identity(n: u32) -> PathSum {
        PathSum {
            n_inputs: n,
            n_paths: 0,
            phase: PhasePoly::zero(0),
            outs: (0..n).map(BoolPoly::var).collect(),
        }
    }

    pub fn n_outputs(&self) -> u32 {
        self.outs.len() as u32
    }

    /// Normalization exponent `k` (amplitude `1/sqrt(2^k)`).
    pub fn norm_exponent(&self) -> u32 {
        self.n_paths
    }

    /// Functional composition `self` then `other`:
    /// `to_matrix(compose) = to_matrix(other) * to_matrix(self)`.
    pub fn compose(&self, other: &PathSum) -> Result<PathSum, PathsumError> {
        if self.n_outputs() != other.n_inputs {
            return Err(PathsumError::Arity(format!(
                "composing {} outputs into {} inputs",
                self.n_outputs(),
                other.n_inputs
            )));
        }
        let m = self.phase.m.max(other.phase.m);
        let a_phase = self.phase.lift(m);
        let b_phase = other.phase.lift(m);

        // variable layout of the result: inputs 0..q_a, then a's path vars,
        // then b's path vars (renamed)
        let qa = self.n_inputs;
        let ka = self.n_paths;
        let kb = other.n_paths;
        let rename_b_path = |v: Var| -> Var {
            debug_assert!(v >= other.n_inputs);
            qa + ka + (v - other.n_inputs)
        };

        // substitution for b's input variables: a's outputs
        let bool_subst: BTreeMap<Var, BoolPoly> = (0..other.n_inputs)
            .map(|i| (i, self.outs[i as usize].clone()))
            .collect();
        let int_subst: BTreeMap<Var, IntPoly> = bool_subst
            .iter()
            .map(|(v, p)| (*v, p.to_int_poly(m)))
            .collect();

        // b's phase: rename path vars, then substitute input vars
        let b_phase_renamed = b_phase.rename(&|v| {
            if v < other.n_inputs {
                v
            } else {
                rename_b_path(v)
            }
        });
        let int_subst_renamed: BTreeMap<Var, IntPoly> = int_subst;
        let mut phase = b_phase_renamed.substitute(&int_subst_renamed, m);
        phase.add(&a_phase);

        let outs = other
            .outs
            .iter()
            .map(|p| {
                p.rename(&|v| if v < other.n_inputs { v } else { rename_b_path(v) })
                    .substitute(&bool_subst)
            })
            .collect();

        Ok(PathSum {
            n_inputs: qa,
            n_paths: ka + kb,
            phase,
            outs,
        })
    }

    /// Kronecker product; `self` occupies the high wires.
    pub fn tensor(&self, other: &PathSum) -> PathSum {
        let m = self.phase.m.max(other.phase.m);
        let qa = self.n_inputs;
        let qb = other.n_inputs;
        // layout: a inputs 0..qa, b inputs qa..qa+qb, a paths, b paths
        let rename_a = |v: Var| -> Var {
            if v < qa {
                v
            } else {
                v + qb
            }
        };
        let rename_b = |v: Var| -> Var {
            if v < qb {
                v + qa
            } else {
                qa + qb + self.n_paths + (v - qb)
            }
        };
        let mut phase = self.phase.lift(m).rename(&rename_a);
        phase.add(&other.phase.lift(m).rename(&rename_b));
        let outs = self
            .outs
            .iter()
            .map(|p| p.rename(&rename_a))
            .chain(other.outs.iter().map(|p| p.rename(&rename_b)))
            .collect();
        PathSum {
            n_inputs: qa + qb,
            n_paths: self.n_paths + other.n_paths,
            phase,
            outs,
        }
    }

    /// Exact sum over all path assignments per basis input.
    pub fn to_matrix(&self) -> Result<UMatrix, PathsumError> {
        let vars = self.n_inputs + self.n_paths;
        if vars > MATRIX_VAR_BUDGET {
            return Err(PathsumError::Budget {
                vars,
                max: MATRIX_VAR_BUDGET,
            });
        }
        if self.n_outputs() != self.n_inputs {
            return Err(PathsumError::Arity(
                "matrix interpretation requires equal arities".into(),
            ));
        }
        let cols = 1usize << self.n_inputs;
        let mut m = UMatrix::zero(cols);
        let scale = 1.0 / f64::sqrt((1u64 << self.n_paths) as f64);
        let modulus = 1u64 << self.phase.m;
        for x in 0..cols {
            for y in 0..1usize << self.n_paths {
                let assign = |v: Var| -> bool {
                    if v < self.n_inputs {
                        (x >> (self.n_inputs - 1 - v)) & 1 == 1
                    } else {
                        let j = v - self.n_inputs;
                        (y >> (self.n_paths - 1 - j)) & 1 == 1
                    }
                };
                let p = self.phase.eval(&assign);
                let angle = 2.0 * PI * (p as f64) / (modulus as f64);
                let mut row = 0usize;
                for out in &self.outs {
                    row = (row << 1) | usize::from(out.eval(&assign));
                }
                m[(row, x)] += Complex64::from_polar(scale, angle);
            }
        }
        Ok(m)
    }
}

/// Canonical path-sum of a single supported gate.
pub fn gate_pathsum(name: GateName, params: &[f64]) -> Result<PathSum, PathsumError> {
    let ps = match name {
        GateName::I => PathSum::identity(1),
        GateName::H => {
            // 1/sqrt(2) sum_y (-1)^{xy} |y>
            let mut phase = PhasePoly::zero(1);
            phase.add_term([0u32, 1u32].into_iter().collect(), 1);
            PathSum {
                n_inputs: 1,
                n_paths: 1,
                phase,
                outs: vec![BoolPoly::var(1)],
            }
        }
        GateName::X | GateName::Not => {
            let mut out = BoolPoly::var(0);
            out.xor_mono(Monomial::new());
            PathSum {
                n_inputs: 1,
                n_paths: 0,
                phase: PhasePoly::zero(0),
                outs: vec![out],
            }
        }
        GateName::Z => diagonal_pathsum(1, 1),
        GateName::S => diagonal_pathsum(2, 1),
        GateName::T => diagonal_pathsum(3, 1),
        GateName::Rz => {
            let theta = params
                .first()
                .copied()
                .ok_or_else(|| PathsumError::Arity("RZ needs an angle".into()))?;
            let (c, m) = dyadic_angle(theta)?;
            // diag(e^{-i t/2}, e^{+i t/2}) = e^{2 i pi (-c + 2 c x) / 2^{m+1}}
            let mut phase = PhasePoly::zero(m + 1);
            phase.add_term(Monomial::new(), -c);
            phase.add_term([0u32].into_iter().collect(), 2 * c);
            PathSum {
                n_inputs: 1,
                n_paths: 0,
                phase,
                outs: vec![BoolPoly::var(0)],
            }
        }
        GateName::Cnot => PathSum {
            n_inputs: 2,
            n_paths: 0,
            phase: PhasePoly::zero(0),
            outs: vec![BoolPoly::var(0), BoolPoly::var(0).xor(&BoolPoly::var(1))],
        },
        GateName::Swap => PathSum {
            n_inputs: 2,
            n_paths: 0,
            phase: PhasePoly::zero(0),
            outs: vec![BoolPoly::var(1), BoolPoly::var(0)],
        },
        GateName::Toffoli => {
            let mut out2 = BoolPoly::var(2);
            out2.xor_mono([0u32, 1u32].into_iter().collect());
            PathSum {
                n_inputs: 3,
                n_paths: 0,
                phase: PhasePoly::zero(0),
                outs: vec![BoolPoly::var(0), BoolPoly::var(1), out2],
            }
        }
        other => return Err(PathsumError::UnsupportedGate(other.to_string())),
    };
    Ok(ps)
}

/// Phase `e^{2 i pi x / 2^m}` on `|1>` over `n_vars` with the phase on var 0.
fn diagonal_pathsum(m: u32, _n_vars: u32) -> PathSum {
    let mut phase = PhasePoly::zero(m);
    phase.add_term([0u32].into_iter().collect(), 1);
    PathSum {
        n_inputs: 1,
        n_paths: 0,
        phase,
        outs: vec![BoolPoly::var(0)],
    }
}

/// Recognize `theta = 2*pi*c / 2^m` with small `m`; returns `(c, m)`.
fn dyadic_angle(theta: f64) -> Result<(i64, u32), PathsumError> {
    for m in 0..=24u32 {
        let scaled = theta * (1u64 << m) as f64 / (2.0 * PI);
        let c = scaled.round();
        if (scaled - c).abs() < 1e-9 && c.abs() < (1i64 << 40) as f64 {
            return Ok((c as i64, m));
        }
    }
    Err(PathsumError::NonDyadicAngle(theta))
}

/// Embed a gate path-sum on specific wires of an `n`-wire step, with the
/// given controls. Controls are supported on X-like and diagonal gates.
fn embedded_step(
    n: u32,
    name: GateName,
    dagger: bool,
    params: &[f64],
    controls: &[(WireId, Polarity)],
    targets: &[WireId],
) -> Result<PathSum, PathsumError> {
    // resolve dagger: S/T invert by tripling the coefficient at their m;
    // RZ negates the angle; self-inverse gates stay
    let (name, params): (GateName, Vec<f64>) = if dagger {
        match name {
            GateName::S | GateName::T => (name, params.to_vec()),
            GateName::Rz => (name, params.iter().map(|p| -p).collect()),
            g if g.self_inverse() => (g, params.to_vec()),
            other => return Err(PathsumError::UnsupportedGate(format!("{other}dg"))),
        }
    } else {
        (name, params.to_vec())
    };
    let dagger_st = dagger && matches!(name, GateName::S | GateName::T);

    let mut ps = PathSum::identity(n);
    match name {
        GateName::X | GateName::Not | GateName::Cnot | GateName::Toffoli => {
            // multi-controlled X: explicit controls plus the gate's own
            let mut all_controls: Vec<BoolPoly> = controls
                .iter()
                .map(|(w, pol)| {
                    let mut p = BoolPoly::var(*w);
                    if *pol == Polarity::Negative {
                        p.xor_mono(Monomial::new());
                    }
                    p
                })
                .collect();
            let target = match name {
                GateName::X | GateName::Not => targets[0],
                GateName::Cnot => {
                    all_controls.push(BoolPoly::var(targets[0]));
                    targets[1]
                }
                GateName::Toffoli => {
                    all_controls.push(BoolPoly::var(targets[0]));
                    all_controls.push(BoolPoly::var(targets[1]));
                    targets[2]
                }
                _ => unreachable!(),
            };
            let mut product = BoolPoly::constant(true);
            for c in &all_controls {
                product = product.and(c);
            }
            ps.outs[target as usize] = ps.outs[target as usize].xor(&product);
            Ok(ps)
        }
        GateName::Z | GateName::S | GateName::T | GateName::Rz => {
            // diagonal phase on the target conjuncted with the controls
            let (m, coeff_on_target, constant): (u32, i64, i64) = match name {
                GateName::Z => (1, 1, 0),
                GateName::S => (2, if dagger_st { 3 } else { 1 }, 0),
                GateName::T => (3, if dagger_st { 7 } else { 1 }, 0),
                GateName::Rz => {
                    let (c, m) = dyadic_angle(params[0])?;
                    (m + 1, 2 * c, -c)
                }
                _ => unreachable!(),
            };
            let mut gate_phase = PhasePoly::zero(m);
            // control product as an integer polynomial
            let mut ctrl = IntPoly::one();
            for (w, pol) in controls {
                let mut p = BoolPoly::var(*w);
                if *pol == Polarity::Negative {
                    p.xor_mono(Monomial::new());
                }
                ctrl = ctrl.mul(&p.to_int_poly(m), m);
            }
            let target_int = BoolPoly::var(targets[0]).to_int_poly(m);
            let on_target = ctrl.mul(&target_int, m).mul_scalar(coeff_on_target, m);
            for (mono, c) in on_target.0 {
                gate_phase.add_term(mono, c);
            }
            if constant != 0 {
                for (mono, c) in ctrl.mul_scalar(constant, m).0 {
                    gate_phase.add_term(mono, c);
                }
            }
            let m_total = ps.phase.m.max(m);
            let mut phase = ps.phase.lift(m_total);
            phase.add(&gate_phase.lift(m_total));
            ps.phase = phase;
            Ok(ps)
        }
        GateName::H => {
            if !controls.is_empty() {
                return Err(PathsumError::UnsupportedGate("controlled H".into()));
            }
            let h = gate_pathsum(GateName::H, &[])?;
            Ok(embed_on_wires(n, &h, targets))
        }
        GateName::Swap => {
            if !controls.is_empty() {
                return Err(PathsumError::UnsupportedGate("controlled SWAP".into()));
            }
            let s = gate_pathsum(GateName::Swap, &[])?;
            Ok(embed_on_wires(n, &s, targets))
        }
        GateName::I => Ok(ps),
        other => Err(PathsumError::UnsupportedGate(other.to_string())),
    }
}

/// Lift a gate path-sum to `n` wires by wiring its inputs to `targets`.
fn embed_on_wires(n: u32, gate: &PathSum, targets: &[WireId]) -> PathSum {
    // variables: inputs 0..n, then the gate's path vars
    let map_var = |v: Var| -> Var {
        if v < gate.n_inputs {
            targets[v as usize]
        } else {
            n + (v - gate.n_inputs)
        }
    };
    let phase = gate.phase.rename(&map_var);
    let mut outs: Vec<BoolPoly> = (0..n).map(BoolPoly::var).collect();
    for (i, out) in gate.outs.iter().enumerate() {
        outs[targets[i] as usize] = out.rename(&map_var);
    }
    PathSum {
        n_inputs: n,
        n_paths: gate.n_paths,
        phase,
        outs,
    }
}

/// Fold a pure circuit into a path-sum via compose/tensor of gate sums.
pub fn circuit_pathsum(circuit: &Circuit) -> Result<PathSum, PathsumError> {
    if let Some((index, kind)) = circuit.first_impure_op() {
        return Err(PathsumError::UnsupportedOp {
            index,
            msg: format!("{kind} ops have no path-sum"),
        });
    }
    circuit.validate().map_err(|e| PathsumError::UnsupportedOp {
        index: 0,
        msg: format!("ill-formed circuit: {e}"),
    })?;
    let n = circuit.inputs.len() as u32;
    let position = |w: WireId| -> WireId {
        circuit
            .inputs
            .iter()
            .position(|(id, _)| *id == w)
            .expect("validated circuit") as WireId
    };
    let mut acc = PathSum::identity(n);
    for (index, op) in circuit.ops.iter().enumerate() {
        if let CircOp::Gate {
            name,
            dagger,
            params,
            controls,
            targets,
        } = op
        {
            let controls: Vec<(WireId, Polarity)> = controls
                .iter()
                .map(|(w, p)| (position(*w), *p))
                .collect();
            let targets: Vec<WireId> = targets.iter().map(|w| position(*w)).collect();
            let step = embedded_step(n, *name, *dagger, params, &controls, &targets)
                .map_err(|e| PathsumError::UnsupportedOp {
                    index,
                    msg: e.to_string(),
                })?;
            acc = acc.compose(&step)?;
        }
    }
    Ok(acc)
}

/// Equivalence verdict for two circuits.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Equiv,
    /// Basis input on which the two operators act differently.
    Distinct { witness: usize },
    Unsupported { reason: String },
}

/// Decide equivalence up to global phase by comparing the matrix
/// interpretations of the two path-sums.
pub fn equiv(c1: &Circuit, c2: &Circuit) -> Result<Verdict, PathsumError> {
    if c1.inputs.len() > 6 || c2.inputs.len() > 6 {
        return Ok(Verdict::Unsupported {
            reason: "equivalence checking is limited to 6 qubits".into(),
        });
    }
    if c1.inputs.len() != c2.inputs.len() {
        return Ok(Verdict::Distinct { witness: 0 });
    }
    let p1 = match circuit_pathsum(c1) {
        Ok(p) => p,
        Err(e) => {
            return Ok(Verdict::Unsupported {
                reason: e.to_string(),
            })
        }
    };
    let p2 = match circuit_pathsum(c2) {
        Ok(p) => p,
        Err(e) => {
            return Ok(Verdict::Unsupported {
                reason: e.to_string(),
            })
        }
    };
    let m1 = p1.to_matrix()?;
    let m2 = p2.to_matrix()?;
    if m1.global_phase_eq(&m2, 1e-8) {
        Ok(Verdict::Equiv)
    } else {
        // witness: basis input with the largest column deviation after
        // aligning the global phase
        let t = m1.dagger().mul(&m2).trace();
        let phase = if t.norm() <= f64::EPSILON {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, -t.arg())
        };
        let mut worst = (0usize, 0.0f64);
        for col in 0..m1.dim() {
            let d: f64 = (0..m1.dim())
                .map(|r| (m1[(r, col)] - m2[(r, col)] * phase).norm_sqr())
                .sum();
            if d > worst.1 {
                worst = (col, d);
            }
        }
        Ok(Verdict::Distinct { witness: worst.0 })
    }
}
