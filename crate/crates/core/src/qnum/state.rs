use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use super::{check_finite, log2_exact, Amplitude, QnumError, UMatrix};
use super::{DEFAULT_MAX_QUBITS, NORM_TOL, PROB_FLOOR};

/// Normalized complex amplitude vector over `2^n` basis states in
/// lexicographic order. Wire 0 is the highest-order bit of a basis index.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// The scalar state on zero qubits.
    pub fn scalar() -> Self {
        StateVector {
            n_qubits: 0,
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// `|0...0>` on `n` qubits.
    pub fn zeros(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits: n, amps }
    }

    /// Basis state `|bits>` where bit 0 of the slice is wire 0 (leftmost).
    pub fn basis(bits: &[bool]) -> Self {
        let n = bits.len();
        let mut index = 0usize;
        for &b in bits {
            index = (index << 1) | usize::from(b);
        }
        Self::basis_index(n, index)
    }

    /// Basis state with the given lexicographic index.
    pub fn basis_index(n: usize, index: usize) -> Self {
        assert!(index < (1 << n), "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits: n, amps }
    }

    /// Build from raw amplitudes; must have power-of-two length, be finite,
    /// and normalized within the crate norm tolerance.
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self, QnumError> {
        let n = log2_exact(amps.len())?;
        check_finite(&amps)?;
        let sv = StateVector { n_qubits: n, amps };
        let deviation = (sv.norm_sqr() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(QnumError::NotNormalized { deviation });
        }
        Ok(sv)
    }

    /// Wrap raw amplitudes without the normalization check. For internal
    /// plumbing where the invariant is maintained by construction.
    #[doc(hidden)]
    pub fn from_raw_unchecked(n_qubits: usize, amps: Vec<Amplitude>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        StateVector { n_qubits, amps }
    }

    #[doc(hidden)]
    pub fn into_amplitudes(self) -> Vec<Amplitude> {
        self.amps
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Kronecker product; `self` occupies the high bits.
    pub fn kron(&self, rhs: &StateVector) -> Result<StateVector, QnumError> {
        self.kron_within(rhs, DEFAULT_MAX_QUBITS)
    }

    pub fn kron_within(
        &self,
        rhs: &StateVector,
        max_qubits: usize,
    ) -> Result<StateVector, QnumError> {
        let n = self.n_qubits + rhs.n_qubits;
        if n > max_qubits {
            return Err(QnumError::WidthOverflow {
                requested: n,
                max: max_qubits,
            });
        }
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &rhs.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector {
            n_qubits: n,
            amps,
        })
    }

    /// Apply `u` on the given (distinct, ordered) target wires. `targets[0]`
    /// is the highest-order wire of the operator's own index space, so this
    /// equals `P^dag (U tensor I) P` for the permutation `P` moving the
    /// targets to the front.
    pub fn apply(&self, u: &UMatrix, targets: &[usize]) -> Result<StateVector, QnumError> {
        let k = targets.len();
        if u.dim() != 1 << k {
            return Err(QnumError::DimensionMismatch {
                dim: u.dim(),
                targets: k,
            });
        }
        let mut seen = vec![false; self.n_qubits];
        for &t in targets {
            if t >= self.n_qubits {
                return Err(QnumError::TargetOutOfRange {
                    wire: t,
                    n_qubits: self.n_qubits,
                });
            }
            if seen[t] {
                return Err(QnumError::DuplicateTarget(t));
            }
            seen[t] = true;
        }

        // bit position in the state index for the j-th operator wire
        let bitpos: Vec<usize> = targets.iter().map(|&t| self.n_qubits - 1 - t).collect();
        let target_mask: usize = bitpos.iter().map(|&b| 1usize << b).sum();
        let gdim = 1usize << k;

        let mut out = self.amps.clone();
        let mut gathered = vec![Complex64::new(0.0, 0.0); gdim];
        for base in 0..self.amps.len() {
            if base & target_mask != 0 {
                continue;
            }
            for (s, slot) in gathered.iter_mut().enumerate() {
                let mut addr = base;
                for (j, &bp) in bitpos.iter().enumerate() {
                    if (s >> (k - 1 - j)) & 1 == 1 {
                        addr |= 1 << bp;
                    }
                }
                *slot = self.amps[addr];
            }
            for r in 0..gdim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (cidx, g) in gathered.iter().enumerate() {
                    acc += u[(r, cidx)] * g;
                }
                let mut addr = base;
                for (j, &bp) in bitpos.iter().enumerate() {
                    if (r >> (k - 1 - j)) & 1 == 1 {
                        addr |= 1 << bp;
                    }
                }
                out[addr] = acc;
            }
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }

    /// Probability that measuring `wire` yields 1.
    pub fn prob_one(&self, wire: usize) -> Result<f64, QnumError> {
        if wire >= self.n_qubits {
            return Err(QnumError::TargetOutOfRange {
                wire,
                n_qubits: self.n_qubits,
            });
        }
        let bit = 1usize << (self.n_qubits - 1 - wire);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Project `wire` onto outcome `bit` and renormalize (width unchanged).
    pub fn project(&self, wire: usize, outcome: bool) -> Result<StateVector, QnumError> {
        let p1 = self.prob_one(wire)?;
        let p = if outcome { p1 } else { 1.0 - p1 };
        if p <= 0.0 {
            return Err(QnumError::NotNormalized { deviation: 1.0 });
        }
        let bit = 1usize << (self.n_qubits - 1 - wire);
        let scale = 1.0 / p.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if (i & bit != 0) == outcome {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// Drop a wire known to be in the classical basis state `outcome`.
    pub fn drop_wire(&self, wire: usize, outcome: bool) -> Result<StateVector, QnumError> {
        if wire >= self.n_qubits {
            return Err(QnumError::TargetOutOfRange {
                wire,
                n_qubits: self.n_qubits,
            });
        }
        let bitpos = self.n_qubits - 1 - wire;
        let bit = 1usize << bitpos;
        let low_mask = bit - 1;
        let mut amps = Vec::with_capacity(self.amps.len() / 2);
        for j in 0..self.amps.len() / 2 {
            let idx = ((j & !low_mask) << 1) | (j & low_mask) | if outcome { bit } else { 0 };
            amps.push(self.amps[idx]);
        }
        Ok(StateVector {
            n_qubits: self.n_qubits - 1,
            amps,
        })
    }

    /// Reorder wires: entry `perm[new_wire] = old_wire`.
    pub fn permute(&self, perm: &[usize]) -> Result<StateVector, QnumError> {
        assert_eq!(perm.len(), self.n_qubits, "permutation length mismatch");
        let n = self.n_qubits;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (old_index, a) in self.amps.iter().enumerate() {
            let mut new_index = 0usize;
            for (new_wire, &old_wire) in perm.iter().enumerate() {
                let bit = (old_index >> (n - 1 - old_wire)) & 1;
                new_index |= bit << (n - 1 - new_wire);
            }
            amps[new_index] = *a;
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn distance(&self, rhs: &StateVector) -> f64 {
        assert_eq!(self.dim(), rhs.dim());
        self.amps
            .iter()
            .zip(&rhs.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Distance after optimal global-phase alignment.
    pub fn global_phase_distance(&self, rhs: &StateVector) -> f64 {
        assert_eq!(self.dim(), rhs.dim());
        let t: Complex64 = self.amps.iter().zip(&rhs.amps).map(|(a, b)| a.conj() * b).sum();
        let phase = if t.norm() <= f64::EPSILON {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, -t.arg())
        };
        self.amps
            .iter()
            .zip(&rhs.amps)
            .map(|(a, b)| (a - b * phase).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector({} qubits; ", self.n_qubits)?;
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > 1e-18 {
                if !first {
                    write!(f, " + ")?;
                }
                write!(
                    f,
                    "({:.4}{:+.4}i)|{:0width$b}>",
                    a.re,
                    a.im,
                    i,
                    width = self.n_qubits
                )?;
                first = false;
            }
        }
        write!(f, ")")
    }
}

/// Result of a projective measurement in the computational basis.
#[derive(Debug, Clone)]
pub struct MeasureOutcome {
    pub bit: bool,
    pub state: StateVector,
    /// Exact pre-draw probability of the returned outcome.
    pub probability: f64,
    /// Pre-draw probabilities of both branches, `(p0, p1)`.
    pub branch_probs: (f64, f64),
}

/// Measure `wire`; the returned state is the renormalized projection (the
/// measured wire is kept, collapsed). Outcomes with probability below
/// [`PROB_FLOOR`] are never drawn.
pub fn measure(
    state: &StateVector,
    wire: usize,
    rng: &mut impl Rng,
) -> Result<MeasureOutcome, QnumError> {
    let p1 = state.prob_one(wire)?;
    let p0 = 1.0 - p1;
    let bit = if p1 < PROB_FLOOR {
        false
    } else if p0 < PROB_FLOOR {
        true
    } else {
        rng.random::<f64>() < p1
    };
    let probability = if bit { p1 } else { p0 };
    let projected = state.project(wire, bit)?;
    Ok(MeasureOutcome {
        bit,
        state: projected,
        probability,
        branch_probs: (p0, p1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::{gate_matrix, GateName, EQ_TOL};
    use crate::rng::seeded_rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn h() -> UMatrix {
        gate_matrix(GateName::H, &[]).unwrap()
    }

    #[test]
    fn kron_of_basis_states_is_lexicographic() {
        // |0> (x) |1> = |01> = (0,1,0,0)
        let s = StateVector::basis(&[false])
            .kron(&StateVector::basis(&[true]))
            .unwrap();
        assert_eq!(s.dim(), 4);
        assert!((s.amplitudes()[1].re - 1.0).abs() < EQ_TOL);
    }

    #[test]
    fn kron_identity_matrices() {
        let i2 = UMatrix::identity(2);
        i2.kron(&i2).unwrap().assert_close(&UMatrix::identity(4), EQ_TOL);
    }

    #[test]
    fn kron_width_overflow_errors() {
        let a = StateVector::zeros(8);
        let b = StateVector::zeros(8);
        assert!(matches!(
            a.kron(&b),
            Err(QnumError::WidthOverflow { requested: 16, .. })
        ));
    }

    #[test]
    fn apply_h_on_wire0_of_two() {
        // Oracle: explicit 4x4 kron(H, I) matrix-vector product.
        let hi = h().kron(&UMatrix::identity(2)).unwrap();
        let expected = hi.mul_vec(StateVector::zeros(2).amplitudes());
        let got = StateVector::zeros(2).apply(&h(), &[0]).unwrap();
        for (g, e) in got.amplitudes().iter().zip(&expected) {
            assert!((g - e).norm() < EQ_TOL);
        }
        // (|00> + |10>)/sqrt(2)
        assert!((got.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < EQ_TOL);
        assert!((got.amplitudes()[2].re - FRAC_1_SQRT_2).abs() < EQ_TOL);
    }

    #[test]
    fn apply_identity_is_noop() {
        let mut rng = seeded_rng(11);
        let u = UMatrix::random_unitary(8, &mut rng);
        let s = StateVector::from_amplitudes(u.column(0)).unwrap();
        let applied = s.apply(&UMatrix::identity(2), &[1]).unwrap();
        assert!(s.distance(&applied) < EQ_TOL);
    }

    #[test]
    fn apply_cnot_creates_bell_state() {
        let cnot = gate_matrix(GateName::Cnot, &[]).unwrap();
        let plus = StateVector::zeros(2).apply(&h(), &[0]).unwrap();
        let bell = plus.apply(&cnot, &[0, 1]).unwrap();
        assert!((bell.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < EQ_TOL);
        assert!((bell.amplitudes()[3].re - FRAC_1_SQRT_2).abs() < EQ_TOL);
        assert!(bell.amplitudes()[1].norm() < EQ_TOL);
        assert!(bell.amplitudes()[2].norm() < EQ_TOL);
    }

    #[test]
    fn apply_matches_permutation_oracle() {
        // P^dag (U (x) I) P for targets moved to the front, on a random state.
        let mut rng = seeded_rng(5);
        let n = 3;
        let u = UMatrix::random_unitary(4, &mut rng);
        let state =
            StateVector::from_amplitudes(UMatrix::random_unitary(1 << n, &mut rng).column(0))
                .unwrap();
        let targets = [2usize, 0usize];
        // permutation sending target wires to the front: new wire 0 = old 2, new 1 = old 0, new 2 = old 1
        let perm_to_front = [2usize, 0, 1];
        let permuted = state.permute(&perm_to_front).unwrap();
        let big = u.kron(&UMatrix::identity(2)).unwrap();
        let moved = StateVector::from_amplitudes(big.mul_vec(permuted.amplitudes())).unwrap();
        // inverse permutation
        let mut inv = [0usize; 3];
        for (new_w, &old_w) in perm_to_front.iter().enumerate() {
            inv[old_w] = new_w;
        }
        let expected = moved.permute(&inv).unwrap();
        let got = state.apply(&u, &targets).unwrap();
        assert!(got.distance(&expected) < 1e-9);
    }

    #[test]
    fn apply_rejects_duplicate_and_out_of_range() {
        let s = StateVector::zeros(2);
        let cnot = gate_matrix(GateName::Cnot, &[]).unwrap();
        assert!(matches!(
            s.apply(&cnot, &[0, 0]),
            Err(QnumError::DuplicateTarget(0))
        ));
        assert!(matches!(
            s.apply(&cnot, &[0, 5]),
            Err(QnumError::TargetOutOfRange { .. })
        ));
    }

    #[test]
    fn measure_definite_state() {
        let mut rng = seeded_rng(0);
        let out = measure(&StateVector::basis(&[false]), 0, &mut rng).unwrap();
        assert!(!out.bit);
        assert!((out.probability - 1.0).abs() < EQ_TOL);
        assert!(out.state.distance(&StateVector::basis(&[false])) < EQ_TOL);
    }

    #[test]
    fn measure_plus_state_probabilities() {
        let plus = StateVector::zeros(1).apply(&h(), &[0]).unwrap();
        let mut rng = seeded_rng(3);
        let out = measure(&plus, 0, &mut rng).unwrap();
        assert!((out.branch_probs.0 - 0.5).abs() < EQ_TOL);
        assert!((out.branch_probs.1 - 0.5).abs() < EQ_TOL);
        assert!((out.probability - 0.5).abs() < EQ_TOL);
    }

    #[test]
    fn measure_bell_collapses_partner() {
        let cnot = gate_matrix(GateName::Cnot, &[]).unwrap();
        let bell = StateVector::zeros(2)
            .apply(&h(), &[0])
            .unwrap()
            .apply(&cnot, &[0, 1])
            .unwrap();
        for seed in 0..20 {
            let mut rng = seeded_rng(seed);
            let out = measure(&bell, 0, &mut rng).unwrap();
            assert!((out.probability - 0.5).abs() < EQ_TOL);
            // second qubit collapsed to the same bit
            let expected = StateVector::basis(&[out.bit, out.bit]);
            assert!(out.state.distance(&expected) < EQ_TOL);
        }
    }

    #[test]
    fn measurement_branches_sum_to_one() {
        let mut rng = seeded_rng(17);
        for n in 1..=4usize {
            let u = UMatrix::random_unitary(1 << n, &mut rng);
            let s = StateVector::from_amplitudes(u.column(0)).unwrap();
            for w in 0..n {
                let p1 = s.prob_one(w).unwrap();
                assert!((p1 + (1.0 - p1) - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn drop_wire_removes_collapsed_qubit() {
        let s = StateVector::basis(&[true, false, true]);
        let dropped = s.drop_wire(1, false).unwrap();
        assert!(dropped.distance(&StateVector::basis(&[true, true])) < EQ_TOL);
    }
}
