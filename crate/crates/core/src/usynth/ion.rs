//! Trapped-ion circuit structure: layers of per-qubit Z rotations followed
//! by a global Molmer-Sorensen gate, with a trailing rotation column, and
//! the layer-count lower bound for universality.

use num_complex::Complex64;

use super::USynthError;
use crate::qnum::{ms_gate, UMatrix};

/// Minimum number of MS layers a universal trapped-ion topology needs on
/// `n` qubits: `ceil((2^{n+1} - 2n - 2) / (2n + 1))`. Exact integer
/// arithmetic, no floating point.
pub fn ms_layer_lower_bound(n: u32) -> Result<u128, USynthError> {
    if n == 0 {
        return Err(USynthError::ZeroQubits);
    }
    let n = n as u128;
    let numerator = (1u128 << (n + 1)) - 2 * n - 2;
    let denominator = 2 * n + 1;
    Ok(numerator.div_ceil(denominator))
}

/// Parameterized ansatz: per layer one MS angle plus `n` Rz angles, and a
/// final Rz column. Parameter count `layers * (n + 1) + n`.
#[derive(Debug, Clone)]
pub struct IonAnsatz {
    pub n: usize,
    pub layers: usize,
}

impl IonAnsatz {
    pub fn new(n: usize, layers: usize) -> IonAnsatz {
        IonAnsatz { n, layers }
    }

    pub fn param_count(&self) -> usize {
        self.layers * (self.n + 1) + self.n
    }

    /// Diagonal of a column of per-qubit Rz rotations.
    fn rz_column(&self, angles: &[f64]) -> UMatrix {
        let dim = 1usize << self.n;
        UMatrix::from_fn(dim, |r, c| {
            if r != c {
                return Complex64::new(0.0, 0.0);
            }
            let mut phase = 0.0;
            for (w, theta) in angles.iter().enumerate() {
                let bit = (r >> (self.n - 1 - w)) & 1;
                phase += if bit == 1 { theta / 2.0 } else { -theta / 2.0 };
            }
            Complex64::from_polar(1.0, phase)
        })
    }

    /// Evaluate the ansatz at a parameter vector. Layout:
    /// `[layer 0: rz_0..rz_{n-1}, ms | layer 1: ... | final rz_0..rz_{n-1}]`.
    pub fn eval(&self, theta: &[f64]) -> Result<UMatrix, USynthError> {
        if theta.len() != self.param_count() {
            return Err(USynthError::ParamCount {
                expected: self.param_count(),
                got: theta.len(),
            });
        }
        let dim = 1usize << self.n;
        let mut u = UMatrix::identity(dim);
        let mut idx = 0;
        for _ in 0..self.layers {
            let rz = self.rz_column(&theta[idx..idx + self.n]);
            idx += self.n;
            let ms = ms_gate(self.n, theta[idx]).map_err(USynthError::Qnum)?;
            idx += 1;
            u = ms.mul(&rz.mul(&u));
        }
        let final_rz = self.rz_column(&theta[idx..idx + self.n]);
        Ok(final_rz.mul(&u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::EQ_TOL;

    #[test]
    fn lower_bound_spot_values() {
        assert_eq!(ms_layer_lower_bound(2).unwrap(), 1); // ceil(2/5)
        assert_eq!(ms_layer_lower_bound(3).unwrap(), 2); // ceil(8/7)
        assert_eq!(ms_layer_lower_bound(4).unwrap(), 3); // ceil(22/9)
    }

    #[test]
    fn lower_bound_closed_form_and_monotone() {
        let mut prev = 0u128;
        for n in 1..=20u32 {
            let expected = {
                let n = n as u128;
                let num = (1u128 << (n + 1)) - 2 * n - 2;
                num.div_ceil(2 * n + 1)
            };
            let got = ms_layer_lower_bound(n).unwrap();
            assert_eq!(got, expected);
            assert!(got >= prev, "bound must be nondecreasing");
            prev = got;
        }
    }

    #[test]
    fn zero_qubits_rejected() {
        assert!(matches!(
            ms_layer_lower_bound(0),
            Err(USynthError::ZeroQubits)
        ));
    }

    #[test]
    fn ansatz_param_count_formula() {
        assert_eq!(IonAnsatz::new(2, 3).param_count(), 3 * 3 + 2);
        assert_eq!(IonAnsatz::new(3, 1).param_count(), 1 * 4 + 3);
    }

    #[test]
    fn zero_parameters_give_identity_up_to_phase() {
        for layers in 0..3usize {
            let a = IonAnsatz::new(2, layers);
            let u = a.eval(&vec![0.0; a.param_count()]).unwrap();
            assert!(u.global_phase_distance(&UMatrix::identity(4)) < EQ_TOL);
        }
    }

    #[test]
    fn zero_ms_layer_is_diagonal() {
        let a = IonAnsatz::new(2, 1);
        let mut theta = vec![0.3, -0.7, 0.0, 0.9, 0.4];
        theta[2] = 0.0; // MS angle
        let u = a.eval(&theta).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    assert!(u[(r, c)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ansatz_is_unitary() {
        let a = IonAnsatz::new(2, 2);
        let theta: Vec<f64> = (0..a.param_count()).map(|i| 0.1 * i as f64).collect();
        let u = a.eval(&theta).unwrap();
        assert!(u.is_unitary(1e-9));
    }

    #[test]
    fn param_count_mismatch_rejected() {
        let a = IonAnsatz::new(2, 1);
        assert!(matches!(
            a.eval(&[0.0; 3]),
            Err(USynthError::ParamCount { .. })
        ));
    }
}
