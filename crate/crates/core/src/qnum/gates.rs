use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{QnumError, UMatrix};

/// Names of the fixed gate set.
///
/// `Not` is the textbook alias for `X` and keeps its own name so that gate
/// counts and serialized circuits can distinguish the Boolean-flavored use
/// (oracle circuits) from the Pauli-flavored one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateName {
    I,
    H,
    X,
    Not,
    Z,
    S,
    T,
    Rx,
    Ry,
    Rz,
    Cnot,
    Swap,
    Toffoli,
    /// Molmer-Sorensen entangling gate on `n` qubits.
    Ms(usize),
}

impl GateName {
    /// Number of angle parameters.
    pub fn param_arity(self) -> usize {
        match self {
            GateName::Rx | GateName::Ry | GateName::Rz | GateName::Ms(_) => 1,
            _ => 0,
        }
    }

    /// Number of target wires.
    pub fn target_arity(self) -> usize {
        match self {
            GateName::Cnot | GateName::Swap => 2,
            GateName::Toffoli => 3,
            GateName::Ms(n) => n,
            _ => 1,
        }
    }

    /// Whether the gate equals its own inverse.
    pub fn self_inverse(self) -> bool {
        matches!(
            self,
            GateName::I
                | GateName::H
                | GateName::X
                | GateName::Not
                | GateName::Z
                | GateName::Cnot
                | GateName::Swap
                | GateName::Toffoli
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::I => "I",
            GateName::H => "H",
            GateName::X => "X",
            GateName::Not => "NOT",
            GateName::Z => "Z",
            GateName::S => "S",
            GateName::T => "T",
            GateName::Rx => "RX",
            GateName::Ry => "RY",
            GateName::Rz => "RZ",
            GateName::Cnot => "CNOT",
            GateName::Swap => "SWAP",
            GateName::Toffoli => "TOFFOLI",
            GateName::Ms(_) => "MS",
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateName::Ms(n) => write!(f, "MS{n}"),
            g => f.write_str(g.as_str()),
        }
    }
}

impl FromStr for GateName {
    type Err = QnumError;

    fn from_str(s: &str) -> Result<Self, QnumError> {
        Ok(match s {
            "I" => GateName::I,
            "H" => GateName::H,
            "X" => GateName::X,
            "NOT" => GateName::Not,
            "Z" => GateName::Z,
            "S" => GateName::S,
            "T" => GateName::T,
            "RX" => GateName::Rx,
            "RY" => GateName::Ry,
            "RZ" => GateName::Rz,
            "CNOT" => GateName::Cnot,
            "SWAP" => GateName::Swap,
            "TOFFOLI" => GateName::Toffoli,
            other => {
                if let Some(n) = other.strip_prefix("MS") {
                    let n: usize = n
                        .parse()
                        .map_err(|_| QnumError::UnknownGate(other.to_string()))?;
                    if n == 0 {
                        return Err(QnumError::UnknownGate(other.to_string()));
                    }
                    GateName::Ms(n)
                } else {
                    return Err(QnumError::UnknownGate(other.to_string()));
                }
            }
        })
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The exact matrix of a named gate.
pub fn gate_matrix(name: GateName, params: &[f64]) -> Result<UMatrix, QnumError> {
    let expected = name.param_arity();
    if params.len() != expected {
        return Err(QnumError::WrongParamCount {
            gate: name.to_string(),
            expected,
            got: params.len(),
        });
    }
    let m = match name {
        GateName::I => UMatrix::identity(2),
        GateName::H => UMatrix::from_rows(
            2,
            vec![
                c(FRAC_1_SQRT_2, 0.0),
                c(FRAC_1_SQRT_2, 0.0),
                c(FRAC_1_SQRT_2, 0.0),
                c(-FRAC_1_SQRT_2, 0.0),
            ],
        )?,
        GateName::X | GateName::Not => {
            UMatrix::from_rows(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])?
        }
        GateName::Z => {
            UMatrix::from_rows(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])?
        }
        GateName::S => {
            UMatrix::from_rows(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])?
        }
        GateName::T => UMatrix::from_rows(
            2,
            vec![
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                Complex64::from_polar(1.0, PI / 4.0),
            ],
        )?,
        GateName::Rx => {
            let half = params[0] / 2.0;
            UMatrix::from_rows(
                2,
                vec![
                    c(half.cos(), 0.0),
                    c(0.0, -half.sin()),
                    c(0.0, -half.sin()),
                    c(half.cos(), 0.0),
                ],
            )?
        }
        GateName::Ry => {
            let half = params[0] / 2.0;
            UMatrix::from_rows(
                2,
                vec![
                    c(half.cos(), 0.0),
                    c(-half.sin(), 0.0),
                    c(half.sin(), 0.0),
                    c(half.cos(), 0.0),
                ],
            )?
        }
        GateName::Rz => {
            let half = params[0] / 2.0;
            UMatrix::from_rows(
                2,
                vec![
                    Complex64::from_polar(1.0, -half),
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    Complex64::from_polar(1.0, half),
                ],
            )?
        }
        GateName::Cnot => {
            let mut m = UMatrix::identity(4);
            m[(2, 2)] = c(0.0, 0.0);
            m[(3, 3)] = c(0.0, 0.0);
            m[(2, 3)] = c(1.0, 0.0);
            m[(3, 2)] = c(1.0, 0.0);
            m
        }
        GateName::Swap => {
            let mut m = UMatrix::identity(4);
            m[(1, 1)] = c(0.0, 0.0);
            m[(2, 2)] = c(0.0, 0.0);
            m[(1, 2)] = c(1.0, 0.0);
            m[(2, 1)] = c(1.0, 0.0);
            m
        }
        GateName::Toffoli => {
            let mut m = UMatrix::identity(8);
            m[(6, 6)] = c(0.0, 0.0);
            m[(7, 7)] = c(0.0, 0.0);
            m[(6, 7)] = c(1.0, 0.0);
            m[(7, 6)] = c(1.0, 0.0);
            m
        }
        GateName::Ms(n) => ms_gate(n, params[0])?,
    };
    Ok(m)
}

/// Diagonal phases of the MS generator in the X-eigenbasis.
///
/// Conjugating `sum_i sigma_X^i` by `H^{tensor n}` gives `sum_i sigma_Z^i`,
/// whose eigenvalue on basis state `z` is `n - 2*weight(z)`; the squared
/// generator is then diagonal with entries `(n - 2*weight(z))^2`.
pub fn ms_generator_phases(n: usize, theta: f64) -> Vec<f64> {
    (0..1usize << n)
        .map(|z| {
            let w = z.count_ones() as f64;
            let lambda = n as f64 - 2.0 * w;
            theta * lambda * lambda / 4.0
        })
        .collect()
}

/// `MS(theta) = exp(i theta (sum_i sigma_X^i)^2 / 4)`, computed exactly by
/// diagonalizing the generator in the X basis.
pub fn ms_gate(n: usize, theta: f64) -> Result<UMatrix, QnumError> {
    if n == 0 {
        return Err(QnumError::UnknownGate("MS0".into()));
    }
    if n > 6 {
        return Err(QnumError::WidthOverflow {
            requested: n,
            max: 6,
        });
    }
    let h1 = gate_matrix(GateName::H, &[])?;
    let mut hn = UMatrix::identity(1);
    for _ in 0..n {
        hn = hn.kron(&h1)?;
    }
    let phases = ms_generator_phases(n, theta);
    let dim = 1usize << n;
    let diag = UMatrix::from_fn(dim, |r, c_| {
        if r == c_ {
            Complex64::from_polar(1.0, phases[r])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(hn.mul(&diag).mul(&hn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::{controlled, Polarity, EQ_TOL, NORM_TOL};

    #[test]
    fn hadamard_matches_table() {
        let h = gate_matrix(GateName::H, &[]).unwrap();
        let s = FRAC_1_SQRT_2;
        assert!((h[(0, 0)].re - s).abs() < EQ_TOL);
        assert!((h[(1, 1)].re + s).abs() < EQ_TOL);
        assert!(h.is_unitary(NORM_TOL));
    }

    #[test]
    fn rz_zero_is_identity() {
        let rz = gate_matrix(GateName::Rz, &[0.0]).unwrap();
        rz.assert_close(&UMatrix::identity(2), EQ_TOL);
    }

    #[test]
    fn cnot_permutes_upper_block() {
        // |10> <-> |11>, |0x> fixed
        let cnot = gate_matrix(GateName::Cnot, &[]).unwrap();
        for (input, output) in [(0usize, 0usize), (1, 1), (2, 3), (3, 2)] {
            assert!((cnot[(output, input)].re - 1.0).abs() < EQ_TOL);
        }
    }

    #[test]
    fn swap_sends_xy_to_yx() {
        let swap = gate_matrix(GateName::Swap, &[]).unwrap();
        for x in 0..2usize {
            for y in 0..2usize {
                let input = (x << 1) | y;
                let output = (y << 1) | x;
                assert!((swap[(output, input)].re - 1.0).abs() < EQ_TOL);
            }
        }
    }

    #[test]
    fn toffoli_is_controlled_cnot() {
        let cnot = gate_matrix(GateName::Cnot, &[]).unwrap();
        let ccx = controlled(&cnot, Polarity::Positive).unwrap();
        let toffoli = gate_matrix(GateName::Toffoli, &[]).unwrap();
        ccx.assert_close(&toffoli, EQ_TOL);
        // |xy> (x) |z| -> |xy> (x) |z xor (x and y)> on all 8 basis states
        for x in 0..2usize {
            for y in 0..2usize {
                for z in 0..2usize {
                    let input = (x << 2) | (y << 1) | z;
                    let output = (x << 2) | (y << 1) | (z ^ (x & y));
                    assert!((ccx[(output, input)].re - 1.0).abs() < EQ_TOL);
                }
            }
        }
    }

    #[test]
    fn controlled_x_is_cnot() {
        let x = gate_matrix(GateName::X, &[]).unwrap();
        let cx = controlled(&x, Polarity::Positive).unwrap();
        cx.assert_close(&gate_matrix(GateName::Cnot, &[]).unwrap(), EQ_TOL);
    }

    #[test]
    fn controlled_identity_is_identity() {
        let id = UMatrix::identity(2);
        controlled(&id, Polarity::Positive)
            .unwrap()
            .assert_close(&UMatrix::identity(4), EQ_TOL);
    }

    #[test]
    fn wrong_param_count_rejected() {
        assert!(matches!(
            gate_matrix(GateName::H, &[0.1]),
            Err(QnumError::WrongParamCount { .. })
        ));
        assert!(matches!(
            gate_matrix(GateName::Rz, &[]),
            Err(QnumError::WrongParamCount { .. })
        ));
    }

    #[test]
    fn unknown_gate_name_rejected() {
        assert!(matches!(
            "QFT".parse::<GateName>(),
            Err(QnumError::UnknownGate(_))
        ));
    }

    #[test]
    fn ms_zero_angle_is_identity() {
        for n in 1..=3 {
            ms_gate(n, 0.0)
                .unwrap()
                .assert_close(&UMatrix::identity(1 << n), 1e-10);
        }
    }

    #[test]
    fn ms_single_qubit_is_global_phase() {
        // X^2 = I, so the generator is theta/4 * I.
        let theta = 1.234;
        let ms = ms_gate(1, theta).unwrap();
        let expected = UMatrix::identity(2).scale(Complex64::from_polar(1.0, theta / 4.0));
        ms.assert_close(&expected, 1e-10);
    }

    #[test]
    fn ms_inverse_property() {
        let theta = 0.731;
        let prod = ms_gate(2, theta).unwrap().mul(&ms_gate(2, -theta).unwrap());
        prod.assert_close(&UMatrix::identity(4), 1e-10);
    }
}
