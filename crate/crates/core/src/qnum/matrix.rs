use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use super::{check_finite, log2_exact, Amplitude, QnumError, DEFAULT_MAX_QUBITS, NORM_TOL};

/// Dense square matrix over `2^n`-dimensional space, row-major.
#[derive(Clone, PartialEq)]
pub struct UMatrix {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl UMatrix {
    pub fn zero(dim: usize) -> Self {
        UMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major list of entries; must be square over a
    /// power-of-two dimension with finite entries.
    pub fn from_rows(dim: usize, entries: Vec<Amplitude>) -> Result<Self, QnumError> {
        if entries.len() != dim * dim {
            return Err(QnumError::DimensionMismatch {
                dim: entries.len(),
                targets: dim,
            });
        }
        log2_exact(dim)?;
        check_finite(&entries)?;
        Ok(UMatrix { dim, entries })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Amplitude) -> Self {
        let mut m = Self::zero(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        log2_exact(self.dim).expect("dimension is a power of two by construction")
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[Amplitude] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    pub fn column(&self, c: usize) -> Vec<Amplitude> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn dagger(&self) -> UMatrix {
        UMatrix::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, rhs: &UMatrix) -> UMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = UMatrix::zero(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Amplitude]) -> Vec<Amplitude> {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for r in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..n {
                acc += self[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    pub fn scale(&self, s: Amplitude) -> UMatrix {
        UMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn add(&self, rhs: &UMatrix) -> UMatrix {
        assert_eq!(self.dim, rhs.dim);
        UMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &UMatrix) -> UMatrix {
        assert_eq!(self.dim, rhs.dim);
        UMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Kronecker product; the left operand occupies the high bits.
    pub fn kron(&self, rhs: &UMatrix) -> Result<UMatrix, QnumError> {
        self.kron_within(rhs, DEFAULT_MAX_QUBITS)
    }

    pub fn kron_within(&self, rhs: &UMatrix, max_qubits: usize) -> Result<UMatrix, QnumError> {
        let n = self.n_qubits() + rhs.n_qubits();
        if n > max_qubits {
            return Err(QnumError::WidthOverflow {
                requested: n,
                max: max_qubits,
            });
        }
        let (da, db) = (self.dim, rhs.dim);
        let mut out = UMatrix::zero(da * db);
        for ra in 0..da {
            for ca in 0..da {
                let a = self[(ra, ca)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for rb in 0..db {
                    for cb in 0..db {
                        out[(ra * db + rb, ca * db + cb)] = a * rhs[(rb, cb)];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, rhs: &UMatrix) -> f64 {
        self.sub(rhs).frobenius_norm()
    }

    pub fn trace(&self) -> Amplitude {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Deviation `||U^dag U - I||_F` from unitarity.
    pub fn unitarity_deviation(&self) -> f64 {
        self.dagger().mul(self).distance(&UMatrix::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn check_unitary(&self, tol: f64) -> Result<(), QnumError> {
        let deviation = self.unitarity_deviation();
        if deviation <= tol {
            Ok(())
        } else {
            Err(QnumError::NotUnitary { deviation })
        }
    }

    /// Frobenius distance after optimal global-phase alignment:
    /// `min_phi ||A - e^{i phi} B||_F`, with `phi = arg(Tr(A^dag B))`.
    pub fn global_phase_distance(&self, rhs: &UMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        let t = self.dagger().mul(rhs).trace();
        let phase = if t.norm() <= f64::EPSILON {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, -t.arg())
        };
        self.sub(&rhs.scale(phase)).distance(&UMatrix::zero(self.dim))
    }

    pub fn global_phase_eq(&self, rhs: &UMatrix, tol: f64) -> bool {
        self.dim == rhs.dim && self.global_phase_distance(rhs) <= tol
    }

    /// Haar-ish random unitary: Gram-Schmidt orthonormalization of a matrix
    /// of standard complex Gaussians. Independent of the Householder path.
    pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> UMatrix {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut col: Vec<Complex64> = (0..dim)
                .map(|_| {
                    let u1: f64 = rng.random::<f64>().max(1e-300);
                    let u2: f64 = rng.random();
                    let mag = (-2.0 * u1.ln()).sqrt();
                    Complex64::new(mag * (2.0 * PI * u2).cos(), mag * (2.0 * PI * u2).sin())
                })
                .collect();
            // modified Gram-Schmidt against previous columns
            for prev in &cols {
                let dot: Complex64 = prev.iter().zip(&col).map(|(p, c)| p.conj() * c).sum();
                for (c, p) in col.iter_mut().zip(prev) {
                    *c -= dot * p;
                }
            }
            let norm: f64 = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for c in col.iter_mut() {
                *c /= norm;
            }
            cols.push(col);
        }
        UMatrix::from_fn(dim, |r, c| cols[c][r])
    }

    pub fn assert_close(&self, rhs: &UMatrix, tol: f64) {
        let d = self.distance(rhs);
        assert!(
            d <= tol,
            "matrices differ by {d:.3e} (tol {tol:.1e})\nlhs =\n{self}\nrhs =\n{rhs}"
        );
    }
}

impl std::ops::Index<(usize, usize)> for UMatrix {
    type Output = Amplitude;
    fn index(&self, (r, c): (usize, usize)) -> &Amplitude {
        &self.entries[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for UMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Amplitude {
        &mut self.entries[r * self.dim + c]
    }
}

impl fmt::Debug for UMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UMatrix(dim={})", self.dim)
    }
}

impl fmt::Display for UMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            for c in 0..self.dim {
                let e = self[(r, c)];
                write!(f, "{:>7.3}{:+.3}i ", e.re, e.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Positive control is `block-diag(I, U)`; negative control `block-diag(U, I)`.
/// The control qubit is the new highest-order wire.
pub fn controlled(u: &UMatrix, polarity: super::Polarity) -> Result<UMatrix, QnumError> {
    u.check_unitary(NORM_TOL)?;
    let d = u.dim();
    let mut out = UMatrix::identity(2 * d);
    let offset = match polarity {
        super::Polarity::Positive => d,
        super::Polarity::Negative => 0,
    };
    for r in 0..d {
        for c in 0..d {
            out[(offset + r, offset + c)] = u[(r, c)];
        }
    }
    Ok(out)
}
