use num_complex::Complex64;

use super::{Amplitude, QnumError, UMatrix};

/// A complex Householder reflection `H = I - a |u><u|`.
///
/// With the sign convention chosen here (`u = x + e^{i arg(x_p)} e_p`) the
/// scalar `a` is real and the factor is Hermitian, unitary and self-inverse.
#[derive(Debug, Clone)]
pub struct HouseholderFactor {
    pub a: Amplitude,
    pub u: Vec<Amplitude>,
}

impl HouseholderFactor {
    pub fn identity(dim: usize) -> Self {
        HouseholderFactor {
            a: Complex64::new(0.0, 0.0),
            u: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn is_identity(&self) -> bool {
        self.a.norm() == 0.0 || self.u.iter().all(|c| c.norm_sqr() == 0.0)
    }

    /// Dense matrix `I - a |u><u|`.
    pub fn matrix(&self) -> UMatrix {
        let d = self.dim();
        let mut m = UMatrix::identity(d);
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] -= self.a * self.u[r] * self.u[c].conj();
            }
        }
        m
    }

    /// Apply the reflection to a column in place.
    pub fn apply_to(&self, col: &mut [Amplitude]) {
        if self.is_identity() {
            return;
        }
        let dot: Complex64 = self.u.iter().zip(col.iter()).map(|(u, x)| u.conj() * x).sum();
        let s = self.a * dot;
        for (x, u) in col.iter_mut().zip(&self.u) {
            *x -= s * u;
        }
    }
}

/// Build the reflection sending the active suffix of `col` (entries at
/// indices >= `pivot`) onto `phase * e_pivot`, leaving entries before the
/// pivot untouched. The active suffix must have unit norm.
///
/// If the suffix already lies on `e_pivot` (up to phase), the identity
/// reflection (`u = 0`) is returned.
pub fn householder_factor(
    col: &[Amplitude],
    pivot: usize,
) -> Result<HouseholderFactor, QnumError> {
    let dim = col.len();
    assert!(pivot < dim, "pivot out of range");
    let suffix_norm_sqr: f64 = col[pivot..].iter().map(|c| c.norm_sqr()).sum();
    if suffix_norm_sqr < 1e-24 {
        return Err(QnumError::ZeroSuffix);
    }
    let below_sqr: f64 = col[pivot + 1..].iter().map(|c| c.norm_sqr()).sum();
    if below_sqr <= 1e-24 {
        return Ok(HouseholderFactor::identity(dim));
    }

    let xp = col[pivot];
    // phase chosen to avoid cancellation: lambda = -e^{i arg(x_p)}
    let phase = if xp.norm() <= 1e-300 {
        Complex64::new(1.0, 0.0)
    } else {
        xp / xp.norm()
    };
    let mut u = vec![Complex64::new(0.0, 0.0); dim];
    u[pivot..].copy_from_slice(&col[pivot..]);
    u[pivot] += phase; // u = x - lambda e_p with lambda = -phase
    let norm_u_sqr: f64 = u.iter().map(|c| c.norm_sqr()).sum();
    // a = 1 / (u^dag x) = 1 / (1 + |x_p|), real by construction
    let a = Complex64::new(2.0 / norm_u_sqr, 0.0);
    Ok(HouseholderFactor { a, u })
}

/// Householder QR of a unitary: the sequence of reflections plus the final
/// diagonal of unimodular phases. `product(factors) * diag(phases)`
/// reconstructs the input.
#[derive(Debug, Clone)]
pub struct HouseholderDecomp {
    pub dim: usize,
    pub factors: Vec<HouseholderFactor>,
    pub diagonal_phases: Vec<f64>,
}

impl HouseholderDecomp {
    pub fn reconstruct(&self) -> UMatrix {
        let mut m = UMatrix::from_fn(self.dim, |r, c| {
            if r == c {
                Complex64::from_polar(1.0, self.diagonal_phases[r])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        for f in self.factors.iter().rev() {
            m = f.matrix().mul(&m);
        }
        m
    }
}

/// Factor a unitary by zeroing it out column by column with Householder
/// reflections. For unitary inputs the residual is diagonal with unimodular
/// entries, so only reflections and a phase vector are returned.
pub fn householder_qr(u: &UMatrix) -> Result<HouseholderDecomp, QnumError> {
    u.check_unitary(1e-8)?;
    let dim = u.dim();
    let mut work = u.clone();
    let mut factors = Vec::new();
    for k in 0..dim {
        let col = work.column(k);
        let below_sqr: f64 = col[k + 1..].iter().map(|c| c.norm_sqr()).sum();
        if below_sqr <= 1e-24 {
            continue; // already in pivot form; phase lands on the diagonal
        }
        let f = householder_factor(&col, k)?;
        // work <- F * work
        for c in 0..dim {
            let mut column = work.column(c);
            f.apply_to(&mut column);
            for (r, v) in column.into_iter().enumerate() {
                work[(r, c)] = v;
            }
        }
        factors.push(f);
    }
    let diagonal_phases = (0..dim).map(|i| work[(i, i)].arg()).collect();
    Ok(HouseholderDecomp {
        dim,
        factors,
        diagonal_phases,
    })
}
