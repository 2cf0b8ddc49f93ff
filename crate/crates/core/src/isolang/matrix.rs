//! Matrix interpretation of isos over the canonical value basis.

use super::ast::{AmpValue, Iso, IsoType, Pattern};
use super::check::IsoEnv;
use super::eval::apply_quantum;
use super::IsoError;
use crate::qnum::UMatrix;

/// Hard cap on the interpreted dimension.
pub const MAX_DIM: usize = 1 << 12;

/// Canonical basis: `() < inl _ < inr _`, pairs lexicographic with the left
/// component major, `fold` transparent. Mu-types are unrolled to the given
/// depth (a finite-dimensional truncation).
pub fn enumerate_basis(ty: &IsoType, depth: usize) -> Result<Vec<Pattern>, IsoError> {
    let mut out = Vec::new();
    enumerate_into(ty, depth, &mut out)?;
    Ok(out)
}

fn enumerate_into(
    ty: &IsoType,
    depth: usize,
    out: &mut Vec<Pattern>,
) -> Result<(), IsoError> {
    if out.len() > MAX_DIM {
        return Err(IsoError::Budget { dim: out.len() });
    }
    match ty {
        IsoType::Var(x) => Err(IsoError::Check(format!(
            "cannot enumerate the abstract type `{x}`"
        ))),
        IsoType::One => {
            out.push(Pattern::Unit);
            Ok(())
        }
        IsoType::Sum(a, b) => {
            let mut left = Vec::new();
            enumerate_into(a, depth, &mut left)?;
            out.extend(left.into_iter().map(Pattern::inl));
            let mut right = Vec::new();
            enumerate_into(b, depth, &mut right)?;
            out.extend(right.into_iter().map(Pattern::inr));
            Ok(())
        }
        IsoType::Tensor(a, b) => {
            let mut left = Vec::new();
            enumerate_into(a, depth, &mut left)?;
            let mut right = Vec::new();
            enumerate_into(b, depth, &mut right)?;
            for v in &left {
                for w in &right {
                    out.push(Pattern::pair(v.clone(), w.clone()));
                    if out.len() > MAX_DIM {
                        return Err(IsoError::Budget { dim: out.len() });
                    }
                }
            }
            Ok(())
        }
        IsoType::Mu(_, _) => {
            if depth == 0 {
                return Ok(()); // truncation: no deeper values
            }
            let unrolled = ty.unroll().expect("mu unrolls");
            let mut inner = Vec::new();
            enumerate_into(&unrolled, depth - 1, &mut inner)?;
            out.extend(inner.into_iter().map(Pattern::fold));
            Ok(())
        }
    }
}

/// Column-by-column matrix of a (checked) iso at the given truncation
/// depth: column `j` is the image of the `j`-th basis value.
pub fn to_matrix(iso: &Iso, env: &IsoEnv, depth: usize) -> Result<UMatrix, IsoError> {
    let lhs_basis = enumerate_basis(&iso.lhs_ty, depth)?;
    let rhs_basis = enumerate_basis(&iso.rhs_ty, depth)?;
    let dim = lhs_basis.len();
    if dim != rhs_basis.len() {
        return Err(IsoError::Check(format!(
            "type dimensions differ under truncation: {dim} vs {}",
            rhs_basis.len()
        )));
    }
    if dim == 0 {
        return Err(IsoError::Budget { dim: 0 });
    }
    if dim > MAX_DIM {
        return Err(IsoError::Budget { dim });
    }
    // truncated dimensions need not be powers of two (lists, for instance)
    let mut m = UMatrix::zero(dim);
    for (j, basis_value) in lhs_basis.iter().enumerate() {
        let mut fuel = 1_000_000usize;
        let image = apply_quantum(iso, &AmpValue::basis(basis_value.clone()), env, &mut fuel)?;
        for (amp, value) in &image.terms {
            let row = rhs_basis
                .iter()
                .position(|v| v == value)
                .ok_or_else(|| IsoError::Eval(format!(
                    "image value `{value}` escapes the depth-{depth} truncation"
                )))?;
            m[(row, j)] = *amp;
        }
    }
    Ok(m)
}

/// The logical (unpadded) dimension of a type under truncation.
pub fn truncated_dim(ty: &IsoType, depth: usize) -> Result<usize, IsoError> {
    Ok(enumerate_basis(ty, depth)?.len())
}
