#![allow(clippy::needless_range_loop)]

use super::matrix::SquareMatrix;
use super::Real;
use crate::error::{Error, Result};

/// Lower-triangular `L` with `L·Lᵀ` equal to the factored matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor<T>(SquareMatrix<T>);

impl<T: Real> CholeskyFactor<T> {
    pub fn lower(&self) -> &SquareMatrix<T> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Wraps a matrix already known to be lower triangular.
    pub fn from_lower(l: SquareMatrix<T>) -> Result<Self> {
        let d = l.dim();
        for i in 0..d {
            for j in i + 1..d {
                if l.get(i, j) != T::zero() {
                    return Err(Error::InvalidInput(format!("entry ({i},{j}) above the diagonal is non-zero")));
                }
            }
        }
        Ok(Self(l))
    }

    /// `L · Lᵀ`.
    pub fn reconstruct(&self) -> SquareMatrix<T> {
        self.0.matmul(&self.0.transpose())
    }

    /// Solves `L·Lᵀ·x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let l = &self.0;
        let d = l.dim();
        for i in 0..d {
            let mut s = b[i];
            for k in 0..i {
                s = s - l.get(i, k) * b[k];
            }
            b[i] = s / l.get(i, i);
        }
        for i in (0..d).rev() {
            let mut s = b[i];
            for k in i + 1..d {
                s = s - l.get(k, i) * b[k];
            }
            b[i] = s / l.get(i, i);
        }
    }
}

fn symmetry_tolerance<T: Real>(m: &SquareMatrix<T>) -> T {
    T::c(1e-10) * m.max_abs().max(T::one())
}

/// Cholesky–Banachiewicz factorization of a symmetric positive definite matrix.
pub fn cholesky<T: Real>(m: &SquareMatrix<T>) -> Result<CholeskyFactor<T>> {
    if !m.is_symmetric(symmetry_tolerance(m)) {
        return Err(Error::InvalidInput("cholesky input is not symmetric".into()));
    }
    factor_unchecked(m)
}

pub(crate) fn factor_unchecked<T: Real>(m: &SquareMatrix<T>) -> Result<CholeskyFactor<T>> {
    let d = m.dim();
    let mut l = SquareMatrix::zeros(d);
    for i in 0..d {
        for j in 0..=i {
            let mut s = m.get(i, j);
            let (li, lj) = (l.row(i), l.row(j));
            for k in 0..j {
                s = s - li[k] * lj[k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: s.to_f64_lossy() });
                }
                l.set(i, i, s.sqrt());
            } else {
                let v = s / l.get(j, j);
                l.set(i, j, v);
            }
        }
    }
    Ok(CholeskyFactor(l))
}

/// Whether `m` admits a Cholesky factorization.
pub fn is_positive_definite<T: Real>(m: &SquareMatrix<T>) -> bool {
    factor_unchecked(m).is_ok()
}

/// Inverse of a symmetric positive definite matrix, column by column from
/// its Cholesky factor, symmetrized.
pub fn cholesky_solve_identity<T: Real>(m: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
    let f = cholesky(m)?;
    let d = m.dim();
    let mut inv = SquareMatrix::zeros(d);
    let mut e = vec![T::zero(); d];
    for j in 0..d {
        e.iter_mut().for_each(|v| *v = T::zero());
        e[j] = T::one();
        f.solve_in_place(&mut e);
        for i in 0..d {
            inv.set(i, j, e[i]);
        }
    }
    Ok(inv.symmetrized())
}
