use super::{dot, Real};
use crate::error::{Error, Result};

/// Mean and centered sum of squares of one column (divisor-`n` variance is
/// `css / n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnSummary<T> {
    pub mean: T,
    pub css: T,
}

impl<T: Real> ColumnSummary<T> {
    pub fn variance(&self, n: usize) -> T {
        self.css / T::from_usize_lossy(n)
    }
}

/// Two-pass mean and centered sum of squares.
pub fn column_summary<T: Real>(v: &[T]) -> Result<ColumnSummary<T>> {
    if v.is_empty() {
        return Err(Error::InvalidInput("column_summary of an empty vector".into()));
    }
    let mean = v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len());
    let css = v.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>();
    Ok(ColumnSummary { mean, css })
}

/// Least-squares regression through the origin of `vi` on `vj`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRegression<T> {
    /// Slope `⟨vi, vj⟩ / ‖vj‖²`.
    pub ahat: T,
    /// Residual mean square, divisor `n`.
    pub tauhat: T,
    /// Set when cancellation drove the residual negative and it was clamped to 0.
    pub clamped: bool,
}

pub fn pair_regression<T: Real>(vi: &[T], vj: &[T]) -> Result<PairRegression<T>> {
    if vi.len() != vj.len() || vi.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "pair_regression needs equal lengths ≥ 2, got {} and {}",
            vi.len(),
            vj.len()
        )));
    }
    let jj = dot(vj, vj);
    if jj <= T::zero() {
        return Err(Error::DegenerateRegressor);
    }
    let ij = dot(vi, vj);
    let ii = dot(vi, vi);
    let (rss, clamped) = residual_ss(ii, ij, jj);
    Ok(PairRegression {
        ahat: ij / jj,
        tauhat: rss / T::from_usize_lossy(vi.len()),
        clamped,
    })
}

/// `‖vi‖² − ⟨vi,vj⟩²/‖vj‖²` from the three inner products, clamped at zero.
#[inline]
pub(crate) fn residual_ss<T: Real>(ii: T, ij: T, jj: T) -> (T, bool) {
    let r = ii - ij * ij / jj;
    if r < T::zero() {
        (T::zero(), true)
    } else {
        (r, false)
    }
}
