use serde::{Deserialize, Serialize};

use super::Real;
use crate::error::{Error, Result};

/// An `n × p` data matrix (rows are observations) stored column-major so a
/// variable's `n` values are contiguous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMatrix<T> {
    n: usize,
    p: usize,
    values: Vec<T>,
}

impl<T: Real> SampleMatrix<T> {
    /// Builds from column-major storage.
    pub fn from_column_major(n: usize, p: usize, values: Vec<T>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::InvalidInput(format!("empty sample matrix ({n}×{p})")));
        }
        if values.len() != n * p {
            return Err(Error::InvalidInput(format!(
                "expected {} values for a {n}×{p} matrix, got {}",
                n * p,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at row {}, column {}",
                k % n + 1,
                k / n + 1
            )));
        }
        Ok(Self { n, p, values })
    }

    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput("columns have unequal lengths".into()));
        }
        Self::from_column_major(n, p, columns.concat())
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidInput("rows have unequal lengths".into()));
        }
        let mut values = Vec::with_capacity(n * p);
        for j in 0..p {
            values.extend(rows.iter().map(|r| r[j]));
        }
        Self::from_column_major(n, p, values)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[col * self.n + row]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.values.chunks_exact(self.n)
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.p).map(|j| self.get(i, j)).collect()
    }

    pub fn as_column_major(&self) -> &[T] {
        &self.values
    }

    /// Subtracts each column's mean.
    pub fn centered(&self) -> Self {
        let mut values = self.values.clone();
        let n = T::from_usize_lossy(self.n);
        for col in values.chunks_exact_mut(self.n) {
            let mean = col.iter().copied().sum::<T>() / n;
            col.iter_mut().for_each(|v| *v = *v - mean);
        }
        Self { n: self.n, p: self.p, values }
    }

    /// Reorders columns so that new column `k` is old column `perm[k]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.p);
        let mut values = Vec::with_capacity(self.values.len());
        for &j in perm {
            values.extend_from_slice(self.column(j));
        }
        Self { n: self.n, p: self.p, values }
    }

    pub fn map_column(&self, j: usize, f: impl Fn(T) -> T) -> Self {
        let mut out = self.clone();
        let n = self.n;
        out.values[j * n..(j + 1) * n].iter_mut().for_each(|v| *v = f(*v));
        out
    }

    pub fn cast<U: Real>(&self) -> SampleMatrix<U> {
        SampleMatrix {
            n: self.n,
            p: self.p,
            values: self.values.iter().map(|v| U::c(v.to_f64_lossy())).collect(),
        }
    }
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix<T> {
    dim: usize,
    values: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, values: vec![T::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                values.push(f(i, j));
            }
        }
        Self { dim, values }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        Ok(Self { dim, values: rows.concat() })
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.values[i * self.dim + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..d {
                    out.values[i * d + j] = out.values[i * d + j] + a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Returns `self + shift·I`.
    pub fn add_diagonal(&self, shift: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.set(i, i, self.get(i, i) + shift);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Averages `m` and `mᵀ` so the result is exactly symmetric.
    pub fn symmetrized(&self) -> Self {
        let half = T::c(0.5);
        Self::from_fn(self.dim, |i, j| {
            if i == j {
                self.get(i, i)
            } else {
                (self.get(i, j) + self.get(j, i)) * half
            }
        })
    }

    pub fn as_row_major(&self) -> &[T] {
        &self.values
    }
}
