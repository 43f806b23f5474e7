//! Numerical kernels shared by every test: column summaries, projection
//! residuals, log-gamma, Cholesky factorization and seeded normal sampling.

pub mod gamma;
pub mod linalg;
pub mod matrix;
pub mod rng;
pub mod summary;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Scalar type the kernels and Bayesian tests are generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {}
impl Real for f32 {}

pub use gamma::log_gamma;
pub use linalg::{cholesky, cholesky_solve_identity};
pub use rng::{sample_mvn, StreamKey};
pub use matrix::{SampleMatrix, SquareMatrix};
pub use summary::{column_summary, pair_regression, ColumnSummary, PairRegression};

/// Dot product with sequential left-to-right accumulation.
#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc = acc + x * y;
    }
    acc
}

#[inline]
pub fn sum_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}
