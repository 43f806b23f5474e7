//! Maximum pairwise Bayes factor (mxPBF) two-sample tests.
//!
//! The mean test compares two populations coordinate by coordinate and keeps
//! the largest log Bayes factor; the covariance test does the same over every
//! ordered column pair using a regression reparametrization of each pair.
//! Frequentist competitors, seeded simulation scenarios and a Monte Carlo
//! ROC harness sit alongside so that comparisons can be reproduced.
//!
//! The numerical kernels and both Bayesian tests are generic over the scalar
//! type; concrete `f64`/`f32` aliases are exported at the crate root. The
//! baselines, scenario generators and harness work in `f64`.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod harness;
pub mod io;
pub mod numeric;
pub mod roc;
pub mod scenarios;

pub use error::{Error, Result};
pub use numeric::Real;

pub use cov_test::{decide_cov, log_pbf_cov, mxpbf_cov, CovTestConfig, CovTestResult, PairScore};
pub use mean_test::{decide_mean, log_pbf_mean, mxpbf_mean, MeanTestConfig, MeanTestResult};
pub use numeric::matrix::{SampleMatrix, SquareMatrix};

/// Outcome of comparing a test statistic against its decision threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    RejectH0,
    RetainH0,
}

impl Decision {
    pub fn rejects(self) -> bool {
        matches!(self, Decision::RejectH0)
    }
}

/// Default Bayes-factor threshold (strong evidence).
pub const DEFAULT_C_TH: f64 = 10.0;
/// Default prior dispersion exponent for both tests.
pub const DEFAULT_ALPHA: f64 = 2.01;
/// Default inverse-gamma shape and rate constants for the covariance test.
pub const DEFAULT_IG_CONST: f64 = 0.01;
/// Default significance level for the frequentist baselines.
pub const DEFAULT_LEVEL: f64 = 0.05;

pub type SampleMatrixF64 = SampleMatrix<f64>;
pub type SampleMatrixF32 = SampleMatrix<f32>;
pub type SquareMatrixF64 = SquareMatrix<f64>;
pub type MeanTestConfigF64 = MeanTestConfig<f64>;
pub type MeanTestResultF64 = MeanTestResult<f64>;
pub type CovTestConfigF64 = CovTestConfig<f64>;
pub type CovTestResultF64 = CovTestResult<f64>;
pub type MeanTestConfigF32 = MeanTestConfig<f32>;
pub type MeanTestResultF32 = MeanTestResult<f32>;
pub type CovTestConfigF32 = CovTestConfig<f32>;
pub type CovTestResultF32 = CovTestResult<f32>;
