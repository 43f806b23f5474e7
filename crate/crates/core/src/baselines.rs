//! Frequentist two-sample competitors.
//!
//! Mean tests: Bai–Saranadasa (BS) and Srivastava–Du (SD), both
//! standardized L2 statistics. Covariance tests: Schott's Frobenius-distance
//! statistic, the Li–Chen statistic in its plug-in (biased) form, and the
//! Cai–Liu–Xia maximum of standardized covariance differences. The L2
//! statistics are referred to the upper tail of `N(0, 1)`; the maximum
//! statistic to its type-I extreme-value limit.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::numeric::SampleMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FreqMethod {
    Bs,
    Sd,
    Schott,
    Lc,
    ClxCov,
}

impl FreqMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Bs => "bs",
            Self::Sd => "sd",
            Self::Schott => "sch",
            Self::Lc => "lc",
            Self::ClxCov => "clx",
        }
    }

    pub fn is_mean_test(self) -> bool {
        matches!(self, Self::Bs | Self::Sd)
    }

    pub fn run(self, x: &SampleMatrix<f64>, y: &SampleMatrix<f64>) -> Result<FreqTestResult> {
        match self {
            Self::Bs => bs_mean_test(x, y),
            Self::Sd => sd_mean_test(x, y),
            Self::Schott => schott_cov_test(x, y),
            Self::Lc => lc_cov_test(x, y),
            Self::ClxCov => clx_cov_test(x, y),
        }
    }
}

impl fmt::Display for FreqMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FreqMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bs" => Ok(Self::Bs),
            "sd" => Ok(Self::Sd),
            "sch" | "schott" => Ok(Self::Schott),
            "lc" => Ok(Self::Lc),
            "clx" | "clxcov" => Ok(Self::ClxCov),
            _ => Err(Error::InvalidInput(format!("unknown frequentist method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqTestResult {
    pub method: FreqMethod,
    /// Oriented so that larger values are more evidence against `H0`.
    pub statistic: f64,
    pub p_value: f64,
}

impl FreqTestResult {
    pub fn rejects(&self, level: f64) -> bool {
        self.p_value < level
    }
}

fn upper_normal_tail(z: f64) -> f64 {
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    std.sf(z).clamp(0.0, 1.0)
}

fn check_dims(x: &SampleMatrix<f64>, y: &SampleMatrix<f64>, min_rows: usize) -> Result<()> {
    if x.p() != y.p() {
        return Err(Error::InvalidInput(format!("column counts differ: {} vs {}", x.p(), y.p())));
    }
    if x.n() < min_rows || y.n() < min_rows {
        return Err(Error::InvalidInput(format!(
            "need at least {min_rows} rows per group (got {}, {})",
            x.n(),
            y.n()
        )));
    }
    Ok(())
}

/// Lower-triangle-filled symmetric Gram matrix `W·Wᵀ` of the rows of `w`,
/// accumulated column by column, row-major `n × n`.
fn row_gram(w: &SampleMatrix<f64>) -> Vec<f64> {
    let n = w.n();
    let mut g = vec![0.0; n * n];
    for col in w.columns() {
        for a in 0..n {
            let ca = col[a];
            let row = &mut g[a * n..a * n + a + 1];
            for (b, slot) in row.iter_mut().enumerate() {
                *slot += ca * col[b];
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            g[b * n + a] = g[a * n + b];
        }
    }
    g
}

/// `W1·W2ᵀ` (`n1 × n2`, row-major).
fn cross_gram(w1: &SampleMatrix<f64>, w2: &SampleMatrix<f64>) -> Vec<f64> {
    let (n1, n2) = (w1.n(), w2.n());
    let mut g = vec![0.0; n1 * n2];
    for (c1, c2) in w1.columns().zip(w2.columns()) {
        for a in 0..n1 {
            let ca = c1[a];
            for (slot, &cb) in g[a * n2..(a + 1) * n2].iter_mut().zip(c2) {
                *slot += ca * cb;
            }
        }
    }
    g
}

fn frob_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

fn stacked(a: &SampleMatrix<f64>, b: &SampleMatrix<f64>) -> SampleMatrix<f64> {
    let cols: Vec<Vec<f64>> = (0..a.p()).map(|j| [a.column(j), b.column(j)].concat()).collect();
    SampleMatrix::from_columns(&cols).expect("stacking matrices of equal width")
}

struct Pooled {
    /// Degrees of freedom `n1 + n2 − 2`.
    dof: f64,
    trace: f64,
    trace_sq: f64,
    diag: Vec<f64>,
    centered: SampleMatrix<f64>,
}

fn pooled_covariance(x: &SampleMatrix<f64>, y: &SampleMatrix<f64>) -> Pooled {
    let centered = stacked(&x.centered(), &y.centered());
    let dof = (x.n() + y.n() - 2) as f64;
    let diag: Vec<f64> = centered.columns().map(|c| c.iter().map(|v| v * v).sum::<f64>() / dof).collect();
    let trace = diag.iter().sum();
    let trace_sq = frob_sq(&row_gram(&centered)) / (dof * dof);
    Pooled { dof, trace, trace_sq, diag, centered }
}

fn mean_diff(x: &SampleMatrix<f64>, y: &SampleMatrix<f64>) -> Vec<f64> {
    let (n1, n2) = (x.n() as f64, y.n() as f64);
    x.columns()
        .zip(y.columns())
        .map(|(a, b)| a.iter().sum::<f64>() / n1 - b.iter().sum::<f64>() / n2)
        .collect()
}

/// Bai–Saranadasa: `‖X̄ − Ȳ‖²` minus its null expectation, standardized by a
/// ratio-consistent estimate of `tr Σ²`.
pub fn bs_mean_test(x: &SampleMatrix<f64>, y: &SampleMatrix<f64>) -> Result<FreqTestResult> {
    check_dims(x, y, 2)?;
    if x.n() + y.n() < 5 {
        return Err(Error::InvalidInput("BS test needs n1 + n2 − 2 ≥ 3".into()));
    }
    let (n1, n2) = (x.n() as f64, y.n() as f64);
    let pooled = pooled_covariance(x, y);
    let big_n = pooled.dof;
    let b2 = big_n * big_n / ((big_n + 2.0) * (big_n - 1.0)) * (pooled.trace_sq - pooled.trace * pooled.trace / big_n);
    if !(b2 > 0.0) {
        return Err(Error::Numerical("BS variance estimate is not positive".into()));
    }
    let d2: f64 = mean_diff(x, y).iter().map(|d| d * d).sum();
    let scale = n1 * n2 / (n1 + n2);
    let statistic = (scale * d2 - pooled.trace) / (2.0 * (big_n + 1.0) / big_n * b2).sqrt();
    Ok(FreqTestResult { method: FreqMethod::Bs, statistic, p_value: upper_normal_tail(statistic) })
}

/// Srivastava–Du: the diagonal-standardized analogue of BS, scale invariant
/// per coordinate.
pub fn sd_mean_test(x: &SampleMatrix<f64>, y: &SampleMatrix<f64>) -> Result<FreqTestResult> {
    check_dims(x, y, 2)?;
    if x.n() + y.n() < 6 {
        return Err(Error::InvalidInput("SD test needs n1 + n2 − 2 ≥ 4".into()));
    }
    let (n1, n2) = (x.n() as f64, y.n() as f64);
    let p = x.p() as f64;
    let pooled = pooled_covariance(x, y);
    if let Some(j) = pooled.diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::DegenerateColumn(j));
    }
    let big_n = pooled.dof;
    let inv_sd: Vec<f64> = pooled.diag.iter().map(|d| d.sqrt().recip()).collect();
    let standardized = SampleMatrix::from_columns(
        &pooled
            .centered
            .columns()
            .zip(&inv_sd)
            .map(|(c, s)| c.iter().map(|v| v * s).collect())
            .collect::<Vec<_>>(),
    )?;
    let tr_r2 = frob_sq(&row_gram(&standardized)) / (big_n * big_n);
    let quad: f64 = mean_diff(x, y).iter().zip(&pooled.diag).map(|(d, s)| d * d / s).sum();
    let c_pn = 1.0 + tr_r2 / p.powf(1.5);
    let var = 2.0 * (tr_r2 - p * p / big_n) * c_pn;
    if !(var > 0.0) {
        return Err(Error::Numerical("SD variance estimate is not positive".into()));
    }
    let statistic = (n1 * n2 / (n1 + n2) * quad - big_n * p / (big_n - 2.0)) / var.sqrt();
    Ok(FreqTestResult { method: FreqMethod::Sd, statistic, p_value: upper_normal_tail(statistic) })
}

/// Per-population pieces shared by the L2 covariance statistics.
struct GroupGram {
    /// Degrees of freedom `N − 1`.
    dof: f64,
    rows: f64,
    gram: Vec<f64>,
    centered: SampleMatrix<f64>,
}

impl GroupGram {
    fn new(m: &SampleMatrix<f64>) -> Self {
        let centered = m.centered();
        Self { dof: (m.n() - 1) as f64, rows: m.n() as f64, gram: row_gram(&centered), centered }
    }

    /// `tr S` with divisor `N − 1`.
    fn trace(&self) -> f64 {
        let n = self.rows as usize;
        (0..n).map(|a| self.gram[a * n + a]).sum::<f64>() / self.dof
    }

    fn trace_sq(&self) -> f64 {
        frob_sq(&self.gram) / (self.dof * self.dof)
    }
}

/// Unbiased `tr Σ²` from a sample covariance with `dof` degrees of freedom.
fn unbiased_trace_sq(trace: f64, trace_sq: f64, dof: f64) -> f64 {
    dof * dof / ((dof + 2.0) * (dof - 1.0)) * (trace_sq - trace * trace / dof)
}

/// Schott: an unbiased estimate of `tr (Σ1 − Σ2)²` divided by its null
/// standard deviation `2·tr̂Σ²·(1/n1 + 1/n2)`, `n_k` the degrees of freedom.
pub fn schott_cov_test(x: &SampleMatrix<f64>, y: &SampleMatrix<f64>) -> Result<FreqTestResult> {
    check_dims(x, y, 4)?;
    let g1 = GroupGram::new(x);
    let g2 = GroupGram::new(y);
    let (d1, d2) = (g1.dof, g2.dof);
    let cross = frob_sq(&cross_gram(&g1.centered, &g2.centered)) / (d1 * d2);
    let est1 = unbiased_trace_sq(g1.trace(), g1.trace_sq(), d1);
    let est2 = unbiased_trace_sq(g2.trace(), g2.trace_sq(), d2);
    let t = est1 + est2 - 2.0 * cross;

    let d = d1 + d2;
    let pooled_trace = (d1 * g1.trace() + d2 * g2.trace()) / d;
    // tr(S²) of the pooled covariance, with S = (d1·S1 + d2·S2)/d
    let pooled_trace_sq = (frob_sq(&g1.gram) + frob_sq(&g2.gram) + 2.0 * cross * d1 * d2) / (d * d);
    let a2 = unbiased_trace_sq(pooled_trace, pooled_trace_sq, d);
    if !(a2 > 0.0) {
        return Err(Error::Numerical("Schott variance estimate is not positive".into()));
    }
    let statistic = t / (2.0 * a2 * (1.0 / d1 + 1.0 / d2));
    Ok(FreqTestResult { method: FreqMethod::Schott, statistic, p_value: upper_normal_tail(statistic) })
}

/// The three trace estimates behind the Li–Chen statistic: `tr Σ1²`,
/// `tr Σ2²` and `tr Σ1Σ2`.
///
/// Only the leading term of each U-statistic is kept, evaluated on the data
/// as given. These are unbiased when both populations have zero mean, which
/// is the covariance model used throughout; data with nonzero means should
/// be centered first. The dropped mean-correction terms are what make the
/// full U-statistics cost more than `O(n²p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcComponents {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

fn offdiag_mean_sq(m: &SampleMatrix<f64>) -> f64 {
    let n = m.n();
    let g = row_gram(m);
    let diag: f64 = (0..n).map(|a| g[a * n + a].powi(2)).sum();
    let nf = n as f64;
    (frob_sq(&g) - diag) / (nf * (nf - 1.0))
}

pub fn lc_components(x: &SampleMatrix<f64>, y: &SampleMatrix<f64>) -> Result<LcComponents> {
    check_dims(x, y, 4)?;
    let c = frob_sq(&cross_gram(x, y)) / (x.n() as f64 * y.n() as f64);
    Ok(LcComponents { a: offdiag_mean_sq(x), b: offdiag_mean_sq(y), c })
}

/// Li–Chen, biased version: `A + B − 2C` from [`lc_components`], divided by
/// its null standard deviation `2·(1/n1 + 1/n2)·tr̂Σ²`.
pub fn lc_cov_test(x: &SampleMatrix<f64>, y: &SampleMatrix<f64>) -> Result<FreqTestResult> {
    let LcComponents { a, b, c } = lc_components(x, y)?;
    let (n1, n2) = (x.n() as f64, y.n() as f64);
    let t = a + b - 2.0 * c;
    let pooled = (n1 * a + n2 * b) / (n1 + n2);
    if !(pooled > 0.0) {
        return Err(Error::Numerical("Li–Chen variance estimate is not positive".into()));
    }
    let statistic = t / (2.0 * (1.0 / n1 + 1.0 / n2) * pooled);
    Ok(FreqTestResult { method: FreqMethod::Lc, statistic, p_value: upper_normal_tail(statistic) })
}

/// Standardized squared covariance differences for one row `i` against
/// columns `j ≤ i`; returns the row maximum (NEG_INFINITY if all skipped).
fn clx_row(i: usize, w1: &SampleMatrix<f64>, w2: &SampleMatrix<f64>) -> f64 {
    let (n1, n2) = (w1.n() as f64, w2.n() as f64);
    let mut best = f64::NEG_INFINITY;
    for j in 0..=i {
        let (s1, th1) = cov_and_var(w1.column(i), w1.column(j), n1);
        let (s2, th2) = cov_and_var(w2.column(i), w2.column(j), n2);
        let denom = th1 / n1 + th2 / n2;
        if denom > 0.0 {
            let v = (s1 - s2) * (s1 - s2) / denom;
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Sample covariance (divisor `n`) of centered columns and the empirical
/// variance of their cross-products.
#[inline]
fn cov_and_var(a: &[f64], b: &[f64], n: f64) -> (f64, f64) {
    let s = a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>() / n;
    let th = a.iter().zip(b).map(|(u, v)| (u * v - s) * (u * v - s)).sum::<f64>() / n;
    (s, th)
}

/// Cai–Liu–Xia: `M = max_{i≤j} (s1_ij − s2_ij)² / (θ̂1_ij/n1 + θ̂2_ij/n2)`,
/// with `P(M − 4 ln p + ln ln p ≤ t) → exp(−(8π)^{-1/2} e^{−t/2})`.
pub fn clx_cov_test(x: &SampleMatrix<f64>, y: &SampleMatrix<f64>) -> Result<FreqTestResult> {
    check_dims(x, y, 4)?;
    let (w1, w2) = (x.centered(), y.centered());
    let p = x.p();
    let m = (0..p)
        .into_par_iter()
        .map(|i| clx_row(i, &w1, &w2))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Err(Error::AllDegenerate);
    }
    Ok(FreqTestResult { method: FreqMethod::ClxCov, statistic: m, p_value: clx_p_value(m, p) })
}

/// Upper-tail probability of the extreme-value limit of the CLX statistic.
pub fn clx_p_value(m: f64, p: usize) -> f64 {
    let pf = p as f64;
    // ln ln p is undefined for p ≤ e; the limit is only meaningful for large p anyway
    let t = m - 4.0 * pf.ln() + pf.ln().max(f64::MIN_POSITIVE).ln();
    let rate = (8.0 * std::f64::consts::PI).sqrt().recip() * (-t / 2.0).exp();
    (-(-rate).exp_m1()).clamp(0.0, 1.0)
}
