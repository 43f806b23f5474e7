//! Seeded generators for the two-sample simulation designs.
//!
//! Mean designs draw both populations from `N_p(μ, Σ0)` with `Σ0 = Ω0⁻¹` for
//! a sparse or dense precision matrix `Ω0`; the alternative plants `n0`
//! equal shifts in `μ02`. Covariance designs draw zero-mean data from `Σ01`
//! (sparse block-style or dense alternating-sign) and `Σ02 = Σ01 + U`, with
//! `U` either five random lower-triangular bumps or a rank-one `u·uᵀ`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::linalg::{cholesky, cholesky_solve_identity, factor_unchecked};
use crate::numeric::{sample_mvn, SampleMatrix, SquareMatrix};

/// Signal magnitudes for rare mean signals.
pub const MEAN_H1R_GRID: [f64; 10] = [0.2, 0.25, 0.3, 0.35, 0.4, 0.5, 0.6, 0.8, 1.0, 1.5];
/// Signal magnitudes for many mean signals.
pub const MEAN_H1M_GRID: [f64; 10] = [0.025, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6];
/// Upper bounds `ρ` of the uniform bumps for rare covariance signals.
pub const COV_H1R_GRID: [f64; 6] = [0.5, 0.8, 1.5, 3.0, 6.0, 15.0];
/// Upper bounds `ρ` of the uniform loadings for many covariance signals.
pub const COV_H1M_GRID: [f64; 6] = [0.2, 0.3, 0.5, 0.7, 1.0, 1.5];

/// Number of planted mean shifts under rare signals.
pub const RARE_MEAN_SIGNALS: usize = 5;
/// Number of planted covariance bumps under rare signals.
pub const RARE_COV_SIGNALS: usize = 5;

const SPARSE_OMEGA_FRACTION: f64 = 0.01;
const DENSE_OMEGA_FRACTION: f64 = 0.40;
const OMEGA_ENTRY: f64 = 0.3;
const OMEGA_RIDGE: f64 = 1e-3;
const SPARSE_SIGMA_FRACTION: f64 = 0.05;
const SPARSE_SIGMA_ENTRY: f64 = 0.5;
const SIGMA_RIDGE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    MeanH0,
    MeanH1R,
    MeanH1M,
    CovH0,
    CovH1R,
    CovH1M,
}

impl ScenarioKind {
    pub fn is_mean(self) -> bool {
        matches!(self, Self::MeanH0 | Self::MeanH1R | Self::MeanH1M)
    }

    pub fn is_null(self) -> bool {
        matches!(self, Self::MeanH0 | Self::CovH0)
    }

    /// The null design of the same family.
    pub fn null(self) -> Self {
        if self.is_mean() {
            Self::MeanH0
        } else {
            Self::CovH0
        }
    }

    pub fn family(self) -> &'static str {
        if self.is_mean() {
            "mean"
        } else {
            "covariance"
        }
    }

    fn slug(self) -> &'static str {
        match self {
            Self::MeanH0 => "mean-h0",
            Self::MeanH1R => "mean-h1r",
            Self::MeanH1M => "mean-h1m",
            Self::CovH0 => "cov-h0",
            Self::CovH1R => "cov-h1r",
            Self::CovH1M => "cov-h1m",
        }
    }

    const ALL: [Self; 6] = [Self::MeanH0, Self::MeanH1R, Self::MeanH1M, Self::CovH0, Self::CovH1R, Self::CovH1M];
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.slug() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario kind '{s}'")))
    }
}

/// Sparse or dense base matrix: the precision `Ω0` for mean designs, the
/// covariance `Σ01` for covariance designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Structure {
    Sparse,
    Dense,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sparse => "sparse",
            Self::Dense => "dense",
        })
    }
}

impl FromStr for Structure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse" => Ok(Self::Sparse),
            "dense" => Ok(Self::Dense),
            _ => Err(Error::Config(format!("unknown structure '{s}' (expected sparse or dense)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    /// Observations per population.
    pub n: usize,
    pub p: usize,
    /// `μ` for mean designs, `ρ` for covariance designs; ignored under H0.
    pub signal: f64,
    pub structure: Structure,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::Config(format!("p must be at least 2, got {}", self.p)));
        }
        if self.n < 4 {
            return Err(Error::Config(format!("n must be at least 4, got {}", self.n)));
        }
        if !self.kind.is_null() && !(self.signal > 0.0 && self.signal.is_finite()) {
            return Err(Error::Config(format!("signal must be positive for {}, got {}", self.kind, self.signal)));
        }
        if self.kind == ScenarioKind::MeanH1R && self.p < RARE_MEAN_SIGNALS {
            return Err(Error::Config(format!("{} needs p ≥ {RARE_MEAN_SIGNALS}", self.kind)));
        }
        Ok(())
    }

    /// Number of planted mean shifts.
    pub fn signal_count(&self) -> usize {
        match self.kind {
            ScenarioKind::MeanH1R => RARE_MEAN_SIGNALS,
            ScenarioKind::MeanH1M => self.p / 2,
            ScenarioKind::CovH1R => RARE_COV_SIGNALS,
            ScenarioKind::CovH1M => self.p * (self.p + 1) / 2,
            ScenarioKind::MeanH0 | ScenarioKind::CovH0 => 0,
        }
    }

    pub fn with_kind(&self, kind: ScenarioKind) -> Self {
        Self { kind, ..*self }
    }

    pub fn preset_name(&self) -> String {
        format!("{}-{}", self.kind, self.structure)
    }

    /// Flat `key = value` form, one pair per line.
    pub fn to_config_string(&self) -> String {
        format!(
            "kind = {}\nstructure = {}\nn = {}\np = {}\nsignal = {}\nseed = {}\n",
            self.kind, self.structure, self.n, self.p, self.signal, self.seed
        )
    }

    /// Parses the `key = value` form. Blank lines and `#` comments are
    /// ignored; `preset` may stand in for `kind` and `structure`, and later
    /// keys override earlier ones.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut spec: Option<Self> = None;
        let mut pending: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k == "preset" {
                spec = Some(preset(&v)?);
            } else {
                pending.push((k, v));
            }
        }
        let mut s = spec.unwrap_or_else(|| preset("mean-h1r-sparse").expect("built-in preset"));
        for (k, v) in pending {
            let bad = |e: &dyn fmt::Display| Error::Config(format!("{k}: {e}"));
            match k.as_str() {
                "kind" => s.kind = v.parse()?,
                "structure" => s.structure = v.parse()?,
                "n" => s.n = v.parse().map_err(|e| bad(&e))?,
                "p" => s.p = v.parse().map_err(|e| bad(&e))?,
                "signal" => s.signal = v.parse().map_err(|e| bad(&e))?,
                "seed" => s.seed = v.parse().map_err(|e| bad(&e))?,
                _ => return Err(Error::Config(format!("unknown key '{k}'"))),
            }
        }
        s.validate()?;
        Ok(s)
    }
}

/// Named designs such as `mean-h1r-sparse` or `cov-h1m-dense`, with
/// `n = p = 100`, the largest grid signal and seed 0.
pub fn preset(name: &str) -> Result<ScenarioSpec> {
    let (kind, structure) = name
        .rsplit_once('-')
        .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?;
    let kind: ScenarioKind = kind.parse().map_err(|_| Error::Config(format!("unknown preset '{name}'")))?;
    let structure: Structure = structure.parse().map_err(|_| Error::Config(format!("unknown preset '{name}'")))?;
    let signal = match kind {
        ScenarioKind::MeanH1R => MEAN_H1R_GRID[MEAN_H1R_GRID.len() - 1],
        ScenarioKind::MeanH1M => MEAN_H1M_GRID[MEAN_H1M_GRID.len() - 1],
        ScenarioKind::CovH1R => COV_H1R_GRID[COV_H1R_GRID.len() - 1],
        ScenarioKind::CovH1M => COV_H1M_GRID[COV_H1M_GRID.len() - 1],
        ScenarioKind::MeanH0 | ScenarioKind::CovH0 => 0.0,
    };
    Ok(ScenarioSpec { kind, n: 100, p: 100, signal, structure, seed: 0 })
}

pub fn preset_names() -> Vec<String> {
    let mut out = Vec::new();
    for k in ScenarioKind::ALL {
        for s in [Structure::Sparse, Structure::Dense] {
            out.push(format!("{k}-{s}"));
        }
    }
    out
}

/// The signal grid used for a kind's figures; empty for null kinds.
pub fn signal_grid(kind: ScenarioKind) -> &'static [f64] {
    match kind {
        ScenarioKind::MeanH1R => &MEAN_H1R_GRID,
        ScenarioKind::MeanH1M => &MEAN_H1M_GRID,
        ScenarioKind::CovH1R => &COV_H1R_GRID,
        ScenarioKind::CovH1M => &COV_H1M_GRID,
        ScenarioKind::MeanH0 | ScenarioKind::CovH0 => &[],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanTruth {
    pub omega: SquareMatrix<f64>,
    pub sigma: SquareMatrix<f64>,
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    /// Sorted planted coordinates.
    pub support: Vec<usize>,
    /// Ridge added to `Ω0` to make it positive definite, if one was needed.
    pub ridge: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovTruth {
    pub sigma1: SquareMatrix<f64>,
    pub sigma2: SquareMatrix<f64>,
    /// The symmetric signal matrix `U` (zero under H0).
    pub signal_matrix: SquareMatrix<f64>,
    /// Planted lower-triangular positions `(row ≥ col)`.
    pub support: Vec<(usize, usize)>,
    /// Ridge `δ1` added to both matrices, if one was needed.
    pub ridge: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GroundTruth {
    Mean(MeanTruth),
    Cov(CovTruth),
}

/// Maps a linear index over the strictly lower triangle to `(row, col)`.
fn strict_lower_position(t: usize) -> (usize, usize) {
    let mut row = 1;
    let mut start = 0;
    while start + row <= t {
        start += row;
        row += 1;
    }
    (row, t - start)
}

/// Maps a linear index over the lower triangle (diagonal included).
fn lower_position(t: usize) -> (usize, usize) {
    let mut row = 0;
    let mut start = 0;
    while start + row < t {
        row += 1;
        start += row;
    }
    (row, t - start)
}

/// Symmetric matrix with `fraction` of its off-diagonal positions, chosen
/// uniformly from the strict lower triangle and mirrored, set to `value`.
fn planted_symmetric<R: Rng + ?Sized>(rng: &mut R, p: usize, diag: f64, fraction: f64, value: f64) -> SquareMatrix<f64> {
    let total = p * (p - 1) / 2;
    let k = ((fraction * total as f64).round() as usize).min(total);
    let mut m = SquareMatrix::zeros(p);
    for i in 0..p {
        m.set(i, i, diag);
    }
    let mut picks: Vec<usize> = index::sample(rng, total, k).into_vec();
    picks.sort_unstable();
    for t in picks {
        let (i, j) = strict_lower_position(t);
        m.set(i, j, value);
        m.set(j, i, value);
    }
    m
}

pub fn build_mean_truth<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<MeanTruth> {
    if !spec.kind.is_mean() {
        return Err(Error::InvalidInput(format!("{} is not a mean design", spec.kind)));
    }
    spec.validate()?;
    let p = spec.p;
    let fraction = match spec.structure {
        Structure::Sparse => SPARSE_OMEGA_FRACTION,
        Structure::Dense => DENSE_OMEGA_FRACTION,
    };
    let mut omega = planted_symmetric(rng, p, 1.0, fraction, OMEGA_ENTRY);
    let mut ridge = None;
    let lambda = smallest_eigenvalue(&omega)?;
    if lambda <= 0.0 || factor_unchecked(&omega).is_err() {
        let shift = -lambda + OMEGA_RIDGE;
        omega = omega.add_diagonal(shift);
        ridge = Some(shift);
    }
    let sigma = cholesky_solve_identity(&omega)
        .map_err(|e| Error::Numerical(format!("inverting the corrected precision matrix failed: {e}")))?;

    let mu1 = vec![0.0; p];
    let mut mu2 = vec![0.0; p];
    let count = spec.signal_count();
    let mut support: Vec<usize> = if count > 0 { index::sample(rng, p, count).into_vec() } else { Vec::new() };
    support.sort_unstable();
    for &j in &support {
        mu2[j] = spec.signal;
    }
    Ok(MeanTruth { omega, sigma, mu1, mu2, support, ridge })
}

fn sparse_sigma<R: Rng + ?Sized>(rng: &mut R, p: usize) -> Result<SquareMatrix<f64>> {
    let delta1 = planted_symmetric(rng, p, 0.0, SPARSE_SIGMA_FRACTION, SPARSE_SIGMA_ENTRY);
    let shift = smallest_eigenvalue(&delta1)?.abs() + SIGMA_RIDGE;
    let delta = delta1.add_diagonal(shift);
    let d: Vec<f64> = (0..p).map(|_| rng.random_range(0.5..2.5_f64).sqrt()).collect();
    Ok(SquareMatrix::from_fn(p, |i, j| d[i] * delta.get(i, j) * d[j]))
}

/// `δ_ij = (−1)^{i+j} · 0.4^{|i−j|^{1/10}}`.
pub fn dense_delta(p: usize) -> SquareMatrix<f64> {
    SquareMatrix::from_fn(p, |i, j| {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        let lag = i.abs_diff(j) as f64;
        sign * 0.4_f64.powf(lag.powf(0.1))
    })
}

fn dense_sigma<R: Rng + ?Sized>(rng: &mut R, p: usize) -> SquareMatrix<f64> {
    let o: Vec<f64> = (0..p).map(|_| rng.random_range(1.0..5.0_f64)).collect();
    let delta = dense_delta(p);
    SquareMatrix::from_fn(p, |i, j| o[i] * delta.get(i, j) * o[j])
}

pub fn build_cov_truth<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<CovTruth> {
    if spec.kind.is_mean() {
        return Err(Error::InvalidInput(format!("{} is not a covariance design", spec.kind)));
    }
    spec.validate()?;
    let p = spec.p;
    let mut sigma1 = match spec.structure {
        Structure::Sparse => sparse_sigma(rng, p)?,
        Structure::Dense => dense_sigma(rng, p),
    };
    let mut u = SquareMatrix::zeros(p);
    let mut support = Vec::new();
    match spec.kind {
        ScenarioKind::CovH1R => {
            let total = p * (p + 1) / 2;
            let mut picks = index::sample(rng, total, RARE_COV_SIGNALS.min(total)).into_vec();
            picks.sort_unstable();
            for t in picks {
                let (i, j) = lower_position(t);
                let v = rng.random_range(0.0..spec.signal);
                u.set(i, j, v);
                u.set(j, i, v);
                support.push((i, j));
            }
        }
        ScenarioKind::CovH1M => {
            let loadings: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..spec.signal)).collect();
            u = SquareMatrix::from_fn(p, |i, j| loadings[i] * loadings[j]);
            support = (0..p).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
        }
        _ => {}
    }
    let mut sigma2 = if spec.kind == ScenarioKind::CovH0 { sigma1.clone() } else { sigma1.add(&u) };

    let mut ridge = None;
    if factor_unchecked(&sigma1).is_err() || factor_unchecked(&sigma2).is_err() {
        let low = smallest_eigenvalue(&sigma1)?.min(smallest_eigenvalue(&sigma2)?);
        let shift = low.abs() + SIGMA_RIDGE;
        sigma1 = sigma1.add_diagonal(shift);
        sigma2 = sigma2.add_diagonal(shift);
        ridge = Some(shift);
    }
    Ok(CovTruth { sigma1, sigma2, signal_matrix: u, support, ridge })
}

pub fn build_truth<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<GroundTruth> {
    if spec.kind.is_mean() {
        build_mean_truth(spec, rng).map(GroundTruth::Mean)
    } else {
        build_cov_truth(spec, rng).map(GroundTruth::Cov)
    }
}

/// Draws `n` rows per population from the truth, `x` from `rng_x` and `y`
/// from `rng_y`.
pub fn generate_dataset<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    truth: &GroundTruth,
    n: usize,
    rng_x: &mut R1,
    rng_y: &mut R2,
) -> Result<(SampleMatrix<f64>, SampleMatrix<f64>)> {
    match truth {
        GroundTruth::Mean(t) => {
            let chol = cholesky(&t.sigma)?;
            Ok((sample_mvn(rng_x, &t.mu1, &chol, n)?, sample_mvn(rng_y, &t.mu2, &chol, n)?))
        }
        GroundTruth::Cov(t) => {
            let zero = vec![0.0; t.sigma1.dim()];
            let x = sample_mvn(rng_x, &zero, &cholesky(&t.sigma1)?, n)?;
            let y = sample_mvn(rng_y, &zero, &cholesky(&t.sigma2)?, n)?;
            Ok((x, y))
        }
    }
}

const EIGEN_MAX_ITER: usize = 200;

/// Smallest eigenvalue of a symmetric matrix.
///
/// Bisection on the shift `s`, using the fact that `m − s·I` has a Cholesky
/// factorization exactly when `s < λ_min`. The bracket starts from the
/// Gershgorin lower bound and the smallest diagonal entry.
pub fn smallest_eigenvalue(m: &SquareMatrix<f64>) -> Result<f64> {
    let p = m.dim();
    if p == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let scale = m.max_abs().max(1.0);
    if !m.is_symmetric(1e-10 * scale) {
        return Err(Error::InvalidInput("smallest_eigenvalue needs a symmetric matrix".into()));
    }
    if m.as_row_major().iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..p {
        let radius: f64 = (0..p).filter(|&j| j != i).map(|j| m.get(i, j).abs()).sum();
        lo = lo.min(m.get(i, i) - radius);
        hi = hi.min(m.get(i, i));
    }
    // below the Gershgorin bound the shifted matrix is strictly diagonally dominant
    lo -= 1e-12 * scale;
    let tol = 1e-14 * scale;
    for _ in 0..EIGEN_MAX_ITER {
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if factor_unchecked(&m.add_diagonal(-mid)).is_ok() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numerical(format!(
        "eigenvalue bisection did not converge in {EIGEN_MAX_ITER} steps (bracket [{lo}, {hi}])"
    )))
}
