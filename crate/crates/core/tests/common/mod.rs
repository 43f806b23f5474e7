//! Quadrature oracles for the two pairwise Bayes factors.
//!
//! Each marginal likelihood is integrated numerically from the raw
//! likelihood and prior densities: the location (mean or slope) is
//! integrated inside, the variance outside on a log scale. Only the
//! `(2π)^{-n/2}` likelihood constant and the improper `1/σ` normalization
//! are dropped, both of which are shared by numerator and denominator.

#![allow(dead_code)]

use quadrature::double_exponential::integrate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

const TARGET: f64 = 1e-14;
/// Half-width of the inner window in posterior standard deviations.
const INNER_SDS: f64 = 40.0;
/// How far below its peak the outer log integrand must fall at the window edges.
const OUTER_DROP: f64 = 60.0;

fn ln_normal_pdf(v: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (v - mean) * (v - mean) / (2.0 * var)
}

/// `ln ∫ exp(log_f)` over `center ± half_width`, scaled by the value at the
/// center to stay in range.
fn ln_integral_around(log_f: impl Fn(f64) -> f64, center: f64, half_width: f64) -> f64 {
    let peak = log_f(center);
    let area = integrate(|u| (log_f(u) - peak).exp(), center - half_width, center + half_width, TARGET).integral;
    peak + area.ln()
}

/// `ln ∫ exp(log_f(t)) dt` over the real line for a unimodal log integrand:
/// a coarse grid locates the peak, then the window is widened until the
/// integrand has dropped by `OUTER_DROP` on both sides.
fn ln_integral_unimodal(log_f: impl Fn(f64) -> f64, guess: f64) -> f64 {
    let mut best = (guess, log_f(guess));
    for k in -400..=400 {
        let t = guess + k as f64 * 0.05;
        let v = log_f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    let (t_star, peak) = best;
    let mut lo = t_star - 0.25;
    while log_f(lo) > peak - OUTER_DROP {
        lo -= 0.25;
    }
    let mut hi = t_star + 0.25;
    while log_f(hi) > peak - OUTER_DROP {
        hi += 0.25;
    }
    // split at the peak so each half is smooth and monotone
    let left = integrate(|t| (log_f(t) - peak).exp(), lo, t_star, TARGET).integral;
    let right = integrate(|t| (log_f(t) - peak).exp(), t_star, hi, TARGET).integral;
    peak + (left + right).ln()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `ln ∫ Π N(v_k; μ, σ) · N(μ; v̄, σ/(len·γ)) dμ`, up to `(2π)^{-len/2}`.
fn ln_location_integral(v: &[f64], sigma: f64, gamma: f64) -> f64 {
    let m = mean(v);
    let len = v.len() as f64;
    let prior_var = sigma / (len * gamma);
    let log_f = |mu: f64| {
        let ss: f64 = v.iter().map(|x| (x - mu) * (x - mu)).sum();
        -ss / (2.0 * sigma) - 0.5 * len * sigma.ln() + ln_normal_pdf(mu, m, prior_var)
    };
    ln_integral_around(log_f, m, INNER_SDS * (sigma / len).sqrt())
}

/// Log marginal-likelihood ratio for one coordinate of the mean test.
pub fn mean_log_bf(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let z: Vec<f64> = x.iter().chain(y).copied().collect();
    let guess = {
        let m = mean(&z);
        (z.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / z.len() as f64).ln()
    };
    // σ = e^t, so the 1/σ prior times dσ is dt
    let h0 = ln_integral_unimodal(|t| ln_location_integral(&z, t.exp(), gamma), guess);
    let h1 = ln_integral_unimodal(
        |t| {
            let s = t.exp();
            ln_location_integral(x, s, gamma) + ln_location_integral(y, s, gamma)
        },
        guess,
    );
    h1 - h0
}

/// `ln ∫∫ Π N(vi_k; a·vj_k, τ) · N(a; â, τ/(γ‖vj‖²)) · IG(τ; a0, b) da dτ`,
/// up to `(2π)^{-len/2}`.
fn ln_regression_marginal(vi: &[f64], vj: &[f64], gamma: f64, a0: f64, b: f64) -> f64 {
    let len = vi.len() as f64;
    let jj: f64 = vj.iter().map(|v| v * v).sum();
    let ahat = vi.iter().zip(vj).map(|(u, v)| u * v).sum::<f64>() / jj;
    let inner = |tau: f64| {
        let log_f = |a: f64| {
            let ss: f64 = vi.iter().zip(vj).map(|(u, v)| (u - a * v) * (u - a * v)).sum();
            -ss / (2.0 * tau) - 0.5 * len * tau.ln() + ln_normal_pdf(a, ahat, tau / (gamma * jj))
        };
        ln_integral_around(log_f, ahat, INNER_SDS * (tau / jj).sqrt())
    };
    let ln_ig = |tau: f64| a0 * b.ln() - ln_gamma(a0) - (a0 + 1.0) * tau.ln() - b / tau;
    let guess = {
        let rss: f64 = vi.iter().zip(vj).map(|(u, v)| (u - ahat * v) * (u - ahat * v)).sum();
        (rss / len).max(1e-300).ln()
    };
    // τ = e^t, dτ = τ dt
    ln_integral_unimodal(|t| inner(t.exp()) + ln_ig(t.exp()) + t, guess)
}

/// Log marginal-likelihood ratio for the ordered pair `(i, j)`.
#[allow(clippy::too_many_arguments)]
pub fn cov_log_bf(xi: &[f64], yi: &[f64], xj: &[f64], yj: &[f64], gamma: f64, a0: f64, b0: f64, b01: f64, b02: f64) -> f64 {
    let zi: Vec<f64> = xi.iter().chain(yi).copied().collect();
    let zj: Vec<f64> = xj.iter().chain(yj).copied().collect();
    ln_regression_marginal(xi, xj, gamma, a0, b01) + ln_regression_marginal(yi, yj, gamma, a0, b02)
        - ln_regression_marginal(&zi, &zj, gamma, a0, b0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals<R: Rng>(rng: &mut R, n: usize, loc: f64, scale: f64) -> Vec<f64> {
    (0..n).map(|_| loc + scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}
