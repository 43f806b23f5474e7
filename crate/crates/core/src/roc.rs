//! Empirical ROC curves from statistics simulated under H0 and H1.
//!
//! A threshold `t` rejects whenever the statistic exceeds it strictly, so
//! `+∞` always rejects and `−∞` never does. Thresholds are swept over the
//! pooled distinct values in decreasing order; the first of them rejects
//! nothing, which yields the `(0, 0)` endpoint, and `(1, 1)` is appended.
//! The trapezoidal area then equals the Mann–Whitney probability
//! `P(S1 > S0) + ½·P(S1 = S0)`.

use serde::{Deserialize, Serialize};

use crate::io::ext_real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// Reject when the statistic is strictly greater than this value.
    #[serde(with = "ext_real")]
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
    pub n_h0: usize,
    pub n_h1: usize,
}

/// NaN statistics carry no evidence and are ranked below `−∞`.
fn key(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s: Vec<f64> = v.iter().copied().map(key).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// # Panics
/// If either sample is empty.
pub fn roc_from_samples(h0: &[f64], h1: &[f64]) -> RocCurve {
    assert!(!h0.is_empty() && !h1.is_empty(), "ROC needs non-empty samples");
    let (s0, s1) = (sorted_desc(h0), sorted_desc(h1));
    let mut pooled: Vec<f64> = s0.iter().chain(&s1).copied().collect();
    pooled.sort_by(|a, b| b.total_cmp(a));
    pooled.dedup();

    let (n0, n1) = (h0.len() as f64, h1.len() as f64);
    let (mut i0, mut i1) = (0usize, 0usize);
    let mut points = Vec::with_capacity(pooled.len() + 1);
    for &t in &pooled {
        while i0 < s0.len() && s0[i0] > t {
            i0 += 1;
        }
        while i1 < s1.len() && s1[i1] > t {
            i1 += 1;
        }
        points.push(RocPoint { threshold: t, fpr: i0 as f64 / n0, tpr: i1 as f64 / n1 });
    }
    points.push(RocPoint { threshold: f64::NEG_INFINITY, fpr: 1.0, tpr: 1.0 });

    let auc = points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    RocCurve { points, auc, n_h0: h0.len(), n_h1: h1.len() }
}

impl RocCurve {
    /// The operating point of the rule "reject when statistic > t".
    pub fn rates_at(&self, t: f64) -> (f64, f64) {
        // points are ordered by decreasing threshold; the rule at t matches
        // the sweep point with the largest threshold not exceeding t
        let last = self.points.len() - 1;
        self.points[..last]
            .iter()
            .find(|p| p.threshold <= t)
            .map(|p| (p.fpr, p.tpr))
            .unwrap_or((1.0, 1.0))
    }

    pub fn tpr_at(&self, t: f64) -> f64 {
        self.rates_at(t).1
    }

    pub fn fpr_at(&self, t: f64) -> f64 {
        self.rates_at(t).0
    }
}
