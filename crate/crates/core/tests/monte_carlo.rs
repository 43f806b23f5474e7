mod common;

use common::{normals, rng};
use mxpbf::harness::{run_experiment, Method};
use mxpbf::numeric::{cholesky, sample_mvn, StreamKey};
use mxpbf::scenarios::{preset, ScenarioSpec};
use mxpbf::{decide_cov, decide_mean, log_pbf_cov, mxpbf_cov, mxpbf_mean, CovTestConfig, MeanTestConfig, SquareMatrix};

const SEED: u64 = 7;

#[test]
fn scale_change_evidence_grows_with_sample_size() {
    let cfg = CovTestConfig::<f64>::default();
    let mut means = Vec::new();
    for n in [50, 100, 200] {
        let mut total = 0.0;
        for s in 0..20 {
            let mut r = rng(SEED * 1000 + s);
            let xj = normals(&mut r, n, 0.0, 1.0);
            let yj = normals(&mut r, n, 0.0, 1.0);
            let xi: Vec<f64> = xj.iter().zip(normals(&mut r, n, 0.0, 1.0)).map(|(v, e)| 0.5 * v + e).collect();
            let yi: Vec<f64> = yj.iter().zip(normals(&mut r, n, 0.0, 1.0)).map(|(v, e)| 3.0 * (0.5 * v + e)).collect();
            total += log_pbf_cov(&xi, &yi, &xj, &yj, &cfg, 10).unwrap();
        }
        means.push(total / 20.0);
    }
    assert!(means[0] > 0.0 && means[0] < means[1] && means[1] < means[2], "{means:?}");
}

#[test]
fn small_p_covariance_null_is_mostly_negative() {
    let p = 10;
    let sigma = SquareMatrix::from_fn(p, |i, j| if i == j { 1.5 } else { 0.3f64.powi((i as i32 - j as i32).abs()) });
    let chol = cholesky(&sigma).unwrap();
    let zero = vec![0.0; p];
    let mut negative = 0;
    for rep in 0..50 {
        let x = sample_mvn(&mut StreamKey::new(SEED, rep, 1).rng(), &zero, &chol, 100).unwrap();
        let y = sample_mvn(&mut StreamKey::new(SEED, rep, 2).rng(), &zero, &chol, 100).unwrap();
        if mxpbf_cov(&x, &y, &CovTestConfig::default()).unwrap().log_mxpbf < 0.0 {
            negative += 1;
        }
    }
    assert!(negative >= 45, "{negative}/50 negative");
}

#[test]
fn mean_null_retains_at_the_default_threshold() {
    let spec = ScenarioSpec { n: 100, p: 100, seed: SEED, ..preset("mean-h0-sparse").unwrap() };
    let r = run_experiment(&spec, &[Method::Mxpbf], 50).unwrap();
    let retain = 1.0 - r.methods[0].size;
    assert!(retain >= 0.95, "retain rate {retain}");
}

#[test]
fn stricter_thresholds_reject_a_subset() {
    for name in ["mean-h1m-sparse", "cov-h1m-sparse"] {
        let spec = ScenarioSpec { n: 40, p: 30, seed: SEED, ..preset(name).unwrap() };
        let mut spec = spec;
        spec.signal = if spec.kind.is_mean() { 0.3 } else { 0.5 };
        let truth = mxpbf::scenarios::build_truth(&spec, &mut StreamKey::new(SEED, 0, 0).rng()).unwrap();
        for rep in 0..30 {
            let (x, y) = mxpbf::scenarios::generate_dataset(
                &truth,
                spec.n,
                &mut StreamKey::new(SEED, rep, 1).rng(),
                &mut StreamKey::new(SEED, rep, 2).rng(),
            )
            .unwrap();
            let (strict, loose) = if spec.kind.is_mean() {
                let res = mxpbf_mean(&x, &y, &MeanTestConfig::default()).unwrap();
                (decide_mean(&res, 10.0), decide_mean(&res, 1.0))
            } else {
                let res = mxpbf_cov(&x, &y, &CovTestConfig::default()).unwrap();
                (decide_cov(&res, 10.0), decide_cov(&res, 1.0))
            };
            assert!(!strict.rejects() || loose.rejects());
        }
    }
}
