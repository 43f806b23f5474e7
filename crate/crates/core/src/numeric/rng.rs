use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use super::linalg::CholeskyFactor;
use super::matrix::SampleMatrix;
use super::Real;
use crate::error::{Error, Result};

/// Identifies an independent random stream: one per (experiment seed,
/// replicate, population). The key is hashed into the ChaCha seed and the
/// (replicate, population) pair selects the ChaCha stream, so streams do
/// not depend on the order in which they are requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub replicate: u32,
    pub population: u8,
}

impl StreamKey {
    pub fn new(seed: u64, replicate: u32, population: u8) -> Self {
        Self { seed, replicate, population }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut state = self.seed;
        let mut bytes = [0u8; 32];
        for chunk in bytes.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha12Rng::from_seed(bytes);
        rng.set_stream(((self.replicate as u64) << 8) | self.population as u64);
        rng
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `count` rows iid `N(mu, L·Lᵀ)`.
pub fn sample_mvn<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    mu: &[T],
    chol: &CholeskyFactor<T>,
    count: usize,
) -> Result<SampleMatrix<T>> {
    let p = mu.len();
    if chol.dim() != p {
        return Err(Error::InvalidInput(format!(
            "mean has length {p} but the factor is {}×{}",
            chol.dim(),
            chol.dim()
        )));
    }
    if count == 0 || p == 0 {
        return Err(Error::InvalidInput("sample_mvn needs count ≥ 1 and p ≥ 1".into()));
    }
    let l = chol.lower();
    let mut values = vec![T::zero(); count * p];
    let mut z = vec![T::zero(); p];
    for row in 0..count {
        for zk in z.iter_mut() {
            *zk = T::c(rng.sample::<f64, _>(StandardNormal));
        }
        for i in 0..p {
            let li = &l.row(i)[..=i];
            let mut acc = mu[i];
            for (&a, &b) in li.iter().zip(&z) {
                acc = acc + a * b;
            }
            values[i * count + row] = acc;
        }
    }
    SampleMatrix::from_column_major(count, p, values)
}
