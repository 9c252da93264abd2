use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ImageMatrix;

/// iid `N(0, sigma^2)` entries drawn from a seeded generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Value(format!(
                "noise sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self { sigma, seed })
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for an independent cell: `mix(master ^ mix(key + golden))`.
///
/// Keys are cell identities (a frame index, a replicate number, the bit
/// pattern of a noise level), never loop positions.
pub fn derive_seed(master: u64, key: u64) -> u64 {
    mix64(master ^ mix64(key.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

pub(crate) fn fill_noise(out: &mut [f64], rng: &mut ChaCha8Rng, sigma: f64) {
    for v in out {
        let z: f64 = rng.sample(StandardNormal);
        *v = sigma * z;
    }
}

/// A `rows x cols` white-noise matrix. Same spec, same matrix, bit for bit.
///
/// The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`,
/// and normals come from the ziggurat sampler in `rand_distr`, filled in
/// row-major order.
pub fn sample_noise(rows: usize, cols: usize, spec: &NoiseSpec) -> Result<ImageMatrix> {
    let mut out = ImageMatrix::zeros(rows, cols)?.into_vec();
    fill_noise(&mut out, &mut spec.rng(), spec.sigma);
    Ok(ImageMatrix::from_vec_unchecked(rows, cols, out))
}
