//! Seeded randomness.
//!
//! Each run owns one [`RunRng`]. Policies draw from it first (in ascending
//! arm order when sampling per arm), then the environment draws one reward
//! per selected arm in ascending arm order. Keeping that order fixed makes
//! runs bit-reproducible and lets two policies that make the same choices
//! see the same rewards.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type RunRng = ChaCha8Rng;

pub fn run_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gamma(shape, 1) draw by Marsaglia and Tsang's squeeze method.
///
/// Shapes below 1 use the `U^(1/shape)` boost.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    debug_assert!(shape > 0.0);
    if shape < 1.0 {
        let u: f64 = rng.random();
        return sample_gamma(rng, shape + 1.0) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        let z2 = z * z;
        if u < 1.0 - 0.0331 * z2 * z2 {
            return d * v;
        }
        if u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Beta(a, b) draw as `X / (X + Y)` with `X ~ Gamma(a)`, `Y ~ Gamma(b)`.
pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    let x = sample_gamma(rng, a);
    let y = sample_gamma(rng, b);
    x / (x + y)
}

pub fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> f64 {
    let u: f64 = rng.random();
    if u < p {
        1.0
    } else {
        0.0
    }
}
