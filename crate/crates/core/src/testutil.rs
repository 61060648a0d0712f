use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hermite::HermiteExpansion;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_real(rng: &mut ChaCha8Rng, dim: usize, degree: usize) -> HermiteExpansion<f64> {
    HermiteExpansion::from_fn(dim, degree, |_| Complex::new(rng.gen_range(-1.0..1.0), 0.0))
}

pub fn random_complex(rng: &mut ChaCha8Rng, dim: usize, degree: usize) -> HermiteExpansion<f64> {
    HermiteExpansion::from_fn(dim, degree, |_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}
