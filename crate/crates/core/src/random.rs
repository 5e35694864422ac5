//! Seeded random trial vectors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::grid::{Grid, WaveFunction};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Field with i.i.d. standard complex Gaussian entries.
pub fn random_wave(grid: &Grid, seed: u64) -> WaveFunction {
    let mut r = rng(seed);
    random_wave_with(grid, &mut r)
}

pub fn random_wave_with<R: Rng>(grid: &Grid, r: &mut R) -> WaveFunction {
    let values = (0..grid.total_size())
        .map(|_| {
            let re: f64 = r.sample(StandardNormal);
            let im: f64 = r.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    WaveFunction::from_raw(grid, values)
}

/// Real field with i.i.d. entries uniform in `[lo, hi)`.
pub fn random_field<R: Rng>(grid: &Grid, r: &mut R, lo: f64, hi: f64) -> Vec<f64> {
    (0..grid.total_size()).map(|_| r.random_range(lo..hi)).collect()
}
