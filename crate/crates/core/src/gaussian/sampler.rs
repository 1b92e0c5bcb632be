//! Reproducible standard-Gaussian variates.
//!
//! Variate `n` of a stream is a pure function of `(seed, n)`: pairs of
//! variates come from one Box–Muller transform of two 64-bit words read at a
//! fixed position of a ChaCha8 keystream. Chunks of a long stream can
//! therefore be generated independently and in any order.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::NeumaierSum;

/// Samples per Monte Carlo chunk. Fixed so that results do not depend on
/// the number of worker threads.
pub const CHUNK_SAMPLES: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussianSampler {
    seed: u64,
    counter: u64,
}

impl GaussianSampler {
    pub fn new(seed: u64) -> Self {
        GaussianSampler { seed, counter: 0 }
    }

    pub fn at(seed: u64, counter: u64) -> Self {
        GaussianSampler { seed, counter }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// The next `count` variates; the counter advances by `count`.
    pub fn sample(&mut self, count: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(count);
        self.fill(&mut out, count);
        out
    }

    pub fn fill(&mut self, out: &mut Vec<f64>, count: usize) {
        if count == 0 {
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let pair = self.counter / 2;
        // Each pair consumes two u64 words, i.e. four 32-bit words.
        rng.set_word_pos(4 * pair as u128);
        let mut skip_first = self.counter % 2 == 1;
        while out.len() < count {
            let (a, b) = box_muller(&mut rng);
            if !skip_first {
                out.push(a);
            }
            skip_first = false;
            if out.len() < count {
                out.push(b);
            }
        }
        self.counter += count as u64;
    }
}

fn unit_open(word: u64) -> f64 {
    // (0, 1]
    ((word >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
}

fn box_muller(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = unit_open(rng.next_u64());
    let u2 = unit_open(rng.next_u64());
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Running mean and variance over chunk partial sums.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SampleMoments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
}

impl SampleMoments {
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

/// Estimates `E[g(draws)]` from `samples` evaluations, each consuming
/// `draws` consecutive variates of the `seed` stream. Work is split into
/// fixed chunks that are combined in chunk order.
pub fn chunked_estimate(seed: u64, samples: usize, draws: usize, g: impl Fn(&[f64]) -> f64 + Sync) -> SampleMoments {
    let chunks = samples.div_ceil(CHUNK_SAMPLES);
    let partial: Vec<(usize, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK_SAMPLES;
            let len = CHUNK_SAMPLES.min(samples - start);
            let mut sampler = GaussianSampler::at(seed, (start * draws) as u64);
            let z = sampler.sample(len * draws);
            let values: Vec<f64> = z.chunks(draws).map(&g).collect();
            let mut sum = NeumaierSum::default();
            for &v in &values {
                sum.add(v);
            }
            let mean = sum.value() / len as f64;
            let mut m2 = NeumaierSum::default();
            for &v in &values {
                m2.add((v - mean) * (v - mean));
            }
            (len, mean, m2.value())
        })
        .collect();
    // Chan et al. pairwise combination, in chunk order.
    let mut count = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (n_b, mean_b, m2_b) in partial {
        let n_a = count as f64;
        let n_b_f = n_b as f64;
        let total = n_a + n_b_f;
        let delta = mean_b - mean;
        mean += delta * n_b_f / total;
        m2 += m2_b + delta * delta * n_a * n_b_f / total;
        count += n_b;
    }
    let variance = if count > 1 { m2 / (count - 1) as f64 } else { 0.0 };
    SampleMoments { count, mean, variance }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let a = GaussianSampler::new(42).sample(1000);
        let b = GaussianSampler::new(42).sample(1000);
        assert_eq!(a, b);
        let c = GaussianSampler::new(43).sample(1000);
        assert_ne!(a, c);
    }

    #[test]
    fn counter_gives_random_access() {
        let all = GaussianSampler::new(7).sample(101);
        let mut s = GaussianSampler::new(7);
        let head = s.sample(37);
        assert_eq!(s.counter(), 37);
        let tail = s.sample(64);
        assert_eq!(head, all[..37]);
        assert_eq!(tail, all[37..]);
        assert_eq!(GaussianSampler::at(7, 50).sample(10), all[50..60]);
    }

    #[test]
    fn first_two_moments() {
        let z = GaussianSampler::new(2024).sample(1_000_000);
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 5e-3, "mean {mean}");
        assert!((var - 1.0).abs() < 1e-2, "variance {var}");
    }

    #[test]
    fn chunked_estimate_is_thread_independent() {
        let g = |z: &[f64]| z[0] * z[0] + z[1];
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| chunked_estimate(9, 200_003, 2, g));
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| chunked_estimate(9, 200_003, 2, g));
        assert_eq!(serial, parallel);
        assert_eq!(serial.count, 200_003);
        assert!((serial.mean - 1.0).abs() < 5.0 * serial.standard_error());
    }
}
