//! Small statistics helpers shared by the samplers and simulators.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Binary entropy in bits, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Mean and standard error of the mean from running sums.
    pub fn from_sums(sum: f64, sum_sq: f64, count: u64) -> Self {
        let n = count as f64;
        let mean = sum / n;
        if count < 2 {
            return Estimate { mean, stderr: 0.0 };
        }
        let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        Estimate {
            mean,
            stderr: (var / n).sqrt(),
        }
    }

    /// Bernoulli frequency with its binomial standard error.
    pub fn from_count(hits: u64, count: u64) -> Self {
        let p = hits as f64 / count as f64;
        Estimate {
            mean: p,
            stderr: (p * (1.0 - p) / count as f64).sqrt(),
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent generator for trial `index` under a base seed.
///
/// Trials draw from their own stream so results do not depend on how the
/// trials are scheduled across threads.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

const CHUNK: u64 = 2048;

/// Evaluates `per_chunk` over fixed-size consecutive trial ranges, in
/// parallel, returning the chunk results in trial order.
///
/// Chunk boundaries do not depend on the thread count, so a reduction done
/// sequentially over the returned vector is reproducible.
pub fn chunked_trials<A, F>(trials: u64, per_chunk: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<u64>) -> A + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| per_chunk(c * CHUNK..((c + 1) * CHUNK).min(trials)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(0.5), 1.0);
        assert!((binary_entropy(0.4) - 0.970_950_594_454_668_6).abs() < 1e-12);
    }

    #[test]
    fn wilson_contains_point_estimate() {
        let (lo, hi) = wilson_interval(30, 1000, Z95);
        assert!(lo < 0.03 && 0.03 < hi);
        let (lo, hi) = wilson_interval(0, 1000, Z95);
        assert!(lo < 1e-15);
        assert!(hi > 0.0 && hi < 0.005);
    }

    #[test]
    fn standard_error_of_constant_is_zero() {
        let e = Estimate::from_sums(5.0 * 0.25, 5.0 * 0.0625, 5);
        assert_eq!(e.mean, 0.25);
        assert_eq!(e.stderr, 0.0);
    }
}
