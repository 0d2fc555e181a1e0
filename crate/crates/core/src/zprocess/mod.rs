//! Bhattacharyya-type random processes driven by fair coin flips.
//!
//! Every process starts at `z0 ∈ (0,1)` and squares its value when the
//! branch bit is 1. On a 0 bit the three rules differ:
//!
//! | rule        | `b = 0` update |
//! |-------------|----------------|
//! | `Extremal`  | `2z − z²`      |
//! | `Lower`     | `z`            |
//! | `Doubling`  | `2z` (may exceed 1) |
//!
//! The extremal process is the erasure-channel process and dominates every
//! process whose 0-branch lands in `[z, 2z − z²]`; the lower process is
//! dominated by all of them.

mod dist;
mod state;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{chunked_trials, trial_rng, Estimate};

pub use dist::{
    exact_distribution, exact_distribution_capped, ZDistribution, DEFAULT_MAX_ENUM_STEPS,
};
pub use state::ZState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Extremal,
    Lower,
    Doubling,
}

impl RuleKind {
    pub fn name(&self) -> &'static str {
        match self {
            RuleKind::Extremal => "extremal",
            RuleKind::Lower => "lower",
            RuleKind::Doubling => "doubling",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "extremal" => Ok(RuleKind::Extremal),
            "lower" => Ok(RuleKind::Lower),
            "doubling" => Ok(RuleKind::Doubling),
            _ => Err(Error::Parse(format!(
                "unknown rule `{s}` (expected extremal, lower or doubling)"
            ))),
        }
    }
}

/// Outcomes `B₁ … Bₙ` of the fair coin, one per polarization step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BranchWord(Vec<bool>);

impl BranchWord {
    pub fn new(bits: Vec<bool>) -> Self {
        BranchWord(bits)
    }

    /// Binary expansion of `index` over `n` bits, most significant first.
    pub fn from_index(index: u64, n: u32) -> Self {
        BranchWord((0..n).rev().map(|k| (index >> k) & 1 == 1).collect())
    }

    pub fn to_index(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: u32) -> Self {
        BranchWord((0..n).map(|_| rng.random::<bool>()).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of squaring steps `L = Σ Bᵢ`.
    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

/// One step of the chosen rule.
pub fn step(state: ZState, bit: bool, rule: RuleKind) -> ZState {
    if bit {
        return state.squared();
    }
    match rule {
        RuleKind::Extremal => state.mirrored_square(),
        RuleKind::Lower => state,
        RuleKind::Doubling => state.doubled(),
    }
}

fn check_start(z0: f64) -> Result<ZState> {
    ZState::new(z0)
}

/// Trajectory `Z₀ … Zₙ` along a fixed branch word.
pub fn path_for_word(z0: f64, word: &BranchWord, rule: RuleKind) -> Result<Vec<ZState>> {
    let mut state = check_start(z0)?;
    let mut path = Vec::with_capacity(word.len() + 1);
    path.push(state);
    for &b in word.bits() {
        state = step(state, b, rule);
        path.push(state);
    }
    Ok(path)
}

/// Random trajectory of `n + 1` states, deterministic in `seed`.
pub fn sample_path(z0: f64, n: u32, rule: RuleKind, seed: u64) -> Result<Vec<ZState>> {
    let mut rng = trial_rng(seed, 0);
    let word = BranchWord::random(&mut rng, n);
    path_for_word(z0, &word, rule)
}

fn extremal_endpoint<R: Rng>(z0: ZState, n: u32, rng: &mut R) -> ZState {
    (0..n).fold(z0, |s, _| step(s, rng.random::<bool>(), RuleKind::Extremal))
}

/// Monte Carlo estimate of `E[Qₙ^{1/2}]` for the extremal process, where
/// `Qₙ = Zₙ(1 − Zₙ)`.
pub fn q_halfmoment(z0: f64, n: u32, trials: u64, seed: u64) -> Result<Estimate> {
    let start = check_start(z0)?;
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let parts = chunked_trials(trials, |range| {
        let (mut s, mut s2) = (0.0, 0.0);
        for t in range {
            let mut rng = trial_rng(seed, t);
            let root_q = (0.5 * extremal_endpoint(start, n, &mut rng).log2_q()).exp2();
            s += root_q;
            s2 += root_q * root_q;
        }
        (s, s2)
    });
    let (sum, sum_sq) = parts
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    Ok(Estimate::from_sums(sum, sum_sq, trials))
}

/// Upper bound `½ (3/4)^{n/2}` on `E[Qₙ^{1/2}]`.
pub fn q_halfmoment_bound(n: u32) -> f64 {
    0.5 * 0.75f64.powf(n as f64 / 2.0)
}

/// Monte Carlo frequency of `{Qₙ ≥ ρⁿ}` for the extremal process.
pub fn q_tail_frequency(z0: f64, n: u32, rho: f64, trials: u64, seed: u64) -> Result<Estimate> {
    let start = check_start(z0)?;
    if !(rho > 0.0) {
        return Err(Error::param("rho", format!("{rho} must be positive")));
    }
    let log_threshold = n as f64 * rho.log2();
    let hits: u64 = chunked_trials(trials, |range| {
        range
            .filter(|&t| {
                let mut rng = trial_rng(seed, t);
                extremal_endpoint(start, n, &mut rng).log2_q() >= log_threshold
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(Estimate::from_count(hits, trials))
}

/// Markov bound `½ (3/(4ρ))^{n/2}` on `P(Qₙ ≥ ρⁿ)`.
pub fn q_tail_bound(n: u32, rho: f64) -> f64 {
    0.5 * (0.75 / rho).powf(n as f64 / 2.0)
}

/// `fₙ(ρ) = (1 − √(1 − 4ρⁿ))/2` when `4ρⁿ < 1`, otherwise 1.
///
/// Evaluated as `2ρⁿ / (1 + √(1 − 4ρⁿ))`, which is the same number without
/// the cancellation when `ρⁿ` is small.
pub fn f_rho(rho: f64, n: u32) -> f64 {
    let x = rho.powf(n as f64);
    let disc = 1.0 - 4.0 * x;
    if disc > 0.0 {
        2.0 * x / (1.0 + disc.sqrt())
    } else {
        1.0
    }
}

/// `P(L + log₂log₂(1/z0) ≤ nβ)` for `L ~ Bin(n, ½)`, with exact integer
/// binomial coefficients.
///
/// This is `P(Z̲ₙ ≥ 2^{−2^{βn}})` for the lower process, hence a lower bound
/// on the same probability for every process dominating it.
pub fn converse_binomial(z0: f64, n: u32, beta: f64) -> Result<f64> {
    if !(z0 > 0.0 && z0 < 1.0) {
        return Err(Error::param("z0", format!("{z0} not in (0,1)")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::param(
            "beta",
            format!("{beta} must be a finite nonnegative number"),
        ));
    }
    let limit = n as f64 * beta - (1.0 / z0).log2().log2();
    if limit < 0.0 {
        return Ok(0.0);
    }
    let kmax = (limit.floor() as u64).min(n as u64);
    Ok(binomial_lower_tail(n, kmax))
}

/// `P(Bin(n, ½) ≤ kmax)`.
fn binomial_lower_tail(n: u32, kmax: u64) -> f64 {
    let n = n as u64;
    let mut coeff = BigUint::one();
    let mut total = BigUint::zero();
    for k in 0..=kmax {
        total += &coeff;
        coeff = coeff * (n - k) / (k + 1);
    }
    // total / 2ⁿ without overflowing the f64 exponent range
    let shift = total.bits().saturating_sub(64);
    let top = (total >> shift).to_u64().expect("fits in 64 bits") as f64;
    top * (shift as f64 - n as f64).exp2()
}

/// Drives the lower, extremal and doubling processes from `z0_low` and the
/// extremal process from `z0_high` with one shared branch word, and checks
/// `lower ≤ extremal ≤ min(doubling, 1)` and `extremal(z0_low) ≤
/// extremal(z0_high)` at every step.
pub fn domination_check_word(z0_low: f64, z0_high: f64, word: &BranchWord) -> Result<bool> {
    if !(z0_low <= z0_high) {
        return Err(Error::param(
            "z0_low",
            format!("{z0_low} exceeds z0_high {z0_high}"),
        ));
    }
    let mut lower = check_start(z0_low)?;
    let mut ext = lower;
    let mut dbl = lower;
    let mut high = check_start(z0_high)?;
    let ordered = |l: &ZState, e: &ZState, d: &ZState, h: &ZState| l <= e && e <= d && e <= h;
    if !ordered(&lower, &ext, &dbl, &high) {
        return Ok(false);
    }
    for &b in word.bits() {
        lower = step(lower, b, RuleKind::Lower);
        ext = step(ext, b, RuleKind::Extremal);
        dbl = step(dbl, b, RuleKind::Doubling);
        high = step(high, b, RuleKind::Extremal);
        if !ordered(&lower, &ext, &dbl, &high) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`domination_check_word`] on a random word of length `n` drawn from `seed`.
pub fn domination_check(z0_low: f64, z0_high: f64, n: u32, seed: u64) -> Result<bool> {
    let mut rng = trial_rng(seed, 0);
    let word = BranchWord::random(&mut rng, n);
    domination_check_word(z0_low, z0_high, &word)
}
