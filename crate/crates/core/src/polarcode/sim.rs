use rand::Rng;
use serde::Serialize;

use super::codec::{encode_into, BecScDecoder};
use super::CodeSpec;
use crate::error::{Error, Result};
use crate::stats::{chunked_trials, trial_rng, wilson_interval, Z95};

/// Block error rate over the erasure channel with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlerReport {
    pub trials: u64,
    pub failures: u64,
    pub bler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BlerReport {
    pub const CSV_HEADER: &'static str = "trial_count,failures,bler,ci_low,ci_high";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.trials, self.failures, self.bler, self.ci_low, self.ci_high
        )
    }
}

/// Sends uniformly random messages through `BEC(eps)` and counts SC block
/// failures (an unresolved information bit or a wrong message).
///
/// Each trial uses its own generator derived from `(seed, trial)`, so the
/// result is identical for any thread count.
pub fn simulate_bler(spec: &CodeSpec, eps: f64, trials: u64, seed: u64) -> Result<BlerReport> {
    if trials < 100 {
        return Err(Error::param(
            "trials",
            format!("{trials} is below the minimum of 100"),
        ));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::param("eps", format!("{eps} not in [0,1]")));
    }
    let len = spec.block_length();
    let k = spec.message_len();
    let failures: u64 = chunked_trials(trials, |range| {
        let mut decoder = BecScDecoder::new();
        let mut message = vec![0u8; k];
        let mut decoded = Vec::with_capacity(k);
        let mut word = vec![0u8; len];
        let mut failures = 0;
        for t in range {
            let mut rng = trial_rng(seed, t);
            for m in message.iter_mut() {
                *m = rng.random::<bool>() as u8;
            }
            encode_into(spec, &message, &mut word);
            for x in word.iter_mut() {
                if rng.random::<f64>() < eps {
                    *x = 2;
                }
            }
            let ok = decoder.decode_raw(spec, &word, &mut decoded).is_ok() && decoded == message;
            failures += u64::from(!ok);
        }
        failures
    })
    .into_iter()
    .sum();
    let (ci_low, ci_high) = wilson_interval(failures, trials, Z95);
    Ok(BlerReport {
        trials,
        failures,
        bler: failures as f64 / trials as f64,
        ci_low,
        ci_high,
    })
}
