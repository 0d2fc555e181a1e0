//! Polar codes over the binary erasure channel.
//!
//! Synthesized channel `i` of a length-`N = 2ⁿ` code is reached by the
//! branch word spelling `i` in binary, most significant bit first, with bit
//! 0 taking `W⁻` and bit 1 taking `W⁺`. Larger indices are therefore the
//! statistically more reliable ones. The encoder is the plain butterfly
//! `x = u·F^{⊗n}`, which together with the natural-order SC decoder realizes
//! exactly this indexing.

mod codec;
mod general;
mod sim;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zprocess::BranchWord;

pub use codec::{
    encode, encode_in_place, sc_decode_bec, BecScDecoder, DecodeFailure, ErasureSymbol,
    FROZEN_VALUE,
};
pub use general::{channel_llrs, construct_general, sc_decode_llr, GENERAL_MAX_STAGES};
pub use sim::{simulate_bler, BlerReport};

/// Largest stage count accepted by [`bec_z_spectrum`].
pub const MAX_SPECTRUM_STAGES: u32 = 26;

/// Bijection between synthesized-channel indices and branch words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexPathMap {
    pub n: u32,
}

impl IndexPathMap {
    pub fn word(&self, index: usize) -> BranchWord {
        BranchWord::from_index(index as u64, self.n)
    }

    pub fn index(&self, word: &BranchWord) -> Result<usize> {
        if word.len() != self.n as usize {
            return Err(Error::LengthMismatch {
                expected: self.n as usize,
                actual: word.len(),
            });
        }
        Ok(word.to_index() as usize)
    }
}

/// A constructed polar code: information set `A` and the per-index
/// Bhattacharyya values it was chosen from. Frozen positions carry
/// [`FROZEN_VALUE`].
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    n: u32,
    eps: Option<f64>,
    info_set: Vec<usize>,
    frozen: Vec<bool>,
    z_values: Vec<f64>,
}

/// JSON form of a [`CodeSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CodeSpecJson {
    n: u32,
    eps: Option<f64>,
    rate: f64,
    info_set: Vec<usize>,
    gamma: f64,
    union_bound: f64,
}

impl CodeSpec {
    /// Builds a code from explicit Z values and an information set.
    pub fn from_parts(
        n: u32,
        eps: Option<f64>,
        z_values: Vec<f64>,
        mut info_set: Vec<usize>,
    ) -> Result<Self> {
        let len = 1usize << n;
        if z_values.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: z_values.len(),
            });
        }
        info_set.sort_unstable();
        if info_set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("info_set", "indices must be distinct"));
        }
        if info_set.last().is_some_and(|&i| i >= len) {
            return Err(Error::param(
                "info_set",
                format!("indices must be below {len}"),
            ));
        }
        let mut frozen = vec![true; len];
        for &i in &info_set {
            frozen[i] = false;
        }
        Ok(CodeSpec {
            n,
            eps,
            info_set,
            frozen,
            z_values,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn block_length(&self) -> usize {
        1 << self.n
    }

    /// Erasure probability the code was designed for, if built for a BEC.
    pub fn eps(&self) -> Option<f64> {
        self.eps
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn message_len(&self) -> usize {
        self.info_set.len()
    }

    pub fn is_frozen(&self, index: usize) -> bool {
        self.frozen[index]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn z_values(&self) -> &[f64] {
        &self.z_values
    }

    /// `|A| / N`.
    pub fn rate(&self) -> f64 {
        self.info_set.len() as f64 / self.block_length() as f64
    }

    /// `γ = max_{i∈A} Z_i`, zero for an empty information set.
    pub fn gamma(&self) -> f64 {
        self.info_set
            .iter()
            .map(|&i| self.z_values[i])
            .fold(0.0, f64::max)
    }

    /// `Σ_{i∈A} Z_i`, an upper bound on the SC block error probability.
    pub fn union_bound(&self) -> f64 {
        self.info_set.iter().map(|&i| self.z_values[i]).sum()
    }

    /// The looser `N·γ`.
    pub fn gamma_bound(&self) -> f64 {
        self.block_length() as f64 * self.gamma()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CodeSpecJson {
            n: self.n,
            eps: self.eps,
            rate: self.rate(),
            info_set: self.info_set.clone(),
            gamma: self.gamma(),
            union_bound: self.union_bound(),
        })
        .expect("code spec serializes")
    }

    /// Reloads a BEC code; Z values are recomputed from `eps` and `n`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CodeSpecJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let eps = raw
            .eps
            .ok_or_else(|| Error::Parse("code spec without `eps` cannot be rebuilt".into()))?;
        let z = bec_z_spectrum(eps, raw.n)?;
        CodeSpec::from_parts(raw.n, Some(eps), z, raw.info_set)
    }
}

/// Erasure probabilities of all `2ⁿ` synthesized channels of `BEC(eps)`.
///
/// Each stage replaces `z` by the pair `(2z − z², z²)` in place, so index
/// bits are appended least-significant last and the first step ends up as
/// the most significant bit.
pub fn bec_z_spectrum(eps: f64, n: u32) -> Result<Vec<f64>> {
    bec_z_spectrum_capped(eps, n, MAX_SPECTRUM_STAGES)
}

pub fn bec_z_spectrum_capped(eps: f64, n: u32, max_stages: u32) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::param("eps", format!("{eps} not in [0,1]")));
    }
    if n > max_stages {
        return Err(Error::ResourceCap {
            what: "Z spectrum",
            requested: n as u64,
            limit: max_stages as u64,
            flag: "--max-stages",
        });
    }
    let mut z = vec![0.0; 1 << n];
    z[0] = eps;
    for s in 0..n {
        for j in (0..1usize << s).rev() {
            let v = z[j];
            z[2 * j + 1] = v * v;
            z[2 * j] = v * (2.0 - v);
        }
    }
    Ok(z)
}

/// Indices of the `k` smallest values, ties toward the lower index,
/// returned in increasing index order.
pub fn smallest_k(z_values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z_values.len()).collect();
    order.sort_by(|&a, &b| z_values[a].total_cmp(&z_values[b]).then(a.cmp(&b)));
    let mut chosen = order[..k.min(order.len())].to_vec();
    chosen.sort_unstable();
    chosen
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::param("rate", format!("{rate} not in (0,1]")));
    }
    Ok(())
}

/// Code for `BEC(eps)` with `K = ⌊rate·N⌋` information bits on the
/// smallest-Z synthesized channels.
pub fn construct(eps: f64, n: u32, rate: f64) -> Result<CodeSpec> {
    construct_capped(eps, n, rate, MAX_SPECTRUM_STAGES)
}

pub fn construct_capped(eps: f64, n: u32, rate: f64, max_stages: u32) -> Result<CodeSpec> {
    check_rate(rate)?;
    let z = bec_z_spectrum_capped(eps, n, max_stages)?;
    let k = (rate * z.len() as f64).floor() as usize;
    let info = smallest_k(&z, k);
    CodeSpec::from_parts(n, Some(eps), z, info)
}

/// Largest code for `BEC(eps)` whose union bound stays at or below `target`.
pub fn construct_for_union_bound(eps: f64, n: u32, target: f64) -> Result<CodeSpec> {
    construct_for_union_bound_capped(eps, n, target, MAX_SPECTRUM_STAGES)
}

pub fn construct_for_union_bound_capped(
    eps: f64,
    n: u32,
    target: f64,
    max_stages: u32,
) -> Result<CodeSpec> {
    if !(target >= 0.0) {
        return Err(Error::param(
            "union_bound",
            format!("{target} must be non-negative"),
        ));
    }
    let z = bec_z_spectrum_capped(eps, n, max_stages)?;
    let mut sorted = z.clone();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut k = 0;
    for v in sorted {
        if total + v > target {
            break;
        }
        total += v;
        k += 1;
    }
    let info = smallest_k(&z, k);
    CodeSpec::from_parts(n, Some(eps), z, info)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zprocess::{path_for_word, RuleKind};
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15)
    }

    #[test]
    fn spectrum_examples() {
        assert!(close(&bec_z_spectrum(0.5, 1).unwrap(), &[0.75, 0.25]));
        assert!(close(
            &bec_z_spectrum(0.5, 2).unwrap(),
            &[0.9375, 0.5625, 0.4375, 0.0625]
        ));
        for n in 0..=16 {
            let z = bec_z_spectrum(0.5, n).unwrap();
            let mean = z.iter().sum::<f64>() / z.len() as f64;
            assert!((mean - 0.5).abs() < 1e-12, "n={n}");
        }
        assert!(bec_z_spectrum(0.5, 27).unwrap_err().is_resource_cap());
    }

    #[test]
    fn spectrum_mean_is_preserved_for_any_eps() {
        for eps in [0.01, 0.2, 0.4, 0.77, 0.99] {
            let z = bec_z_spectrum(eps, 12).unwrap();
            let mean = z.iter().sum::<f64>() / z.len() as f64;
            assert!((mean - eps).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_agrees_with_extremal_paths() {
        let n = 10;
        let map = IndexPathMap { n };
        let z = bec_z_spectrum(0.3, n).unwrap();
        for (i, &zi) in z.iter().enumerate() {
            let word = map.word(i);
            assert_eq!(map.index(&word).unwrap(), i);
            let last = path_for_word(0.3, &word, RuleKind::Extremal).unwrap()[n as usize];
            assert!((last.value() - zi).abs() <= 1e-12 * zi, "index {i}");
        }
    }

    #[test]
    fn construct_examples() {
        let c = construct(0.5, 2, 0.25).unwrap();
        assert_eq!(c.info_set(), &[3]);
        assert_eq!(c.gamma(), 0.0625);
        assert_eq!(c.union_bound(), 0.0625);

        let c = construct(0.5, 2, 0.5).unwrap();
        assert_eq!(c.info_set(), &[2, 3]);
        assert_eq!(c.union_bound(), 0.5);
        assert!(c.union_bound() <= c.gamma_bound());

        let c = construct(0.5, 3, 1.0).unwrap();
        assert_eq!(c.info_set().len(), 8);
        let total: f64 = c.z_values().iter().sum();
        assert_eq!(c.union_bound(), total);

        assert!(construct(0.5, 3, 0.0).is_err());
        assert!(construct(0.5, 3, 1.5).is_err());
    }

    #[test]
    fn ties_break_toward_lower_index() {
        assert_eq!(smallest_k(&[0.2, 0.1, 0.1, 0.3], 1), vec![1]);
        assert_eq!(smallest_k(&[0.2, 0.1, 0.1, 0.3], 2), vec![1, 2]);
    }

    #[test]
    fn union_bound_target() {
        let c = construct_for_union_bound(0.4, 10, 1e-2).unwrap();
        assert!(c.union_bound() <= 1e-2);
        let z = c.z_values();
        let next = (0..z.len())
            .filter(|i| c.is_frozen(*i))
            .map(|i| z[i])
            .fold(f64::INFINITY, f64::min);
        assert!(c.union_bound() + next > 1e-2);
    }

    #[test]
    fn json_round_trip() {
        let c = construct(0.5, 2, 0.5).unwrap();
        let text = c.to_json();
        assert_eq!(
            text,
            r#"{"n":2,"eps":0.5,"rate":0.5,"info_set":[2,3],"gamma":0.4375,"union_bound":0.5}"#
        );
        assert_eq!(CodeSpec::from_json(&text).unwrap(), c);
    }

    proptest! {
        #[test]
        fn construct_picks_the_k_smallest(eps in 0.01f64..0.99, n in 1u32..10, rate in 0.01f64..1.0) {
            let c = construct(eps, n, rate).unwrap();
            let z = c.z_values();
            let k = (rate * z.len() as f64).floor() as usize;
            prop_assert_eq!(c.message_len(), k);
            let mut sorted = z.to_vec();
            sorted.sort_by(f64::total_cmp);
            let mut chosen: Vec<f64> = c.info_set().iter().map(|&i| z[i]).collect();
            chosen.sort_by(f64::total_cmp);
            prop_assert_eq!(&chosen[..], &sorted[..k]);
            prop_assert!(c.union_bound() <= c.gamma_bound() + 1e-15);
        }
    }
}
