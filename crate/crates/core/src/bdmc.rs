//! Binary-input discrete memoryless channels.
//!
//! A [`Channel`] is stored as one likelihood pair `(W(y|0), W(y|1))` per
//! output symbol. Symbols carry no identity beyond their position, which is
//! all the channel parameters and the polarizing transform need.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column sums must be within this of 1.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Default cap on the output alphabet produced by [`polar_transform`].
pub const DEFAULT_MAX_OUTPUTS: usize = 1 << 20;

/// Default proportionality tolerance used when merging after a transform.
pub const DEFAULT_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    outputs: Vec<(f64, f64)>,
}

/// Symmetric capacity `I(W)` and Bhattacharyya parameter `Z(W)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    pub capacity: f64,
    pub bhattacharyya: f64,
}

impl ChannelParams {
    /// `I² + Z² ≤ 1` and `I + Z ≥ 1`, each with slack `tol`.
    pub fn satisfies_iz_inequalities(&self, tol: f64) -> bool {
        let (i, z) = (self.capacity, self.bhattacharyya);
        i * i + z * z <= 1.0 + tol && i + z >= 1.0 - tol
    }
}

/// The channels `W⁻` (outputs `y₁y₂`) and `W⁺` (outputs `y₁y₂x₁`).
#[derive(Debug, Clone, PartialEq)]
pub struct TransformPair {
    pub minus: Channel,
    pub plus: Channel,
}

impl Channel {
    /// Builds and validates a channel from its likelihood pairs.
    pub fn new(outputs: Vec<(f64, f64)>) -> Result<Self> {
        let ch = Channel {
            label: None,
            outputs,
        };
        validate(&ch)?;
        Ok(ch)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Outputs computed internally are trusted; their sums can drift past
    /// [`NORMALIZATION_TOL`] on large alphabets through rounding alone.
    fn from_trusted(outputs: Vec<(f64, f64)>) -> Self {
        Channel {
            label: None,
            outputs,
        }
    }

    /// Binary erasure channel: outputs `0`, `1`, `erased`.
    pub fn bec(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::param("eps", format!("{eps} not in [0,1]")));
        }
        Ok(
            Channel::new(vec![(1.0 - eps, 0.0), (0.0, 1.0 - eps), (eps, eps)])?
                .with_label(format!("bec:{eps}")),
        )
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", format!("{p} not in [0,1]")));
        }
        Ok(Channel::new(vec![(1.0 - p, p), (p, 1.0 - p)])?.with_label(format!("bsc:{p}")))
    }

    pub fn outputs(&self) -> &[(f64, f64)] {
        &self.outputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn params(&self) -> ChannelParams {
        ChannelParams {
            capacity: symmetric_capacity(self),
            bhattacharyya: bhattacharyya(self),
        }
    }

    /// Erasure probability if this channel is a binary erasure channel.
    ///
    /// A channel qualifies when every symbol is either fully informative
    /// (one likelihood is zero) or fully ambiguous (equal likelihoods), and
    /// the informative mass is the same for both inputs.
    pub fn as_bec(&self) -> Option<f64> {
        let (mut known0, mut known1, mut erased) = (0.0, 0.0, 0.0);
        for &(p0, p1) in &self.outputs {
            if p1 == 0.0 {
                known0 += p0;
            } else if p0 == 0.0 {
                known1 += p1;
            } else if (p0 - p1).abs() <= 1e-12 * p0.max(p1) {
                erased += 0.5 * (p0 + p1);
            } else {
                return None;
            }
        }
        let ok = (known0 - known1).abs() <= 1e-10 && (known0 + erased - 1.0).abs() <= 1e-10;
        ok.then_some(erased)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ch: Channel = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        validate(&ch)?;
        Ok(ch)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel serializes")
    }
}

/// Checks the channel invariants: non-empty, probabilities in `[0,1]`,
/// both columns summing to 1.
pub fn validate(channel: &Channel) -> Result<()> {
    if channel.outputs.is_empty() {
        return Err(Error::InvalidChannel("output list is empty".into()));
    }
    let (mut sum0, mut sum1) = (0.0, 0.0);
    for (y, &(p0, p1)) in channel.outputs.iter().enumerate() {
        for (x, p) in [(0, p0), (1, p1)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidChannel(format!(
                    "W({y}|{x}) = {p} is outside [0,1]"
                )));
            }
        }
        sum0 += p0;
        sum1 += p1;
    }
    for (x, sum) in [(0, sum0), (1, sum1)] {
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidChannel(format!(
                "column for input {x} sums to {sum}, not 1"
            )));
        }
    }
    Ok(())
}

/// Mutual information in bits under a uniform input, with `0·log 0 = 0`.
pub fn symmetric_capacity(channel: &Channel) -> f64 {
    channel
        .outputs
        .iter()
        .map(|&(p0, p1)| {
            let avg = 0.5 * (p0 + p1);
            let term = |p: f64| {
                if p > 0.0 {
                    0.5 * p * (p / avg).log2()
                } else {
                    0.0
                }
            };
            term(p0) + term(p1)
        })
        .sum()
}

/// `Z(W) = Σ_y √(W(y|0)·W(y|1))`.
pub fn bhattacharyya(channel: &Channel) -> f64 {
    channel
        .outputs
        .iter()
        .map(|&(p0, p1)| (p0 * p1).sqrt())
        .sum()
}

/// One polarizing step with the default alphabet cap. No merging is done.
pub fn polar_transform(channel: &Channel) -> Result<TransformPair> {
    polar_transform_capped(channel, DEFAULT_MAX_OUTPUTS)
}

/// One polarizing step `W → (W⁻, W⁺)`.
///
/// `W⁻(y₁y₂|u₁) = ½ Σ_{u₂} W(y₁|u₁⊕u₂) W(y₂|u₂)` is indexed `y₁·|𝒴| + y₂`;
/// `W⁺(y₁y₂u₁|u₂) = ½ W(y₁|u₁⊕u₂) W(y₂|u₂)` is indexed `2(y₁·|𝒴| + y₂) + u₁`.
pub fn polar_transform_capped(channel: &Channel, max_outputs: usize) -> Result<TransformPair> {
    let k = channel.outputs.len() as u64;
    let requested = 2 * k * k;
    if requested > max_outputs as u64 {
        return Err(Error::ResourceCap {
            what: "polar transform output alphabet",
            requested,
            limit: max_outputs as u64,
            flag: "--max-outputs",
        });
    }
    let w = |y: usize, x: u8| {
        let (p0, p1) = channel.outputs[y];
        if x == 0 {
            p0
        } else {
            p1
        }
    };
    let k = k as usize;
    let mut minus = Vec::with_capacity(k * k);
    let mut plus = Vec::with_capacity(2 * k * k);
    for y1 in 0..k {
        for y2 in 0..k {
            let m0 = 0.5 * (w(y1, 0) * w(y2, 0) + w(y1, 1) * w(y2, 1));
            let m1 = 0.5 * (w(y1, 1) * w(y2, 0) + w(y1, 0) * w(y2, 1));
            minus.push((m0, m1));
            for u1 in 0..2u8 {
                let p0 = 0.5 * w(y1, u1) * w(y2, 0);
                let p1 = 0.5 * w(y1, u1 ^ 1) * w(y2, 1);
                plus.push((p0, p1));
            }
        }
    }
    Ok(TransformPair {
        minus: Channel::from_trusted(minus),
        plus: Channel::from_trusted(plus),
    })
}

/// Transform followed by [`merge_equivalent_outputs`] on both halves.
pub fn polar_transform_merged(
    channel: &Channel,
    tol: f64,
    max_outputs: usize,
) -> Result<TransformPair> {
    let raw = polar_transform_capped(channel, max_outputs)?;
    Ok(TransformPair {
        minus: merge_equivalent_outputs(&raw.minus, tol),
        plus: merge_equivalent_outputs(&raw.plus, tol),
    })
}

/// Sums output symbols whose likelihood pairs are proportional.
///
/// Two symbols are merged when their posteriors `p0/(p0+p1)` differ by at
/// most `tol`. Symbols with `p0 = p1 = 0` are dropped. Merged groups keep the
/// position of their first member, so a channel with nothing to merge comes
/// back unchanged.
pub fn merge_equivalent_outputs(channel: &Channel, tol: f64) -> Channel {
    let live: Vec<(usize, f64)> = channel
        .outputs
        .iter()
        .enumerate()
        .filter(|(_, &(p0, p1))| p0 + p1 > 0.0)
        .map(|(i, &(p0, p1))| (i, p0 / (p0 + p1)))
        .collect();
    let mut order: Vec<usize> = (0..live.len()).collect();
    order.sort_by(|&a, &b| {
        live[a]
            .1
            .total_cmp(&live[b].1)
            .then(live[a].0.cmp(&live[b].0))
    });

    // (first original index, p0, p1)
    let mut groups: Vec<(usize, f64, f64)> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    for &slot in &order {
        let (idx, post) = live[slot];
        let (p0, p1) = channel.outputs[idx];
        match groups.last_mut() {
            Some(g) if post - anchor <= tol => {
                g.0 = g.0.min(idx);
                g.1 += p0;
                g.2 += p1;
            }
            _ => {
                anchor = post;
                groups.push((idx, p0, p1));
            }
        }
    }
    groups.sort_by_key(|g| g.0);
    Channel {
        label: channel.label.clone(),
        outputs: groups.into_iter().map(|(_, p0, p1)| (p0, p1)).collect(),
    }
}

/// All `2ⁿ` synthesized channels, merged after every step.
///
/// Index `i` read MSB-first gives the branch word: bit 0 takes `W⁻`,
/// bit 1 takes `W⁺`, the most significant bit being the first step.
pub fn synthesized_channels(
    channel: &Channel,
    n: u32,
    tol: f64,
    max_outputs: usize,
) -> Result<Vec<Channel>> {
    let mut level = vec![merge_equivalent_outputs(channel, tol)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for ch in &level {
            let pair = polar_transform_merged(ch, tol, max_outputs)?;
            next.push(pair.minus);
            next.push(pair.plus);
        }
        level = next;
    }
    Ok(level)
}

/// A random valid channel with `outputs` symbols.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, outputs: usize) -> Channel {
    let mut column = || {
        let raw: Vec<f64> = (0..outputs).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect::<Vec<_>>()
    };
    let c0 = column();
    let c1 = column();
    Channel::from_trusted(c0.into_iter().zip(c1).collect())
}

/// Channel given on the command line: `bec:<eps>`, `bsc:<p>`, or a parsed
/// JSON channel (the `@file.json` form is resolved by the caller).
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Bec(f64),
    Bsc(f64),
    Custom(Channel),
}

impl ChannelSpec {
    pub fn channel(&self) -> Result<Channel> {
        match self {
            ChannelSpec::Bec(eps) => Channel::bec(*eps),
            ChannelSpec::Bsc(p) => Channel::bsc(*p),
            ChannelSpec::Custom(ch) => Ok(ch.clone()),
        }
    }

    /// Erasure probability when the channel is an erasure channel.
    pub fn erasure_probability(&self) -> Option<f64> {
        match self {
            ChannelSpec::Bec(eps) => Some(*eps),
            ChannelSpec::Bsc(_) => None,
            ChannelSpec::Custom(ch) => merge_equivalent_outputs(ch, DEFAULT_MERGE_TOL).as_bec(),
        }
    }
}

impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let number = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad channel parameter `{v}`: {e}")))
        };
        if let Some(v) = s.strip_prefix("bec:") {
            let eps = number(v)?;
            Channel::bec(eps)?;
            Ok(ChannelSpec::Bec(eps))
        } else if let Some(v) = s.strip_prefix("bsc:") {
            let p = number(v)?;
            Channel::bsc(p)?;
            Ok(ChannelSpec::Bsc(p))
        } else if let Some(path) = s.strip_prefix('@') {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
            Ok(ChannelSpec::Custom(Channel::from_json(&text)?))
        } else {
            Err(Error::Parse(format!(
                "unknown channel `{s}` (expected bec:<eps>, bsc:<p> or @file.json)"
            )))
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSpec::Bec(eps) => write!(f, "bec:{eps}"),
            ChannelSpec::Bsc(p) => write!(f, "bsc:{p}"),
            ChannelSpec::Custom(ch) => write!(f, "{}", ch.label.as_deref().unwrap_or("custom")),
        }
    }
}
