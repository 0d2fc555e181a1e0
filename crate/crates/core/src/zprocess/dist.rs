use std::fmt::Write as _;

use super::{step, RuleKind, ZState};
use crate::error::{Error, Result};

/// Default cap on the number of enumerated steps.
pub const DEFAULT_MAX_ENUM_STEPS: u32 = 24;

/// Exact law of `Zₙ` under uniformly random branch words: atoms sorted by
/// strictly increasing value, each with its probability.
#[derive(Debug, Clone)]
pub struct ZDistribution {
    z0: f64,
    n: u32,
    rule: RuleKind,
    atoms: Vec<(ZState, f64)>,
}

/// Law of `Zₙ` by enumerating all `2ⁿ` branch words, with the default cap.
pub fn exact_distribution(z0: f64, n: u32, rule: RuleKind) -> Result<ZDistribution> {
    exact_distribution_capped(z0, n, rule, DEFAULT_MAX_ENUM_STEPS)
}

pub fn exact_distribution_capped(
    z0: f64,
    n: u32,
    rule: RuleKind,
    max_steps: u32,
) -> Result<ZDistribution> {
    ZDistribution::point(z0, rule)?.advance_capped(n, max_steps)
}

impl ZDistribution {
    /// The degenerate law at `n = 0`.
    pub fn point(z0: f64, rule: RuleKind) -> Result<Self> {
        Ok(ZDistribution {
            z0,
            n: 0,
            rule,
            atoms: vec![(ZState::new(z0)?, 1.0)],
        })
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn rule(&self) -> RuleKind {
        self.rule
    }

    pub fn atoms(&self) -> &[(ZState, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The law `steps` further on, with the default cap on the total step count.
    pub fn advance(&self, steps: u32) -> Result<Self> {
        self.advance_capped(steps, DEFAULT_MAX_ENUM_STEPS)
    }

    pub fn advance_capped(&self, steps: u32, max_steps: u32) -> Result<Self> {
        let target = self.n + steps;
        if target > max_steps {
            return Err(Error::ResourceCap {
                what: "exact enumeration",
                requested: target as u64,
                limit: max_steps as u64,
                flag: "--max-enum-n",
            });
        }
        let mut atoms = self.atoms.clone();
        for _ in 0..steps {
            atoms = next_level(&atoms, self.rule);
        }
        Ok(ZDistribution {
            z0: self.z0,
            n: target,
            rule: self.rule,
            atoms,
        })
    }

    /// `P(Zₙ ≤ threshold)`.
    pub fn cdf_at(&self, threshold: f64) -> f64 {
        if !(threshold > 0.0) {
            return 0.0;
        }
        self.cdf_at_log2(threshold.log2())
    }

    /// `P(Zₙ ≤ 2^log2_threshold)`.
    pub fn cdf_at_log2(&self, log2_threshold: f64) -> f64 {
        let t = ZState::from_log2(log2_threshold);
        let end = self.atoms.partition_point(|(s, _)| *s <= t);
        self.atoms[..end].iter().map(|(_, p)| p).sum()
    }

    /// `P(Zₙ ≥ 2^log2_threshold)`.
    pub fn tail_at_log2(&self, log2_threshold: f64) -> f64 {
        let t = ZState::from_log2(log2_threshold);
        let start = self.atoms.partition_point(|(s, _)| *s < t);
        self.atoms[start..].iter().map(|(_, p)| p).sum()
    }

    /// `P(lo < Zₙ < hi)`.
    pub fn prob_between(&self, lo: f64, hi: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|(s, _)| {
                let v = s.value();
                lo < v && v < hi
            })
            .map(|(_, p)| p)
            .sum()
    }

    /// `E[g(Zₙ)]`.
    pub fn expect(&self, g: impl Fn(&ZState) -> f64) -> f64 {
        self.atoms.iter().map(|(s, p)| p * g(s)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(ZState::value)
    }

    pub fn total_probability(&self) -> f64 {
        self.atoms.iter().map(|(_, p)| p).sum()
    }

    /// CSV with a `#` comment line carrying the parameters, then `value,prob`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * self.atoms.len() + 64);
        let _ = writeln!(out, "# z0={} n={} rule={}", self.z0, self.n, self.rule);
        out.push_str("value,prob\n");
        for (s, p) in &self.atoms {
            let _ = writeln!(out, "{},{}", s.value(), p);
        }
        out
    }
}

/// One enumeration step. Both branch maps are increasing in `z`, so the two
/// images of a sorted level are sorted and a linear merge suffices.
fn next_level(atoms: &[(ZState, f64)], rule: RuleKind) -> Vec<(ZState, f64)> {
    let mut out: Vec<(ZState, f64)> = Vec::with_capacity(2 * atoms.len());
    let mut push = |s: ZState, p: f64| match out.last_mut() {
        Some((last, q)) if *last == s => *q += p,
        _ => out.push((s, p)),
    };
    let image = |i: usize, bit: bool| (step(atoms[i].0, bit, rule), 0.5 * atoms[i].1);
    let (mut i, mut j) = (0, 0);
    let mut sq = (i < atoms.len()).then(|| image(i, true));
    let mut other = (j < atoms.len()).then(|| image(j, false));
    loop {
        match (sq, other) {
            (Some(a), Some(b)) => {
                if a.0 <= b.0 {
                    push(a.0, a.1);
                    i += 1;
                    sq = (i < atoms.len()).then(|| image(i, true));
                } else {
                    push(b.0, b.1);
                    j += 1;
                    other = (j < atoms.len()).then(|| image(j, false));
                }
            }
            (Some(a), None) => {
                push(a.0, a.1);
                i += 1;
                sq = (i < atoms.len()).then(|| image(i, true));
            }
            (None, Some(b)) => {
                push(b.0, b.1);
                j += 1;
                other = (j < atoms.len()).then(|| image(j, false));
            }
            (None, None) => break,
        }
    }
    if out.windows(2).all(|w| w[0].0 < w[1].0) {
        return out;
    }
    // rounding broke monotonicity somewhere; fall back to a full sort
    out.sort_by_key(|a| a.0);
    let mut merged: Vec<(ZState, f64)> = Vec::with_capacity(out.len());
    for (s, p) in out {
        match merged.last_mut() {
            Some((last, q)) if *last == s => *q += p,
            _ => merged.push((s, p)),
        }
    }
    merged
}
