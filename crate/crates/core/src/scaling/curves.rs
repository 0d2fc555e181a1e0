use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::{threshold_log2, CurveReport, Mode, ScalingConfig, ScalingRow};
use crate::bdmc::{
    polar_transform_merged, ChannelParams, ChannelSpec, DEFAULT_MAX_OUTPUTS, DEFAULT_MERGE_TOL,
};
use crate::error::{Error, Result};
use crate::polarcode::GENERAL_MAX_STAGES;
use crate::stats::{chunked_trials, trial_rng, Estimate};
use crate::zprocess::{step, ZDistribution, ZState, DEFAULT_MAX_ENUM_STEPS};

#[derive(Clone, Copy, PartialEq)]
enum Event {
    AtMost,
    AtLeast,
}

/// Probability of the event at every grid point, with standard errors,
/// indexed `[n_index][beta_index]`.
fn evaluate(cfg: &ScalingConfig, event: Event) -> Result<Vec<Vec<Estimate>>> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Exact => evaluate_exact(cfg, event),
        Mode::MonteCarlo => Ok(evaluate_mc(cfg, event)),
    }
}

fn evaluate_exact(cfg: &ScalingConfig, event: Event) -> Result<Vec<Vec<Estimate>>> {
    let mut order: Vec<u32> = cfg.n_grid.clone();
    order.sort_unstable();
    order.dedup();
    let mut laws: BTreeMap<u32, Vec<Estimate>> = BTreeMap::new();
    let mut dist = ZDistribution::point(cfg.z0, cfg.rule)?;
    for n in order {
        dist = dist.advance_capped(n - dist.n(), cfg.max_enum_n)?;
        let row = cfg
            .beta_grid
            .iter()
            .map(|&b| {
                let t = threshold_log2(b, n);
                let p = match event {
                    Event::AtMost => dist.cdf_at_log2(t),
                    Event::AtLeast => dist.tail_at_log2(t),
                };
                Estimate {
                    mean: p,
                    stderr: 0.0,
                }
            })
            .collect();
        laws.insert(n, row);
    }
    Ok(cfg.n_grid.iter().map(|n| laws[n].clone()).collect())
}

fn evaluate_mc(cfg: &ScalingConfig, event: Event) -> Vec<Vec<Estimate>> {
    let start = ZState::new(cfg.z0).expect("validated");
    let max_n = *cfg.n_grid.iter().max().expect("validated");
    let thresholds: Vec<Vec<ZState>> = cfg
        .n_grid
        .iter()
        .map(|&n| {
            cfg.beta_grid
                .iter()
                .map(|&b| ZState::from_log2(threshold_log2(b, n)))
                .collect()
        })
        .collect();
    let mut at_step: Vec<Vec<usize>> = vec![Vec::new(); max_n as usize + 1];
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        at_step[n as usize].push(i);
    }
    let width = cfg.beta_grid.len();
    let cells = cfg.n_grid.len() * width;
    let parts = chunked_trials(cfg.trials, |range| {
        let mut hits = vec![0u64; cells];
        for t in range {
            let mut rng = trial_rng(cfg.seed, t);
            let mut state = start;
            for (s, cells_here) in at_step.iter().enumerate() {
                if s > 0 {
                    state = step(state, rng.random::<bool>(), cfg.rule);
                }
                for &i in cells_here {
                    for (j, th) in thresholds[i].iter().enumerate() {
                        let hit = match event {
                            Event::AtMost => state <= *th,
                            Event::AtLeast => state >= *th,
                        };
                        hits[i * width + j] += u64::from(hit);
                    }
                }
            }
        }
        hits
    });
    let mut hits = vec![0u64; cells];
    for part in parts {
        for (h, p) in hits.iter_mut().zip(part) {
            *h += p;
        }
    }
    (0..cfg.n_grid.len())
        .map(|i| {
            (0..width)
                .map(|j| Estimate::from_count(hits[i * width + j], cfg.trials))
                .collect()
        })
        .collect()
}

/// `P(Zₙ ≤ 2^{−2^{βn}})` over the grid. The `bound` column holds the limit
/// `1 − z0` of the extremal process (NaN for the other rules).
pub fn direct_curve(cfg: &ScalingConfig) -> Result<CurveReport> {
    let probs = evaluate(cfg, Event::AtMost)?;
    let reference = match cfg.rule {
        crate::zprocess::RuleKind::Extremal => 1.0 - cfg.z0,
        _ => f64::NAN,
    };
    let mut rows = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        for (j, &beta) in cfg.beta_grid.iter().enumerate() {
            rows.push(ScalingRow {
                n,
                beta,
                threshold_log2: threshold_log2(beta, n),
                probability: probs[i][j].mean,
                bound: reference,
                stderr: probs[i][j].stderr,
            });
        }
    }
    let mut notes = Vec::new();
    if let Some(b) = cfg.beta_grid.iter().find(|&&b| b >= 0.5) {
        notes.push(format!("beta={b} is outside the direct regime beta < 1/2"));
    }
    Ok(CurveReport { rows, notes })
}

/// `P(Zₙ ≥ 2^{−2^{βn}})` over the grid, with the binomial lower bound of the
/// lower process in the `bound` column.
pub fn converse_curve(cfg: &ScalingConfig) -> Result<CurveReport> {
    let probs = evaluate(cfg, Event::AtLeast)?;
    let mut rows = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        for (j, &beta) in cfg.beta_grid.iter().enumerate() {
            rows.push(ScalingRow {
                n,
                beta,
                threshold_log2: threshold_log2(beta, n),
                probability: probs[i][j].mean,
                bound: crate::zprocess::converse_binomial(cfg.z0, n, beta)?,
                stderr: probs[i][j].stderr,
            });
        }
    }
    let mut notes = Vec::new();
    if let Some(b) = cfg.beta_grid.iter().find(|&&b| b <= 0.5) {
        notes.push(format!(
            "beta={b} is outside the converse regime beta > 1/2"
        ));
    }
    Ok(CurveReport { rows, notes })
}

/// Per-level checks on exactly synthesized channels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageCheck {
    pub n: u32,
    /// `(I, Z)` of each synthesized channel in index order.
    pub params: Vec<ChannelParams>,
    /// Every pair satisfies `I² + Z² ≤ 1` and `I + Z ≥ 1` within 1e-9.
    pub iz_inequalities_hold: bool,
    /// Largest `|I(W⁻) + I(W⁺) − 2I(W)|` over the transforms producing this level.
    pub max_conservation_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelFormReport {
    pub channel: String,
    pub capacity: f64,
    pub bhattacharyya: f64,
    pub rows: Vec<ScalingRow>,
    pub stages: Vec<StageCheck>,
}

/// `P(Zₙ ≤ 2^{−N^β})` with `N = 2ⁿ` for a channel, against the reference
/// `I(W)`. Erasure channels use the exact extremal law; other channels are
/// transformed exactly and are limited to `n ≤ 4`.
pub fn channel_form(spec: &ChannelSpec, beta: f64, n_grid: &[u32]) -> Result<ChannelFormReport> {
    channel_form_capped(spec, beta, n_grid, DEFAULT_MAX_ENUM_STEPS)
}

pub fn channel_form_capped(
    spec: &ChannelSpec,
    beta: f64,
    n_grid: &[u32],
    max_enum_n: u32,
) -> Result<ChannelFormReport> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::param("beta", format!("{beta} must be positive")));
    }
    let channel = spec.channel()?;
    let params = channel.params();
    let mut rows = Vec::new();
    let mut stages = Vec::new();
    let row = |n: u32, probability: f64| ScalingRow {
        n,
        beta,
        threshold_log2: threshold_log2(beta, n),
        probability,
        bound: params.capacity,
        stderr: 0.0,
    };

    if let Some(eps) = spec.erasure_probability() {
        if eps <= 0.0 || eps >= 1.0 {
            // Zₙ stays at 0 or 1
            for &n in n_grid {
                rows.push(row(n, if eps <= 0.0 { 1.0 } else { 0.0 }));
            }
        } else {
            let mut order = n_grid.to_vec();
            order.sort_unstable();
            order.dedup();
            let mut dist = ZDistribution::point(eps, crate::zprocess::RuleKind::Extremal)?;
            let mut by_n = BTreeMap::new();
            for n in order {
                dist = dist.advance_capped(n - dist.n(), max_enum_n)?;
                by_n.insert(n, dist.cdf_at_log2(threshold_log2(beta, n)));
            }
            rows.extend(n_grid.iter().map(|n| row(*n, by_n[n])));
        }
    } else {
        let max_n = n_grid.iter().copied().max().unwrap_or(0);
        if max_n > GENERAL_MAX_STAGES {
            return Err(Error::param(
                "n",
                format!(
                    "non-erasure channels are limited to n ≤ {GENERAL_MAX_STAGES}, got {max_n}"
                ),
            ));
        }
        let mut level = vec![channel.clone()];
        let mut level_params = vec![params];
        let mut by_n = BTreeMap::new();
        for n in 0..=max_n {
            if n > 0 {
                let mut next = Vec::with_capacity(2 * level.len());
                let mut next_params = Vec::with_capacity(2 * level.len());
                let mut worst: f64 = 0.0;
                for (ch, p) in level.iter().zip(&level_params) {
                    let pair = polar_transform_merged(ch, DEFAULT_MERGE_TOL, DEFAULT_MAX_OUTPUTS)?;
                    let (pm, pp) = (pair.minus.params(), pair.plus.params());
                    worst = worst.max((pm.capacity + pp.capacity - 2.0 * p.capacity).abs());
                    next.extend([pair.minus, pair.plus]);
                    next_params.extend([pm, pp]);
                }
                level = next;
                level_params = next_params;
                stages.push(StageCheck {
                    n,
                    iz_inequalities_hold: level_params
                        .iter()
                        .all(|p| p.satisfies_iz_inequalities(1e-9)),
                    max_conservation_error: worst,
                    params: level_params.clone(),
                });
            }
            let t = threshold_log2(beta, n).exp2();
            let share = level_params.iter().filter(|p| p.bhattacharyya <= t).count() as f64
                / level_params.len() as f64;
            by_n.insert(n, share);
        }
        rows.extend(n_grid.iter().map(|n| row(*n, by_n[n])));
    }

    Ok(ChannelFormReport {
        channel: spec.to_string(),
        capacity: params.capacity,
        bhattacharyya: params.bhattacharyya,
        rows,
        stages,
    })
}
