use std::ops::Range;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{binary_entropy, chunked_trials, trial_rng, Estimate};
use crate::zprocess::{step, RuleKind, ZState};

/// Geometry of the interval argument: the extremal process runs freely up
/// to step `m = ⌈n^{3/4}⌉`, then `{m, …, n−1}` is cut into `k` blocks of
/// `a_n = ⌈√n⌉` steps plus a possibly shorter tail block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub n: u32,
    pub m: u32,
    pub a_n: u32,
    pub k: u32,
    pub beta: f64,
    pub z0: f64,
    /// Rate of the exponential pre-condition `Z_m ≤ ρ^m`.
    pub rho: f64,
}

impl BootstrapConfig {
    pub fn new(n: u32, beta: f64) -> Result<Self> {
        let m = (n as f64).powf(0.75).ceil() as u32;
        let a_n = (n as f64).sqrt().ceil() as u32;
        Self::with_geometry(n, m, a_n, beta)
    }

    pub fn with_geometry(n: u32, m: u32, a_n: u32, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::param("beta", format!("{beta} not in (0,1)")));
        }
        if a_n == 0 || m >= n {
            return Err(Error::param(
                "n",
                format!("no room for intervals with n={n}, m={m}"),
            ));
        }
        let k = (n - m) / a_n;
        if k == 0 {
            return Err(Error::param(
                "n",
                format!(
                    "interval partition of {{{m},…,{}}} into blocks of {a_n} is empty",
                    n - 1
                ),
            ));
        }
        Ok(BootstrapConfig {
            n,
            m,
            a_n,
            k,
            beta,
            z0: 0.5,
            rho: 7.0 / 8.0,
        })
    }

    pub fn with_z0(mut self, z0: f64) -> Self {
        self.z0 = z0;
        self
    }

    /// Steps `i` of block `j` (0-based); step `i` applies bit `B_{i+1}`.
    pub fn interval(&self, j: u32) -> Range<u32> {
        let start = self.m + j * self.a_n;
        start..start + self.a_n
    }

    /// The steps left over after the last full block, if any.
    pub fn tail(&self) -> Option<Range<u32>> {
        let start = self.m + self.k * self.a_n;
        (start < self.n).then_some(start..self.n)
    }

    /// End of the last full block, `m + k·a_n`.
    pub fn n_full(&self) -> u32 {
        self.m + self.k * self.a_n
    }

    /// `2^{−a_n(1 − h(β))}`, the bound on `P(E_j)`.
    pub fn interval_bound(&self) -> f64 {
        (-(self.a_n as f64) * (1.0 - binary_entropy(self.beta))).exp2()
    }

    /// `2^{−a_n β} ≤ β`: the block recursion then collapses to
    /// `log₂ Z ≤ 2^{(n−m)β}[log₂ Z_m + a_n]`.
    pub fn in_asymptotic_regime(&self) -> bool {
        (-(self.a_n as f64) * self.beta).exp2() <= self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalStat {
    pub start: u32,
    pub len: u32,
    /// Empirical frequency of `E_j = {Σ_{i∈J_j} B < a_n β}`.
    pub frequency: f64,
    pub stderr: f64,
    pub bound: f64,
    /// `frequency ≤ bound + 3·stderr`.
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub config: BootstrapConfig,
    pub trials: u64,
    pub seed: u64,
    pub intervals: Vec<IntervalStat>,
    pub tail: Option<(u32, u32)>,
    /// Bound is ≥ 1 (β ≥ ½), so the interval check says nothing.
    pub vacuous: bool,
    pub in_asymptotic_regime: bool,
    /// Frequency of `G = ∩ E_jᶜ` over the full blocks.
    pub g_frequency: f64,
    pub g_stderr: f64,
    /// `1 − k·2^{−a_n(1−h(β))}`.
    pub g_lower_bound: f64,
    pub g_within_bound: bool,
    /// Paths in `G ∩ {Z_m ≤ ρ^m}`.
    pub conditioned_paths: u64,
    /// Conditioned paths violating `log₂ Z ≤ 2^{(t−m)β}[log₂ Z_m + a_n]` at
    /// `t = m + k·a_n`, the end of the last full block.
    pub log_bound_violations: u64,
    /// The same inequality taken at `t = n`, tail block included.
    pub log_bound_violations_at_n: u64,
    /// Steps `i ≥ m` on any path with `Zᵢ > Z̃ᵢ`, where `Z̃` doubles instead
    /// of taking `2z − z²`.
    pub domination_violations: u64,
}

impl BootstrapReport {
    pub fn all_intervals_within_bound(&self) -> bool {
        self.intervals.iter().all(|s| s.within_bound)
    }
}

#[derive(Default, Clone)]
struct Tally {
    interval_hits: Vec<u64>,
    g_hits: u64,
    conditioned: u64,
    violations: u64,
    violations_at_n: u64,
    domination: u64,
}

/// Samples extremal paths and evaluates the interval events, the event `G`,
/// the conditional log-bound and the doubling-process domination.
pub fn bootstrap_diagnostic(
    cfg: &BootstrapConfig,
    trials: u64,
    seed: u64,
) -> Result<BootstrapReport> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let start = ZState::new(cfg.z0)?;
    let k = cfg.k as usize;
    let need = cfg.a_n as f64 * cfg.beta;
    let log_rho_m = cfg.m as f64 * cfg.rho.log2();
    let bound_at =
        |t: u32, log_zm: f64| ((t - cfg.m) as f64 * cfg.beta).exp2() * (log_zm + cfg.a_n as f64);

    let parts = chunked_trials(trials, |range| {
        let mut tally = Tally {
            interval_hits: vec![0; k],
            ..Tally::default()
        };
        for t in range {
            let mut rng = trial_rng(seed, t);
            let mut z = start;
            for _ in 0..cfg.m {
                z = step(z, rng.random::<bool>(), RuleKind::Extremal);
            }
            let log_zm = z.log2_z();
            let mut tilde = z;
            let mut ones = vec![0u32; k];
            let mut at_full = z;
            let mut dominated = true;
            for i in cfg.m..cfg.n {
                let b = rng.random::<bool>();
                z = step(z, b, RuleKind::Extremal);
                tilde = step(tilde, b, RuleKind::Doubling);
                dominated &= z <= tilde;
                let block = ((i - cfg.m) / cfg.a_n) as usize;
                if block < k {
                    ones[block] += b as u32;
                }
                if i + 1 == cfg.n_full() {
                    at_full = z;
                }
            }
            tally.domination += u64::from(!dominated);
            let mut in_g = true;
            for (hit, &c) in tally.interval_hits.iter_mut().zip(&ones) {
                let e = (c as f64) < need;
                *hit += e as u64;
                in_g &= !e;
            }
            tally.g_hits += in_g as u64;
            if in_g && log_zm <= log_rho_m {
                tally.conditioned += 1;
                if at_full.log2_z() > bound_at(cfg.n_full(), log_zm) {
                    tally.violations += 1;
                }
                if z.log2_z() > bound_at(cfg.n, log_zm) {
                    tally.violations_at_n += 1;
                }
            }
        }
        tally
    });

    let mut total = Tally {
        interval_hits: vec![0; k],
        ..Tally::default()
    };
    for p in parts {
        for (a, b) in total.interval_hits.iter_mut().zip(&p.interval_hits) {
            *a += b;
        }
        total.g_hits += p.g_hits;
        total.conditioned += p.conditioned;
        total.violations += p.violations;
        total.violations_at_n += p.violations_at_n;
        total.domination += p.domination;
    }

    let bound = cfg.interval_bound();
    let intervals = (0..cfg.k)
        .map(|j| {
            let e = Estimate::from_count(total.interval_hits[j as usize], trials);
            IntervalStat {
                start: cfg.interval(j).start,
                len: cfg.a_n,
                frequency: e.mean,
                stderr: e.stderr,
                bound,
                within_bound: e.mean <= bound + 3.0 * e.stderr,
            }
        })
        .collect();
    let g = Estimate::from_count(total.g_hits, trials);
    let g_lower_bound = 1.0 - cfg.k as f64 * bound;
    Ok(BootstrapReport {
        config: *cfg,
        trials,
        seed,
        intervals,
        tail: cfg.tail().map(|r| (r.start, r.end - r.start)),
        vacuous: bound >= 1.0,
        in_asymptotic_regime: cfg.in_asymptotic_regime(),
        g_frequency: g.mean,
        g_stderr: g.stderr,
        g_lower_bound,
        g_within_bound: g.mean >= g_lower_bound - 3.0 * g.stderr,
        conditioned_paths: total.conditioned,
        log_bound_violations: total.violations,
        log_bound_violations_at_n: total.violations_at_n,
        domination_violations: total.domination,
    })
}
