//! Finite-n experiments on the rate of polarization.
//!
//! Tables compare `P(Zₙ ≤ 2^{−2^{βn}})` (direct) and `P(Zₙ ≥ 2^{−2^{βn}})`
//! (converse) against their limits and proven bounds. Asymptotic `liminf`
//! statements are reported as trend tables; nothing is extrapolated.

mod bootstrap;
mod curves;

use std::fmt::Write as _;

use serde::Serialize;

pub use bootstrap::{bootstrap_diagnostic, BootstrapConfig, BootstrapReport, IntervalStat};
pub use curves::{
    channel_form, channel_form_capped, converse_curve, direct_curve, ChannelFormReport, StageCheck,
};

use crate::error::{Error, Result};
use crate::zprocess::{RuleKind, DEFAULT_MAX_ENUM_STEPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub z0: f64,
    pub rule: RuleKind,
    pub beta_grid: Vec<f64>,
    pub n_grid: Vec<u32>,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    pub max_enum_n: u32,
}

impl ScalingConfig {
    /// Extremal process from `z0` with the default enumeration cap.
    pub fn new(z0: f64, beta_grid: Vec<f64>, n_grid: Vec<u32>, mode: Mode) -> Self {
        ScalingConfig {
            z0,
            rule: RuleKind::Extremal,
            beta_grid,
            n_grid,
            mode,
            trials: 100_000,
            seed: 0,
            max_enum_n: DEFAULT_MAX_ENUM_STEPS,
        }
    }

    pub fn with_rule(mut self, rule: RuleKind) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_trials(mut self, trials: u64, seed: u64) -> Self {
        self.trials = trials;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z0 > 0.0 && self.z0 < 1.0) {
            return Err(Error::param("z0", format!("{} not in (0,1)", self.z0)));
        }
        if self.beta_grid.is_empty() || self.n_grid.is_empty() {
            return Err(Error::param("grid", "beta and n grids must be non-empty"));
        }
        if let Some(b) = self
            .beta_grid
            .iter()
            .find(|b| !(**b > 0.0 && b.is_finite()))
        {
            return Err(Error::param("beta", format!("{b} must be positive")));
        }
        match self.mode {
            Mode::Exact => {
                let max_n = *self.n_grid.iter().max().expect("non-empty");
                if max_n > self.max_enum_n {
                    return Err(Error::ResourceCap {
                        what: "exact enumeration",
                        requested: max_n as u64,
                        limit: self.max_enum_n as u64,
                        flag: "--max-enum-n",
                    });
                }
            }
            Mode::MonteCarlo => {
                if self.trials == 0 {
                    return Err(Error::param("trials", "must be at least 1"));
                }
            }
        }
        Ok(())
    }
}

/// `log₂` of the threshold `2^{−2^{βn}}`.
pub fn threshold_log2(beta: f64, n: u32) -> f64 {
    -(beta * n as f64).exp2()
}

/// One grid point. `bound` is the reference the probability is compared
/// with: the limit for direct curves, the proven lower bound for converse
/// curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: u32,
    pub beta: f64,
    pub threshold_log2: f64,
    pub probability: f64,
    pub bound: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveReport {
    pub rows: Vec<ScalingRow>,
    pub notes: Vec<String>,
}

impl CurveReport {
    pub const CSV_HEADER: &'static str = "n,beta,threshold_log2,probability,bound,stderr";

    pub fn row(&self, n: u32, beta: f64) -> Option<&ScalingRow> {
        self.rows.iter().find(|r| r.n == n && r.beta == beta)
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

pub fn rows_to_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::new();
    out.push_str(CurveReport::CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n, r.beta, r.threshold_log2, r.probability, r.bound, r.stderr
        );
    }
    out
}

/// Gnuplot script plotting `probability` against `n`, one line per β.
/// `skip` is the number of lines before the first data row.
pub fn gnuplot_script(csv_path: &str, title: &str, betas: &[f64], skip: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set title '{title}'");
    let _ = writeln!(out, "set xlabel 'n'");
    let _ = writeln!(out, "set ylabel 'probability'");
    let _ = writeln!(out, "set key bottom right");
    let plots: Vec<String> = betas
        .iter()
        .map(|b| {
            format!(
                "'{csv_path}' using 1:($2=={b} ? $4 : 1/0) skip {skip} with linespoints title 'beta={b}', \
                 '{csv_path}' using 1:($2=={b} ? $5 : 1/0) skip {skip} with lines dashtype 2 title 'bound beta={b}'"
            )
        })
        .collect();
    let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    out
}
