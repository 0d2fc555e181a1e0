use clap::{Args, Subcommand, ValueEnum};
use polarrate::bdmc::{DEFAULT_MAX_OUTPUTS, DEFAULT_MERGE_TOL};
use polarrate::polarcode::MAX_SPECTRUM_STAGES;
use polarrate::zprocess::DEFAULT_MAX_ENUM_STEPS;
use polarrate::{ChannelSpec, RuleKind};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symmetric capacity and Bhattacharyya parameter of a channel, as JSON.
    ChannelInfo {
        /// bec:<eps>, bsc:<p> or @file.json
        channel: ChannelSpec,
    },
    /// One polarizing step W -> (W-, W+), as JSON.
    Transform {
        channel: ChannelSpec,
        /// Merge outputs with equal posteriors.
        #[arg(long)]
        merge: bool,
        #[arg(long, default_value_t = DEFAULT_MERGE_TOL)]
        merge_tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_OUTPUTS)]
        max_outputs: usize,
    },
    /// Bhattacharyya values of all 2^n synthesized erasure channels, as CSV.
    Spectrum {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        stages: StageCap,
    },
    /// Build a polar code for BEC(eps), as JSON.
    Construct {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: u32,
        /// Fraction of information bits, in (0, 1].
        #[arg(
            long,
            required_unless_present = "union_bound",
            conflicts_with = "union_bound"
        )]
        rate: Option<f64>,
        /// Instead of --rate: the largest code whose union bound is at most this.
        #[arg(long)]
        union_bound: Option<f64>,
        #[command(flatten)]
        stages: StageCap,
    },
    /// Encode a random message, erase symbols and decode once, as JSON.
    CodecDemo {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo block error rate with a Wilson 95% interval, as CSV.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Polarization of a channel: per-index table, exact Z-process law, or sample paths.
    Polarize {
        channel: ChannelSpec,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = PolarizeView::Table)]
        view: PolarizeView,
        /// Z-process rule for the distribution and paths views.
        #[arg(long, value_enum, default_value_t = RuleArg::Extremal)]
        rule: RuleArg,
        /// Number of sample paths in the paths view.
        #[arg(long, default_value_t = 10)]
        paths: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MERGE_TOL)]
        merge_tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_OUTPUTS)]
        max_outputs: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ENUM_STEPS)]
        max_enum_n: u32,
        #[command(flatten)]
        stages: StageCap,
    },
    /// P(Z_n <= 2^-2^(beta n)) over a grid, as CSV.
    ScalingDirect(ScalingArgs),
    /// P(Z_n >= 2^-2^(beta n)) over a grid with the binomial lower bound, as CSV.
    ScalingConverse(ScalingArgs),
    /// Interval diagnostics for the extremal process, as JSON.
    Bootstrap {
        #[arg(long, default_value_t = 100)]
        n: u32,
        #[arg(long, default_value_t = 0.4)]
        beta: f64,
        #[arg(long, default_value_t = 0.5)]
        z0: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ChannelInfo { .. } => "channel-info",
            Command::Transform { .. } => "transform",
            Command::Spectrum { .. } => "spectrum",
            Command::Construct { .. } => "construct",
            Command::CodecDemo { .. } => "codec-demo",
            Command::Simulate { .. } => "simulate",
            Command::Polarize { .. } => "polarize",
            Command::ScalingDirect(_) => "scaling-direct",
            Command::ScalingConverse(_) => "scaling-converse",
            Command::Bootstrap { .. } => "bootstrap",
        }
    }
}

#[derive(Debug, Args)]
pub struct StageCap {
    /// Largest n for which the 2^n spectrum is built.
    #[arg(long, default_value_t = MAX_SPECTRUM_STAGES)]
    pub max_stages: u32,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    /// Erasure probability of the channel.
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub n: u32,
    /// Fraction of information bits, in (0, 1].
    #[arg(long)]
    pub rate: f64,
    /// Erasure probability the code is designed for [default: --eps].
    #[arg(long)]
    pub design_eps: Option<f64>,
    #[command(flatten)]
    pub stages: StageCap,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Starting value of the process.
    #[arg(long, default_value_t = 0.5, conflicts_with = "channel")]
    pub z0: f64,
    /// Use thresholds 2^-N^beta (N = 2^n) for this channel, with I(W) as reference.
    #[arg(long, conflicts_with_all = ["rule", "mode"])]
    pub channel: Option<ChannelSpec>,
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',', required = true)]
    pub beta: Vec<f64>,
    /// Comma-separated step counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u32>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = RuleArg::Extremal)]
    pub rule: RuleArg,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ENUM_STEPS)]
    pub max_enum_n: u32,
    /// Also write a gnuplot script next to the CSV (requires --out).
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolarizeView {
    /// I and Z of every synthesized channel.
    Table,
    /// Exact law of Z_n started at Z(W).
    Distribution,
    /// Random Z-process paths started at Z(W).
    Paths,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Extremal,
    Lower,
    Doubling,
}

impl From<RuleArg> for RuleKind {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Extremal => RuleKind::Extremal,
            RuleArg::Lower => RuleKind::Lower,
            RuleArg::Doubling => RuleKind::Doubling,
        }
    }
}
