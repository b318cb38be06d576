use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "radmax",
    version,
    about = "Lower bounds for the L^p norms of centered maximal operators on radial measures",
    after_help = "Exit codes: 0 success, 1 usage or verification failure, 2 numerical or domain failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the result to this file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format [default: json for p0 and bound, csv for sweep and oracle]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for every random choice (Monte Carlo samples, random configurations)
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical exponent of one of the four constructions
    P0 {
        #[arg(value_enum)]
        target: Target,
    },
    /// Lower bound T(R, r) for one configuration, with every intermediate term
    Bound(BoundArgs),
    /// Bounds over a grid of dimensions, exponents and ratios, one CSV row each
    Sweep(SweepArgs),
    /// Run an invariant suite and report pass/fail per check
    Verify(VerifyArgs),
    /// Radial profile of the maximal function of the normalized indicator of B_r
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    General,
    GaussianLower,
    GaussianUpper,
    Unitball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    /// Balanced radius for any finite radially decreasing density
    Theorem1,
    /// R = exp(-cos²β₀/2) R_n for the Gaussian
    Gaussian,
    /// Decay bound for the Gaussian at given R, r
    GaussianUpper,
    /// Sandwich and case analysis for the unit ball
    Unitball,
    /// T(R, r) by quadrature only
    Exact,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// lebesgue, gaussian, unitball or tabulated:<path>
    #[arg(long)]
    pub measure: String,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p: f64,
    /// Ratio r/R
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Outer radius
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    /// Inner radius (defaults to lambda * R)
    #[arg(long = "r")]
    pub r: Option<f64>,
    /// [default: theorem1, or unitball/exact when --R is given]
    #[arg(long, value_enum)]
    pub construction: Option<Construction>,
    /// Largest dimension for which T is also computed by quadrature
    #[arg(long, default_value_t = radmax_core::bounds::DEFAULT_EXACT_THRESHOLD)]
    pub exact_threshold: u64,
    /// Allowed shortfall of logT_exact below logT_lower before the chain check fails
    #[arg(long, default_value_t = 1e-9)]
    pub chain_slack: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub measure: String,
    /// Dimensions: comma list and/or a:b:step ranges, e.g. 10:200:10,500
    #[arg(long)]
    pub n: String,
    /// Exponents, same syntax with real numbers
    #[arg(long, default_value = "1.005")]
    pub p: String,
    /// Ratios r/R, same syntax
    #[arg(long, default_value = "0.2")]
    pub lambda: String,
    #[arg(long, value_enum, default_value_t = SweepConstruction::Theorem1)]
    pub construction: SweepConstruction,
    /// Outer radius for the unitball construction
    #[arg(long = "R", default_value_t = 1.0)]
    pub big_r: f64,
    #[arg(long, default_value_t = radmax_core::bounds::DEFAULT_EXACT_THRESHOLD)]
    pub exact_threshold: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepConstruction {
    Theorem1,
    Gaussian,
    Unitball,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Monte Carlo samples per configuration
    #[arg(long, default_value_t = 10_000_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Spheres,
    GaussianLemmas,
    Remark,
    Inclusion,
    Montecarlo,
    All,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub measure: String,
    /// Dimension, at most 6
    #[arg(long)]
    pub n: u64,
    /// Radius of the test ball
    #[arg(long = "r")]
    pub r: f64,
    /// Radius the profile grid clusters around [default: 2r]
    #[arg(long = "R")]
    pub focus: Option<f64>,
    /// Profile grid size
    #[arg(long, default_value_t = radmax_core::oracle::PROFILE_POINTS)]
    pub points: usize,
    /// Last profile radius [default: support bound, or 2(R + r)]
    #[arg(long)]
    pub outer: Option<f64>,
    /// Also report the empirical lower bound on C_{μ,p} for these exponents
    #[arg(long)]
    pub p: Option<String>,
}
