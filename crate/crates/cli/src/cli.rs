use std::path::PathBuf;

use bernstein_core::DEFAULT_HORIZON;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::artifact::Format;

#[derive(Debug, Parser)]
#[command(name = "bernstein", version, about = "Bernstein classes, error sequences and graph covering estimates")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Evaluation horizon for scans and certificates.
    #[arg(long, global = true, env = "BERNSTEIN_HORIZON", default_value_t = DEFAULT_HORIZON,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub horizon: u64,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write an SVG plot here.
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
    /// Exit with status 2 when a verdict is inconclusive.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scale and weight functions.
    #[command(subcommand)]
    Rates(RatesCmd),
    /// Constructions: Bernstein realizations and separating sequences.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Class membership of an error sequence.
    Classify(ClassifyArgs),
    /// Split a Wiener element into two well-approximable parts.
    Split(SplitArgs),
    /// The Wiener coefficient model.
    #[command(subcommand)]
    Wiener(WienerCmd),
    /// Discrete best uniform approximation and Markov constants.
    #[command(subcommand)]
    Minimax(MinimaxCmd),
    /// Covering estimates for graphs and level sets.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Run the standard set of checks and tabulate them.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoleArg {
    Scale,
    Weight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeOp {
    Join,
    Meet,
}

#[derive(Debug, Subcommand)]
pub enum RatesCmd {
    /// Tabulate a rate function.
    Eval(RateEvalArgs),
    /// Order relation up to constants.
    Compare(CompareArgs),
    /// Join or meet of two rates.
    Lattice(LatticeArgs),
    /// Σ(κ)(n), the tail sums of a weight.
    Sigma(SigmaArgs),
    /// The stretch function ξ and its sandwich.
    Xi(XiArgs),
    /// Integrability of a gauge against s.
    Gauge(GaugeArgs),
    /// Whether κ belongs to the weights attached to φ.
    Member(MemberArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct RateEvalArgs {
    /// Rate in the mini-grammar, or @file.json.
    #[arg(long)]
    pub rate: String,
    #[arg(long, value_enum, default_value = "scale")]
    pub role: RoleArg,
    #[arg(long, default_value_t = 32)]
    pub n_max: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long, value_enum, default_value = "scale")]
    pub role: RoleArg,
}

#[derive(Debug, Args, Serialize)]
pub struct LatticeArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long, value_enum)]
    pub op: LatticeOp,
    #[arg(long, value_enum, default_value = "scale")]
    pub role: RoleArg,
    #[arg(long, default_value_t = 32)]
    pub n_max: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SigmaArgs {
    /// Weight function.
    #[arg(long)]
    pub kappa: String,
    #[arg(long, default_value_t = 32)]
    pub n_max: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct XiArgs {
    /// Scale function; normalized to φ(1) = 1.
    #[arg(long)]
    pub phi: String,
    #[arg(long, default_value_t = 1)]
    pub from: u64,
    #[arg(long, default_value_t = 10_000)]
    pub to: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct GaugeArgs {
    /// power:α, log:k or double-log:s,ε
    #[arg(long)]
    pub psi: String,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct MemberArgs {
    #[arg(long)]
    pub kappa: String,
    #[arg(long)]
    pub phi: String,
}

#[derive(Debug, Subcommand)]
pub enum ConstructCmd {
    /// Wiener element whose error sequence is exactly the target.
    Bernstein(BernsteinArgs),
    /// Error sequence with closed-form tail for a target rate.
    Errors(TargetArgs),
    /// Step sequence in the second class of φ′ but not of φ.
    Separation(SeparationArgs),
    /// Sequence in the first class of κ built from its separating profile.
    Beurling(BeurlingArgs),
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["target", "errors"])))]
pub struct BernsteinArgs {
    /// Power c/n^p or geometric c·r^n target.
    #[arg(long)]
    pub target: Option<String>,
    /// Error sequence file (CSV or JSON).
    #[arg(long)]
    pub errors: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct TargetArgs {
    #[arg(long)]
    pub target: String,
    /// Rows written to CSV.
    #[arg(long, default_value_t = 64)]
    pub n_max: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SeparationArgs {
    #[arg(long)]
    pub phi: String,
    #[arg(long)]
    pub phi_prime: String,
    /// Explicit subsequence starts; powers of 4 follow.
    #[arg(long, value_delimiter = ',')]
    pub starts: Vec<u64>,
    #[arg(long, default_value_t = 64)]
    pub n_max: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BeurlingArgs {
    #[arg(long)]
    pub kappa: String,
    #[arg(long, default_value_t = 3)]
    pub blocks: usize,
    #[arg(long, default_value_t = 64)]
    pub n_max: u64,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("class").required(true).args(["scale", "weight"])))]
pub struct ClassifyArgs {
    /// Error sequence file: CSV (n, E_n) or JSON.
    #[arg(long)]
    pub errors: String,
    /// Second class of this scale function.
    #[arg(long)]
    pub scale: Option<String>,
    /// First class of this weight function.
    #[arg(long)]
    pub weight: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = 3)]
    pub witnesses: usize,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "target"])))]
pub struct SplitArgs {
    /// Wiener element file.
    #[arg(long = "in")]
    pub input: Option<String>,
    /// Realize this target first.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub phi: String,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = 20)]
    pub boundaries: usize,
}

#[derive(Debug, Subcommand)]
pub enum WienerCmd {
    /// E_i(f), the coefficient tail sum.
    En(EnArgs),
    /// ‖f‖.
    Norm(InArgs),
    /// Partial sum at an angle.
    Eval(EvalArgs),
    /// Randomized degree-i candidates against the truncation.
    Check(CheckArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct InArgs {
    #[arg(long = "in")]
    pub input: String,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("which").required(true).args(["i", "n_max"])))]
pub struct EnArgs {
    #[arg(long = "in")]
    pub input: String,
    #[arg(long)]
    pub i: Option<u64>,
    /// Profile E_1..E_{n_max}.
    #[arg(long)]
    pub n_max: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long = "in")]
    pub input: String,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 1000)]
    pub cutoff: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long = "in")]
    pub input: String,
    #[arg(long)]
    pub i: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    /// Algebraic polynomials on [-1, 1].
    Chebyshev,
    /// Trigonometric polynomials on the circle.
    Trig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    /// Bernstein's lacunary nowhere-differentiable function.
    BernsteinNondiff,
    Abs,
    SqrtAbs,
    Exp,
    Runge,
}

/// Where a sampled function comes from.
#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("function").required(true).args(["func", "input"])))]
pub struct FnSource {
    /// Built-in function on [-1, 1]; on the circle it is sampled as f(cos t).
    #[arg(long = "fn", value_enum)]
    pub func: Option<Builtin>,
    /// Sampled function file: CSV (x, v...) or JSON.
    #[arg(long = "in")]
    pub input: Option<String>,
    /// Grid intervals for built-in functions.
    #[arg(long)]
    pub points: Option<usize>,
    /// Terms of the nowhere-differentiable series.
    #[arg(long, default_value_t = 4)]
    pub budget: u32,
}

#[derive(Debug, Subcommand)]
pub enum MinimaxCmd {
    /// Best uniform approximation of one degree.
    Fit(FitArgs),
    /// E_n for n = 1..n_max.
    Profile(ProfileArgs),
    /// Markov constants of the approximating spaces.
    Markov(MarkovArgs),
    /// Write the samples of a function.
    Sample(SampleArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub source: FnSource,
    #[arg(long, value_enum, default_value = "chebyshev")]
    pub basis: BasisArg,
    #[arg(long)]
    pub degree: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub source: FnSource,
    #[arg(long, value_enum, default_value = "chebyshev")]
    pub basis: BasisArg,
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MarkovArgs {
    #[arg(long, value_enum, default_value = "chebyshev")]
    pub basis: BasisArg,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Restrict to [s, t] (interval) or an arc of the circle.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub subset: Option<Vec<f64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub source: FnSource,
    #[arg(long, value_enum, default_value = "chebyshev")]
    pub basis: BasisArg,
}

#[derive(Debug, Subcommand)]
pub enum GraphCmd {
    /// Box-counting slope of a graph.
    Boxdim(BoxdimArgs),
    /// Tube cover of a graph from best approximations.
    Cover(CoverArgs),
    /// Covering numbers of a graph.
    Covering(CoveringArgs),
    /// Gauge sum over one level set.
    Level(LevelArgs),
    /// Integral of level-set sums against the graph sum.
    Coarea(CoareaArgs),
    /// Growth conditions linking φ and the Markov constants.
    Conditions(ConditionsArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BoxdimArgs {
    #[command(flatten)]
    pub source: FnSource,
    /// Exponents j of the scales 2^-j: a range `a..b` or a list.
    #[arg(long, default_value = "4..12")]
    pub scales: String,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverArgs {
    #[command(flatten)]
    pub source: FnSource,
    #[arg(long, value_enum, default_value = "trig")]
    pub basis: BasisArg,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
    pub degrees: Vec<usize>,
    #[arg(long, default_value = "log:1")]
    pub psi: String,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Markov constant; defaults to n (trig) or n² (chebyshev).
    #[arg(long)]
    pub markov: Option<f64>,
    /// Tube width; defaults to the achieved deviation.
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct CoveringArgs {
    #[command(flatten)]
    pub source: FnSource,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[arg(long)]
    pub psi: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct LevelArgs {
    #[command(flatten)]
    pub source: FnSource,
    #[arg(long, allow_hyphen_values = true)]
    pub level: f64,
    #[arg(long, default_value = "power:1")]
    pub psi: String,
    #[arg(long, default_value_t = 0.0)]
    pub k: f64,
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CoareaArgs {
    #[command(flatten)]
    pub source: FnSource,
    #[arg(long, default_value = "power:1")]
    pub psi: String,
    #[arg(long, default_value_t = 0.0)]
    pub k: f64,
    #[arg(long, default_value_t = 200)]
    pub levels: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ConditionsArgs {
    #[arg(long)]
    pub phi: String,
    #[arg(long, value_enum, default_value = "chebyshev")]
    pub basis: BasisArg,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Degrees tabulated for the Markov constants.
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Samples for the box-counting check.
    #[arg(long, default_value_t = 1 << 16)]
    pub points: usize,
}
