//! `implaus`: p-values as plausibilities from the command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad arguments, 3 the model
//! refuses (empty focal sets or a failed assumption), 4 an audit failed.

mod commands;
mod ingest;
mod null;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use implaus::pvalue::Tail;
use serde::Serialize;
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "implaus", version, about = "Inferential models: p-values as plausibilities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// p-value of a null next to its plausibility under the matching random set
    #[command(allow_negative_numbers = true)]
    Pval(PvalArgs),
    /// Plausibility of a one-sided null as its boundary moves, as CSV and SVG
    #[command(allow_negative_numbers = true)]
    Curve(CurveArgs),
    /// Plausibility region {θ : pl({θ}) > α}
    #[command(allow_negative_numbers = true)]
    Region(RegionArgs),
    /// Monte Carlo validity audit; exit 4 when it fails
    #[command(allow_negative_numbers = true)]
    Validate(ValidateArgs),
    /// n, mean and sample variance of a column of raw observations
    Ingest(IngestArgs),
    /// p-values of nested nulls against one-random-set plausibilities
    #[command(allow_negative_numbers = true)]
    Coherence(CoherenceArgs),
    /// Re-run the command recorded in a manifest
    Replay(ReplayArgs),
    /// Print the JSON schema of command output
    Schema,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ModelArgs {
    /// binomial, normal-mean, normal-variance or normal-mean-constrained
    #[arg(long)]
    pub model: String,
    /// Sample size (taken from --data when given)
    #[arg(long)]
    pub n: Option<u64>,
    /// Known standard deviation of the normal-mean models
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Lower end of the constrained mean
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub lo: f64,
    /// Upper end of the constrained mean
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ObsArgs {
    /// Observed statistic: the count (binomial), the sample mean (normal-mean)
    /// or (n − 1)·S² (normal-variance)
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Sample variance S², normal-variance only
    #[arg(long, conflicts_with = "x")]
    pub s2: Option<f64>,
    /// CSV or JSON file of raw observations (0/1 outcomes for binomial)
    #[arg(long, conflicts_with_all = ["x", "s2"])]
    pub data: Option<PathBuf>,
    /// Column of --data, by header name or 0-based index
    #[arg(long, requires = "data")]
    pub column: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NullArgs {
    /// Null hypothesis, e.g. "theta<=0.5", "theta==0.5", "0.2<=theta<=0.4"
    #[arg(long = "null", allow_hyphen_values = true)]
    pub null: Option<String>,
    /// Shorthand for --null "theta<=THETA0"
    #[arg(long, conflicts_with = "null", allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    /// Shorthand for --null "theta<=SIGMA0_SQ" on the variance
    #[arg(long = "sigma0-sq", conflicts_with_all = ["null", "theta0"])]
    pub sigma0_sq: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunArgs {
    /// Seed for every Monte Carlo step
    #[arg(long, env = "IMPLAUS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Tie convention of discrete p-values: weak P(T ≥ t) or strict P(T > t)
    #[arg(long, value_enum, default_value_t = TailArg::Weak)]
    pub tail: TailArg,
    /// Also write the JSON output here, with a manifest next to it
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailArg {
    Weak,
    Strict,
}

impl From<TailArg> for Tail {
    fn from(t: TailArg) -> Self {
        match t {
            TailArg::Weak => Tail::Weak,
            TailArg::Strict => Tail::Strict,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Auto,
    ClosedForm,
    Grid,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StatArg {
    /// T(x) = x
    Identity,
    /// T(x) = distance from x to the null
    Distance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrsArg {
    /// S = [0, U)
    OneSided,
    /// S = {u : |u − ½| ≤ |U − ½|}
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeArg {
    /// θ ≤ θ₀
    Below,
    /// θ ≥ θ₀
    Above,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub obs: ObsArgs,
    #[command(flatten)]
    pub null: NullArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value_t = StatArg::Identity)]
    pub stat: StatArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Samples per Monte Carlo tail
    #[arg(long, default_value_t = 100_000)]
    pub mc_samples: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GridArgs {
    /// First grid value
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    /// Last grid value
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Number of grid values
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub obs: ObsArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Null family swept by the grid: θ ≤ θ₀ or θ ≥ θ₀
    #[arg(long, value_enum, default_value_t = ShapeArg::Below)]
    pub shape: ShapeArg,
    /// Height of the reference line
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// CSV output with columns theta0,plausibility
    #[arg(long)]
    pub csv: PathBuf,
    /// SVG plot of the curve
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RegionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub obs: ObsArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = PrsArg::OneSided)]
    pub prs: PrsArg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub null: NullArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// True parameter the data are simulated at
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub reps: usize,
    /// α values of the audit, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0])]
    pub alphas: Vec<f64>,
    /// Audit a deliberately broken random set (measure raised to the power ½)
    #[arg(long)]
    pub negative_control: bool,
    /// Also check pl({θ}) ~ Unif(0, 1) at the true θ
    #[arg(long)]
    pub uniformity: bool,
    /// Also check coverage of the plausibility region at this α
    #[arg(long)]
    pub coverage: Option<f64>,
    /// Random set of the coverage check
    #[arg(long, value_enum, default_value_t = PrsArg::OneSided)]
    pub prs: PrsArg,
    /// Run replications on one thread
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct IngestArgs {
    /// CSV or JSON file with one numeric column
    pub file: PathBuf,
    /// Column by header name or 0-based index
    #[arg(long)]
    pub column: Option<String>,
    /// csv or json; guessed from the extension otherwise
    #[arg(long)]
    pub format: Option<String>,
    /// Also write the JSON output here, with a manifest next to it
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CoherenceArgs {
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Nested nulls, smallest first; repeat the flag
    #[arg(long = "null", required = true, num_args = 1, allow_hyphen_values = true)]
    pub nulls: Vec<String>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, value_enum, default_value_t = PrsArg::Symmetric)]
    pub prs: PrsArg,
    /// Include every row in the output
    #[arg(long)]
    pub rows: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Why a command did not produce a normal result.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Refused { message: String, body: Value },
    Io(String),
}

impl From<implaus::ImError> for Failure {
    fn from(e: implaus::ImError) -> Self {
        use implaus::ImError::*;
        match e {
            Domain(_) | Config(_) => Failure::Usage(e.to_string()),
            Unsupported(_) | Assumption(_) | EmptyFocal { .. } => Failure::Refused {
                message: e.to_string(),
                body: serde_json::json!({ "error": e.to_string() }),
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match commands::run(cli, argv) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Refused { message, body }) => {
            print!("{}", output::to_pretty(&body));
            eprintln!("refused: {message}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
