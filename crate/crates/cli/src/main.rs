use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

mod commands;
mod io;

#[derive(Parser, Debug)]
#[command(name = "rrk", version, about = "Rate regions of random code ensembles over interference networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of I(X_T; Y_l | X_{S\T}, Q) for every receiver and T ⊆ S.
    Info(InfoArgs),
    /// Export a rate region, optionally with membership and boundary output.
    Region(RegionArgs),
    /// Fuzz the min form against the MAC form.
    Equiv(EquivArgs),
    /// Rate-splitting pipeline for a two-user-pair channel.
    Hk(HkArgs),
    /// Error probabilities of random codes at tiny blocklengths.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct Input {
    /// Network JSON, optionally carrying the input ensemble.
    #[arg(long)]
    pub spec: PathBuf,
    /// Ensemble JSON; overrides any ensemble in the network file.
    #[arg(long)]
    pub ensemble: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InfoArgs {
    #[command(flatten)]
    pub input: Input,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Mac,
    Min,
    Optimal,
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value = "optimal")]
    pub form: Form,
    /// 1-based receiver; all receivers when omitted.
    #[arg(long)]
    pub receiver: Option<usize>,
    /// Rate tuple to classify, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub rates: Option<Vec<f64>>,
    /// Boundary output file (.csv or .svg); may be repeated. Two senders only.
    #[arg(long)]
    pub boundary: Vec<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct EquivArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub receiver: Option<usize>,
    /// Refuse networks with more senders than this.
    #[arg(long, default_value_t = 4)]
    pub max_senders: usize,
}

#[derive(Args, Debug)]
pub struct HkArgs {
    /// Rate-split ensemble JSON.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// Half-width of the band ignored by grid comparisons.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Also require projection = compact form and projection = 16-case union.
    #[arg(long)]
    pub require_equal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Exact,
    MonteCarlo,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: Input,
    /// Rates in bits per channel use, one per sender.
    #[arg(long, value_delimiter = ',', required = true)]
    pub rates: Vec<f64>,
    /// Blocklengths.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub n: Vec<usize>,
    /// Decoders (mld, sml, score, snd, sd, ian) or `all`.
    #[arg(long, value_delimiter = ',', default_value = "mld")]
    pub decoder: Vec<String>,
    /// Typicality threshold for snd, sd and ian.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    /// Monte Carlo trials.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Codebooks averaged in exact mode.
    #[arg(long, default_value_t = 20)]
    pub codebooks: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Info(a) => commands::info(a),
        Command::Region(a) => commands::region(a),
        Command::Equiv(a) => commands::equiv(a),
        Command::Hk(a) => commands::hk(a),
        Command::Simulate(a) => commands::simulate(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let kind = e.chain().find_map(|c| c.downcast_ref::<rrk::Error>()).map(error_kind).unwrap_or("io");
            let failure = json!({ "status": "error", "kind": kind, "message": format!("{e:#}") });
            println!("{failure}");
            ExitCode::from(2)
        }
    }
}

fn error_kind(e: &rrk::Error) -> &'static str {
    match e {
        rrk::Error::Config(_) => "config",
        rrk::Error::Usage(_) => "usage",
        rrk::Error::Consistency(_) => "consistency",
        rrk::Error::Parse(_) => "parse",
        rrk::Error::CapExceeded(_) => "cap_exceeded",
    }
}
