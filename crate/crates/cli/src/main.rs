//! `betadim`: batch experiments on b-ary and β-expansions.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{CliError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "betadim", version, about = "Uniform exponents, β-shifts and Cantor-type constructions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Working precision in bits for certified arithmetic.
    #[arg(long, global = true, env = "BETADIM_PRECISION", default_value_t = 256)]
    pub precision: u32,
    /// Output format; each command picks a sensible default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<String>,
    /// Seed for the `seed:` fill policy when `--fill` is not given.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
    Digits,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Digits => "digits",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Digits of a rational or lacunary number in base b, or greedy β-digits.
    Expand(ExpandArgs),
    /// The expansion of 1: `d*_β(1)` by default, `d_β(1)` with `--greedy`.
    ExpandOne(ExpandOneArgs),
    /// Count, list or check words of the β-shift.
    Admissible {
        #[command(subcommand)]
        action: AdmissibleCmd,
    },
    /// Certified basic interval of an admissible word.
    Cylinder(CylinderArgs),
    /// Run decomposition and exponent estimates of a digit file.
    Exponents(ExponentsArgs),
    /// Generate a point of a Cantor-type construction.
    Construct {
        #[command(subcommand)]
        kind: ConstructCmd,
    },
    /// Bernoulli measure of a construction's cylinder.
    Measure(MeasureArgs),
    /// Dimension formulas, local-dimension trajectories and critical exponents.
    Dim {
        #[command(subcommand)]
        action: DimCmd,
    },
    /// Self-admissibility and inversion of expansions of 1.
    Parry {
        #[command(subcommand)]
        action: ParryCmd,
    },
    /// Re-run the command recorded in an output file's configuration.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("system").required(true).args(["base", "beta"])))]
#[command(group(clap::ArgGroup::new("number").required(true).args(["x", "lacunary", "lacunary_squared"])))]
pub struct ExpandArgs {
    #[arg(long)]
    pub base: Option<u32>,
    /// β specification: int:<k>, root:<c1,...>, word:<w>, approx:<spec>:<N>.
    #[arg(long)]
    pub beta: Option<String>,
    /// A rational in [0, 1] as p/q.
    #[arg(long)]
    pub x: Option<String>,
    /// Lacunary series with exponents ⌊(1+v)^j⌋.
    #[arg(long, value_name = "V")]
    pub lacunary: Option<String>,
    /// Lacunary series with exponents 2^(j²).
    #[arg(long)]
    pub lacunary_squared: bool,
    #[arg(long)]
    pub digits: usize,
}

#[derive(Args, Debug)]
pub struct ExpandOneArgs {
    #[arg(long)]
    pub beta: String,
    #[arg(long)]
    pub digits: usize,
    /// Greedy `d_β(1)` instead of the infinite form.
    #[arg(long)]
    pub greedy: bool,
}

#[derive(Subcommand, Debug)]
pub enum AdmissibleCmd {
    /// Number of admissible words of a length.
    Count {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        len: usize,
        /// Also check Rényi's bounds.
        #[arg(long)]
        renyi: bool,
    },
    /// Stream the admissible words of a length in lexicographic order.
    List {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        len: usize,
    },
    /// Admissibility and fullness of one word.
    Check {
        #[arg(long)]
        beta: String,
        /// Digits, e.g. `1010` or `1 0 1 0`.
        #[arg(long)]
        word: String,
    },
}

#[derive(Args, Debug)]
pub struct CylinderArgs {
    #[arg(long)]
    pub beta: String,
    #[arg(long)]
    pub word: String,
}

#[derive(Args, Debug)]
pub struct ExponentsArgs {
    /// Digit file (`base=<b>` header, then digits).
    #[arg(long)]
    pub input: String,
    /// Count runs of zeros only, as for β-expansions.
    #[arg(long)]
    pub zeros_only: bool,
    /// Number of trailing stages the estimates use.
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ScheduleArgs {
    #[arg(long)]
    pub theta: String,
    #[arg(long)]
    pub vhat: String,
}

#[derive(Args, Debug, Clone)]
pub struct FillArgs {
    /// Number of digits to produce.
    #[arg(long)]
    pub depth: u64,
    /// Fill policy for free digits: const:<d>, seed:<n> or stream:<digits>.
    #[arg(long)]
    pub fill: Option<String>,
    /// JSON sidecar path; defaults to `<output>.json` when writing a file.
    #[arg(long)]
    pub sidecar: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum ConstructCmd {
    /// Point of `E_{θ,v̂}` in base b.
    Bary {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        fill: FillArgs,
        #[arg(long)]
        base: u32,
    },
    /// Point of `E_{θ,v̂} ∩ K_{b,S}`.
    Restricted {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        fill: FillArgs,
        #[arg(long)]
        base: u32,
        /// Allowed digits, e.g. `0,2`.
        #[arg(long)]
        set: String,
    },
    /// β construction with `0^N 1 0^N` blocks, filled from `Σ_{β_N}`.
    Beta {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        fill: FillArgs,
        #[arg(long)]
        beta: String,
        #[arg(long = "big-n")]
        big_n: usize,
    },
    /// Expansion of 1 for a base between β0 and β1.
    Param {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        fill: FillArgs,
        #[arg(long)]
        beta0: String,
        #[arg(long)]
        beta1: String,
        #[arg(long)]
        beta2: String,
        #[arg(long = "big-n")]
        big_n: usize,
    },
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["sidecar", "theta"])))]
pub struct MeasureArgs {
    /// Sidecar written by `construct`.
    #[arg(long)]
    pub sidecar: Option<String>,
    #[arg(long, requires = "vhat")]
    pub theta: Option<String>,
    #[arg(long, requires = "theta")]
    pub vhat: Option<String>,
    #[arg(long, conflicts_with = "sidecar")]
    pub base: Option<u32>,
    #[arg(long, conflicts_with = "sidecar")]
    pub set: Option<String>,
    #[arg(long, conflicts_with_all = ["sidecar", "base"])]
    pub beta: Option<String>,
    #[arg(long = "big-n", requires = "beta")]
    pub big_n: Option<usize>,
    /// Stages of the schedule when building it from parameters.
    #[arg(long, default_value_t = 20)]
    pub stages: usize,
    /// Cylinder depth n.
    #[arg(long)]
    pub depth: u64,
    /// Digit file whose first `depth` digits name the cylinder.
    #[arg(long)]
    pub word_file: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum DimCmd {
    /// `(θ-1-θv̂)/((1+θv̂)(θ-1))`, scaled by `log #S/log b` with `--set`.
    Formula {
        /// θ as p/q, or `inf`.
        #[arg(long)]
        theta: String,
        #[arg(long)]
        vhat: String,
        #[arg(long, requires = "set")]
        base: Option<u32>,
        #[arg(long, requires = "base")]
        set: Option<String>,
    },
    /// Supremum over θ, attained at `θ₀ = 2/(1-v̂)`.
    Sup {
        #[arg(long)]
        vhat: String,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Local-dimension ratios at the construction's checkpoints.
    Local {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long)]
        stages: usize,
        #[arg(long, conflicts_with = "beta")]
        base: Option<u32>,
        #[arg(long, requires = "base")]
        set: Option<String>,
        #[arg(long, requires = "big_n")]
        beta: Option<String>,
        #[arg(long = "big-n")]
        big_n: Option<usize>,
        #[arg(long, default_value = "1/100")]
        tol: String,
    },
    /// Critical exponent of the covering series.
    S0 {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, default_value = "0")]
        eps: String,
        /// Also probe truncated partial sums on both sides.
        #[arg(long)]
        probe: bool,
    },
    /// The formula with `v̂ = v/θ` along a θ grid, against `1/(1+v)`.
    Limit {
        #[arg(long)]
        v: String,
        /// Comma-separated θ values.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ParryCmd {
    /// Is the word `w` or `prefix(period)` self-admissible?
    Check {
        #[arg(long)]
        word: String,
    },
    /// The base whose expansion of 1 is the word.
    Invert {
        #[arg(long)]
        word: String,
        /// Treat the word as a prefix only and bracket the base.
        #[arg(long)]
        prefix: bool,
        /// Largest digit allowed after the prefix.
        #[arg(long, default_value_t = 1)]
        top: u8,
    },
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    /// An output file or sidecar carrying a `config` record.
    pub file: String,
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) | CliError::Io(_) => 1,
        CliError::Lib(err) if err.is_precision() => 3,
        CliError::Lib(betadim::Error::InvalidInput(_)) => 1,
        CliError::Lib(_) => 2,
    }
}

fn run(argv: Vec<String>) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(CliError::Usage(e.to_string()));
        }
    };
    if let Command::Replay(r) = &cli.command {
        let cfg = RunConfig::load(&r.file)?;
        let mut again = cfg.to_argv();
        if let Some(o) = &cli.global.output {
            again.push("--output".into());
            again.push(o.clone());
        }
        return run(again);
    }
    let cfg = RunConfig::capture(&argv, &cli.global);
    commands::dispatch(&cli, &cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("betadim: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
