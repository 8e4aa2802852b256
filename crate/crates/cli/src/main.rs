mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cdpp", version, about = "Christoffel-deformed discrete kernels: evaluation, convergence runs, oracles")]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Mantissa bits (overrides the config).
    #[arg(long, global = true)]
    bits: Option<usize>,
    /// RNG seed for `sample` (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Negative control for `verify`: perturb computed values by 2^-B.
    #[arg(long, global = true)]
    fuzz_bits: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Ndjson,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Kernel values on a grid.
    Eval { config: PathBuf },
    /// Charlier ensembles at a = alpha/N against the deformed discrete Bessel kernel.
    ConvergeThm1 { config: PathBuf },
    /// z-measure kernels as xi -> 1 against the deformed Gamma kernel.
    ConvergeGamma { config: PathBuf },
    /// Invariant suites; one JSON object per check.
    Verify {
        /// specfun, orthopoly, christoffel, kernels, oracle or all.
        #[arg(long)]
        suite: Option<String>,
        config: Option<PathBuf>,
    },
    /// Exact samples of a finite ensemble.
    Sample { config: PathBuf },
    /// Brute-force correlation sums against kernel minors.
    OracleCompare { config: PathBuf },
}

#[derive(Debug)]
pub enum Failure {
    Invariant(String),
    Config(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invariant(_) => 1,
            Failure::Config(_) | Failure::Io(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Invariant(m) => write!(f, "invariant failure: {m}"),
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numeric(m) => write!(f, "numerical degeneracy: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<cdpp::Error> for Failure {
    fn from(e: cdpp::Error) -> Self {
        match e {
            cdpp::Error::InvalidParameter(_) => Failure::Config(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Eval { config } => commands::eval(&cli, config),
        Cmd::ConvergeThm1 { config } => commands::converge_thm1(&cli, config),
        Cmd::ConvergeGamma { config } => commands::converge_gamma(&cli, config),
        Cmd::Verify { suite, config } => commands::verify(&cli, suite.as_deref(), config.as_deref()),
        Cmd::Sample { config } => commands::sample(&cli, config),
        Cmd::OracleCompare { config } => commands::oracle_compare(&cli, config),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cdpp: {f}");
            ExitCode::from(f.code())
        }
    }
}
