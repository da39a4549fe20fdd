//! `flowforge` command line: argument parsing, dispatch and output files.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flowforge_core::Error;

#[derive(Debug, Parser)]
#[command(name = "flowforge", version, about = "Multi-index renormalization toolkit for generalized KPZ equations")]
#[command(after_help = "Exit codes: 0 success, 1 domain or usage error, 2 resource cap exceeded, 3 numeric failure.\n\
Environment: FLOWFORGE_THREADS caps the number of worker threads.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived parameters Γ, δ, κ₀ and the integrability exponent.
    Params(ParamsArgs),
    /// Populated multi-indices up to an order cap.
    Enumerate(EnumerateArgs),
    /// Polchinski flow hierarchy as JSON.
    Flow(FlowArgs),
    /// Relevant counterterm catalog as CSV.
    Counterterms(CountertermArgs),
    /// Cumulant relevance scan as a JSON report.
    Cumulants(CumulantArgs),
    /// Numerical check of the kernel estimates, CSV rows per μ.
    #[command(name = "kernels-verify")]
    KernelsVerify(KernelArgs),
    /// Coupled ε-ladder simulation from a key-value config file.
    Simulate(SimulateArgs),
    /// Monte-Carlo flow coefficient of one multi-index.
    Coeffs(CoeffArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Regularity α as an exact rational "p/q" (a decimal such as 0.5 is read exactly)
    #[arg(long, value_name = "P/Q")]
    pub alpha: String,
    /// Spatial dimension n, an integer
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Integrability parameter ι as "p/q"; defaults to the library value
    #[arg(long, value_name = "P/Q")]
    pub iota: Option<String>,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Print a JSON object instead of text
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Largest order 𝔬(a), an integer
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Refuse (exit 2) when more than this many indices would be listed
    #[arg(long, default_value_t = 2_000_000)]
    pub cap: u128,
    /// Output file, written atomically; stdout if absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Largest order in the hierarchy, an integer; defaults to 2Γ+1
    #[arg(long)]
    pub max_order: Option<u32>,
    /// Refuse (exit 2) above this many nodes
    #[arg(long, default_value_t = 250_000)]
    pub node_cap: u128,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountertermArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CumulantArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Longest cumulant list p (at most 8)
    #[arg(long, default_value_t = 4)]
    pub pmax: usize,
    /// Largest order of a list entry
    #[arg(long, default_value_t = 3)]
    pub order_cap: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Grid points per axis M, a power of two ≥ 16
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Time step as "p/q" or decimal; defaults to 1/(4M²)
    #[arg(long)]
    pub dt: Option<String>,
    /// Comma-separated scales μ as rationals or decimals; defaults to 1/4,1/8,1/16,1/32
    #[arg(long)]
    pub mus: Option<String>,
    /// Also write the per-estimate summary (fitted exponents, pass flags) as JSON
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Key-value config file (alpha, n, grid, dt, T, eps_ladder, seed, mc_samples,
    /// counterterm_mode, b, d, g, h, initial, counterterm_sign, blowup)
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for report.json and tables/*.csv
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Multi-index in canonical JSON, e.g. '{"h":[1,1]}'
    #[arg(long)]
    pub a: String,
    /// Mollification scale ε as a rational or decimal
    #[arg(long)]
    pub eps: String,
    /// Grid points M
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Time step as "p/q" or decimal; defaults to ε²/8
    #[arg(long)]
    pub dt: Option<String>,
    /// Comma-separated scales μ as rationals or decimals
    #[arg(long, default_value = "1/8,1/16,1/32")]
    pub mus: String,
    /// Monte-Carlo samples
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failures of a command: library errors keep their exit code, I/O is a domain error.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => e.exit_code(),
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Thread cap from FLOWFORGE_THREADS; applied once per process.
fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("FLOWFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| Error::Domain(format!("FLOWFORGE_THREADS = {v:?} must be a positive integer")))?;
    #[cfg(feature = "parallel")]
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

/// Parse argv, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match configure_threads().and_then(|_| commands::dispatch(cli.command)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("flowforge: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        assert_eq!(CliError::Core(Error::Resource("x".into())).exit_code(), 2);
        assert_eq!(CliError::Core(Error::Numeric("x".into())).exit_code(), 3);
        assert_eq!(CliError::Core(Error::Subcritical("x".into())).exit_code(), 1);
        assert_eq!(CliError::Io("x".into()).exit_code(), 1);
    }

    #[test]
    fn help_and_usage_errors() {
        assert_eq!(run(["flowforge", "--help"]), 0);
        assert_eq!(run(["flowforge", "params", "--help"]), 0);
        assert_eq!(run(["flowforge", "bogus"]), 1);
        assert_eq!(run(["flowforge", "params"]), 1);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
