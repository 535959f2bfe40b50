mod commands;
mod error;
mod output;
mod repro;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmr_core::Measure;

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "gmr", version, about = "Gaussian mixture reduction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dissimilarity between two mixture files
    Dissim(DissimArgs),
    /// Greedy reduction of a mixture to a target size
    Reduce(ReduceArgs),
    /// Best single Gaussian approximation of a whole mixture
    Bsga(BsgaArgs),
    /// Joint refinement of a reduced mixture
    Refine(RefineArgs),
    /// Regenerate the data behind a figure
    Repro(ReproArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Kld,
    Ise,
    Nise,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Kld => Measure::Kld,
            MeasureArg::Ise => Measure::Ise,
            MeasureArg::Nise => Measure::Nise,
        }
    }
}

#[derive(Args)]
struct DissimArgs {
    f: PathBuf,
    g: PathBuf,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    /// Closed-form KLD; both files must hold a single Gaussian
    #[arg(long)]
    closed_form: bool,
    #[arg(long, default_value_t = 1e-9)]
    abs_tol: f64,
    #[arg(long, default_value_t = 200_000)]
    mc_samples: usize,
    #[arg(long, env = "GMR_SEED", default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pipeline {
    /// ISE-costed selection, moment-preserving merges
    Williams,
    /// ISE-costed selection, ISE BSGA merges
    WilliamsIse,
    /// Runnalls bound selection, moment-preserving merges
    Runnalls,
}

#[derive(Args)]
struct ReduceArgs {
    input: PathBuf,
    #[arg(long)]
    target: usize,
    #[arg(long, value_enum)]
    pipeline: Pipeline,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Also report the numeric KLD to the original
    #[arg(long)]
    kld: bool,
}

#[derive(Args)]
struct BsgaArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    #[arg(long)]
    multistart: bool,
    /// `kld` for the moment-matched start, or a single-Gaussian mixture file
    #[arg(long, default_value = "kld")]
    init: String,
    /// Exit with status 5 if the descent does not converge
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct RefineArgs {
    original: PathBuf,
    start: PathBuf,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ReproArgs {
    /// fig1 … fig8, or `all`
    case: String,
    #[arg(long)]
    outdir: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Dissim(a) => commands::dissim(&a),
        Command::Reduce(a) => commands::reduce(&a),
        Command::Bsga(a) => commands::bsga(&a),
        Command::Refine(a) => commands::refine(&a),
        Command::Repro(a) => repro::run(&a.case, &a.outdir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(error::INVALID_ARGUMENT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
