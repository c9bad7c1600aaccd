use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use framecast::cli::{self, Context, DsOptions, FusionOptions, Report, SpecFile, SweepOptions};
use framecast::dynsamp::{GammaVariant, GeometricFamily, WindowConvention};
use framecast::{Error, DEFAULT_TOL};

#[derive(Parser)]
#[command(name = "framecast", version, about = "Certified frame bounds for local-to-global systems")]
struct Cli {
    /// Numerical tolerance
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Print the report as JSON
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized audit probes
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal frame bounds of a vector system
    Bounds { spec: PathBuf },
    /// Glue local frames over a coordinate partition
    L2g { spec: PathBuf },
    /// Leakage check for a dynamical sampling system
    Ds(DsArgs),
    /// Sweep the three-tap geometric kernel over tau and write a CSV
    Sweep(SweepArgs),
    /// Fusion bounds, completeness and band checks for projectors
    Fusion(FusionArgs),
}

#[derive(Args)]
struct DsArgs {
    spec: PathBuf,
    /// Number of windows in the truncation (odd)
    #[arg(long, default_value_t = 9)]
    blocks: usize,
    #[arg(long, value_enum, default_value_t = GammaArg::L2)]
    gamma_variant: GammaArg,
    /// Overrides the convention in the spec file
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.01)]
    tau_from: f64,
    #[arg(long, default_value_t = 0.5)]
    tau_to: f64,
    #[arg(long, default_value_t = 0.01)]
    tau_step: f64,
    /// CSV output path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Kernel length; 1 gives the unit impulse
    #[arg(long, default_value_t = 3)]
    taps: usize,
    #[arg(long, default_value_t = 3)]
    window_len: usize,
    #[arg(long, default_value_t = 2)]
    iterations: usize,
    #[arg(long, value_enum, default_value_t = ConventionArg::Disjoint)]
    convention: ConventionArg,
}

#[derive(Args)]
struct FusionArgs {
    spec: PathBuf,
    /// Band for the banded-commuting check; defaults to the minimal band
    #[arg(long)]
    band: Option<usize>,
    /// Include the disjointified Q family in the report
    #[arg(long)]
    emit_q: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaArg {
    L2,
    L1,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Disjoint,
    PaperOverlap,
}

impl From<ConventionArg> for WindowConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Disjoint => WindowConvention::Disjoint,
            ConventionArg::PaperOverlap => WindowConvention::PaperOverlap,
        }
    }
}

fn load(path: &PathBuf) -> Result<(SpecFile, String), Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Parse {
        line: 0,
        column: 0,
        message: "spec file is not valid UTF-8".into(),
    })?;
    Ok((cli::parse_spec(&text)?, cli::digest(&bytes)))
}

fn run(args: &Cli, invocation: String) -> Result<Report, Error> {
    let ctx = |digest: String| Context {
        invocation: invocation.clone(),
        input_digest: digest,
        tol: args.tol,
        seed: args.seed,
    };
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(Error::InvalidInput("--tol must be positive".into()));
    }
    match &args.command {
        Command::Bounds { spec } => {
            let (spec, digest) = load(spec)?;
            cli::run_bounds(&ctx(digest), &spec)
        }
        Command::L2g { spec } => {
            let (spec, digest) = load(spec)?;
            cli::run_l2g(&ctx(digest), &spec)
        }
        Command::Ds(a) => {
            let (spec, digest) = load(&a.spec)?;
            let opts = DsOptions {
                blocks: a.blocks,
                gamma_variant: match a.gamma_variant {
                    GammaArg::L2 => GammaVariant::L2,
                    GammaArg::L1 => GammaVariant::L1,
                },
                convention: a.convention.map(Into::into),
            };
            cli::run_ds(&ctx(digest), &spec, &opts)
        }
        Command::Sweep(a) => {
            let opts = SweepOptions {
                tau_from: a.tau_from,
                tau_to: a.tau_to,
                tau_step: a.tau_step,
                family: GeometricFamily {
                    taps: a.taps,
                    window_len: a.window_len,
                    iterations: a.iterations,
                    convention: a.convention.into(),
                },
            };
            let digest = cli::digest(format!("{opts:?}").as_bytes());
            cli::run_sweep(&ctx(digest), &opts, a.out.as_deref()).map(|(r, _)| r)
        }
        Command::Fusion(a) => {
            let (spec, digest) = load(&a.spec)?;
            let opts = FusionOptions {
                band: a.band,
                emit_q: a.emit_q,
            };
            cli::run_fusion(&ctx(digest), &spec, &opts)
        }
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let invocation = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let start = Instant::now();
    match run(&args, invocation) {
        Ok(mut report) => {
            report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            if args.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_text());
            }
            ExitCode::from(report.outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
