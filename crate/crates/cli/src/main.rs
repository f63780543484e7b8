//! `dgp1`: solve, generate, and benchmark cyclic one-dimensional distance
//! geometry instances.
//!
//! Exit codes for `solve`: 0 feasible, 1 infeasible, 2 error. The report
//! goes to stdout (JSON by default), diagnostics to stderr.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dgp1_core::instance;
use dgp1_core::optics::OpticalConfig;

use dgp1_cli::solve::{run_solve_frames, SolveOptions};
use dgp1_cli::{bench, parse_size_range, Format, Method};

#[derive(Parser)]
#[command(
    name = "dgp1",
    version,
    about = "Exact and simulated-optical solvers for cyclic 1-D distance geometry instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file by one of the three paths.
    Solve(SolveArgs),
    /// Generate an instance file (canonical JSON).
    Generate(GenerateArgs),
    /// Time the solution paths over a size range.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file: {"n": .., "consecutive": [..], "closing": .., "label"?: ..}
    path: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Mvm)]
    method: Method,
    /// Zero-test tolerance on the closing position.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Seed for detector noise and mask jitter (optics).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Modulator gray levels (optics).
    #[arg(long, default_value_t = 256)]
    gray_levels: u32,
    /// Detector noise standard deviation relative to I0 (optics).
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Frame height in detector rows (optics).
    #[arg(long, default_value_t = 1080)]
    height: usize,
    /// Frame width in modulator columns (optics).
    #[arg(long, default_value_t = 1920)]
    width: usize,
    /// Zero-pixel intensity threshold; defaults to the sound
    /// quantization-derived bound (optics).
    #[arg(long)]
    detect_eps: Option<f64>,
    /// Disable phase quantization: continuous phase levels (optics).
    #[arg(long)]
    analytic: bool,
    /// Per-cell Gaussian phase jitter on the vector mask, radians (optics).
    #[arg(long, default_value_t = 0.0)]
    misalign_sigma: f64,
    /// Worker cap for the sign-matrix row scan.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write per-row detected intensities as CSV (optics only).
    #[arg(long)]
    dump_intensities: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Vertex count (>= 2).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Upper bound of the uniform distance draw (0, dmax].
    #[arg(long, default_value_t = 10.0)]
    dmax: f64,
    /// Make the instance feasible by construction.
    #[arg(long)]
    feasible: bool,
    #[arg(long)]
    label: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Inclusive size range, e.g. 4..20, or a single size.
    #[arg(long = "n")]
    range: String,
    /// Comma-separated list of methods to time.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![Method::Mvm])]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10.0)]
    dmax: f64,
    /// Worker cap for the sign-matrix row scan.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let text = fs::read_to_string(&args.path)
        .with_context(|| format!("cannot read {}", args.path.display()))?;
    let inst = instance::parse(&text)
        .with_context(|| format!("invalid instance in {}", args.path.display()))?;
    for warning in inst.warnings() {
        eprintln!("warning: {warning}");
    }
    if args.dump_intensities.is_some() && args.method != Method::Optics {
        bail!("--dump-intensities requires --method optics");
    }

    let opts = SolveOptions {
        method: args.method,
        eps: args.eps,
        seed: args.seed,
        threads: args.threads.max(1),
        optical: OpticalConfig {
            width: args.width,
            height: args.height,
            gray_levels: args.gray_levels,
            noise_sigma: args.noise_sigma,
            detect_eps: args.detect_eps,
            analytic_phase: args.analytic,
            misalign_sigma: args.misalign_sigma,
            ..OpticalConfig::default()
        },
        source: Some(args.path.display().to_string()),
    };

    let mut dump = match &args.dump_intensities {
        Some(path) => {
            let file = fs::File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            let mut writer = std::io::BufWriter::new(file);
            writeln!(writer, "row,intensity")?;
            Some(writer)
        }
        None => None,
    };
    let report = run_solve_frames(&inst, &opts, |frame| {
        if let Some(writer) = dump.as_mut() {
            for (offset, intensity) in frame.intensities.iter().enumerate() {
                let _ = writeln!(writer, "{},{}", frame.lo + offset as u64, intensity);
            }
        }
    })?;
    if let Some(mut writer) = dump {
        writer.flush()?;
    }

    match args.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => print!("{}", report.to_csv()),
    }
    Ok(if report.feasible { 0 } else { 1 })
}

fn cmd_generate(args: GenerateArgs) -> Result<i32> {
    if !(args.dmax > 0.0 && args.dmax.is_finite()) {
        bail!("--dmax must be a positive real, got {}", args.dmax);
    }
    let inst = if args.feasible {
        instance::generate_feasible(args.n, args.seed, args.dmax)?
    } else {
        instance::generate_random(args.n, args.seed, args.dmax)?
    };
    let inst = match args.label {
        Some(label) => inst.with_label(label),
        None => inst,
    };
    let mut text = instance::serialize(&inst);
    text.push('\n');
    match args.out {
        Some(path) => fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<i32> {
    let (n_lo, n_hi) = parse_size_range(&args.range).map_err(anyhow::Error::msg)?;
    let spec = bench::BenchSpec {
        n_lo,
        n_hi,
        methods: args.methods,
        repeats: args.repeats,
        seed: args.seed,
        dmax: args.dmax,
        threads: args.threads.max(1),
    };
    let rows = bench::run_bench(&spec)?;
    match args.format {
        Format::Csv => print!("{}", bench::to_csv(&rows)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
    }
    Ok(0)
}
