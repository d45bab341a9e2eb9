mod args;

use args::{parse_complex, parse_k_range, parse_mutation, parse_point, parse_tol};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hesse_ulrich::suite::{
    bundle_latex, emit_bundle, run_suite, run_sweep, Mutation, PointInput, SuiteConfig, SweepConfig,
};
use num_complex::Complex64;
use serde_json::json;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hesse-ulrich", version, about = "Ulrich bundle presentations on the Hesse cubic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write M, L and the rank-(k+1) presentation matrices.
    Emit(EmitArgs),
    /// Run the check suite for k' = 0..=k; JSON lines, exit 1 on any failure.
    Check(CheckArgs),
    /// Run the suite over a grid of (tau, a, k) and report the worst residual per check.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Latex,
}

#[derive(Args)]
struct Common {
    /// Random seed for the sample points.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output file, or "-" for standard output.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Args)]
struct EmitArgs {
    /// Modulus tau, e.g. "i" or "0.2+1.3i".
    #[arg(long, default_value = "i", allow_hyphen_values = true, value_parser = parse_complex)]
    tau: Complex64,
    /// a_z (complex) or a projective point "a0:a1:a2".
    #[arg(long, default_value = "0.3", allow_hyphen_values = true, value_parser = parse_point)]
    a: PointInput,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Decimal digits in LaTeX output.
    #[arg(long, default_value_t = 6)]
    digits: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value = "i", allow_hyphen_values = true, value_parser = parse_complex)]
    tau: Complex64,
    #[arg(long, default_value = "0.3", allow_hyphen_values = true, value_parser = parse_point)]
    a: PointInput,
    /// Largest k; every k' in 0..=k is checked.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated tau values.
    #[arg(long, default_value = "i", value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    tau: Vec<Complex64>,
    /// Comma-separated points (complex a_z or "a0:a1:a2").
    #[arg(long, default_value = "0.3", value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_point)]
    a: Vec<PointInput>,
    /// Inclusive k range "lo..hi" (empty when hi < lo), or a single k.
    #[arg(long, default_value = "0..3", value_parser = parse_k_range)]
    k: RangeInclusive<usize>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RunArgs {
    /// Replace every residual tolerance with this value.
    #[arg(long, value_parser = parse_tol)]
    tol: Option<f64>,
    /// Corrupt the construction: zero-block, drop-binomial or perturb-psi.
    #[arg(long, value_parser = parse_mutation)]
    mutate: Option<Mutation>,
    /// Random samples per check.
    #[arg(long, default_value_t = 10)]
    samples: usize,
}

fn write_out(path: &PathBuf, body: &str) -> std::io::Result<()> {
    if path.as_os_str() == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(body.as_bytes())?;
        stdout.flush()
    } else {
        std::fs::write(path, body)
    }
}

fn fail(kind: &str, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("{}", json!({"error": message.to_string(), "kind": kind}));
    ExitCode::from(1)
}

fn finish(path: &PathBuf, body: &str, pass: bool) -> ExitCode {
    if let Err(e) = write_out(path, body) {
        return fail("io", e);
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Emit(args) => {
            let bundle = match emit_bundle(args.tau, args.a, args.k, args.common.seed) {
                Ok(b) => b,
                Err(e) => return fail("construction", e),
            };
            let body = match args.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&bundle).expect("bundle serializes");
                    s.push('\n');
                    s
                }
                Format::Latex => bundle_latex(&bundle, args.digits),
            };
            finish(&args.common.out, &body, true)
        }
        Command::Check(args) => {
            let cfg = SuiteConfig {
                tau: args.tau,
                a: args.a,
                ks: (0..=args.k).collect(),
                seed: args.common.seed,
                samples: args.run.samples,
                tol: args.run.tol,
                mutate: args.run.mutate,
            };
            match run_suite(&cfg) {
                Ok(report) => finish(&args.common.out, &report.to_json_lines(), report.passed()),
                Err(e) => fail("construction", e),
            }
        }
        Command::Sweep(args) => {
            let cfg = SweepConfig {
                taus: args.tau,
                points: args.a,
                ks: args.k.collect(),
                seed: args.common.seed,
                samples: args.run.samples,
                tol: args.run.tol,
                mutate: args.run.mutate,
            };
            let report = run_sweep(&cfg);
            finish(&args.common.out, &report.to_json_lines(), report.passed())
        }
    }
}
