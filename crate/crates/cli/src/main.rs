//! `noricert verify`: runs the certificate pipeline and reports.
//!
//! Exit codes: 0 all certified, 1 some refutation, 2 budget non-answers only,
//! 64 invalid configuration or usage.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noricert_core::arith::{parse_rational, Rational};
use noricert_core::circle::DEFAULT_BUDGET;
use noricert_core::pipeline::{
    render, run_verify, OutputFormat, RunConfig, DEFAULT_ATLAS_SAMPLES, DEFAULT_DISK_SAMPLES, DEFAULT_MAX_N,
};

const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "noricert", version, about = "Exact certification of the escaping disk family")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the families and certify every stage.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Disk indices: `3`, `2..4` (inclusive), or `2,3,5`.
    #[arg(long = "n", default_value = "2..3", value_parser = parse_n_list)]
    n: NList,
    /// Chart radius as `num/den`.
    #[arg(long, default_value = "1/5", value_parser = parse_rational_arg)]
    r: Rational,
    /// Cone parameter as `num/den`.
    #[arg(long, default_value = "1/2", value_parser = parse_rational_arg)]
    rho: Rational,
    /// Override ε (as `num/den`); refused if it violates its bound unless
    /// `--unsafe-eps` is given.
    #[arg(long, value_parser = parse_rational_arg)]
    eps: Option<Rational>,
    /// Run the pipeline even when ε violates its bound.
    #[arg(long)]
    unsafe_eps: bool,
    /// Sampled points of the closed disk per n.
    #[arg(long, default_value_t = DEFAULT_DISK_SAMPLES)]
    samples: usize,
    /// Samples per atlas search.
    #[arg(long, default_value_t = DEFAULT_ATLAS_SAMPLES)]
    atlas_samples: usize,
    /// Arc evaluations per circle certificate.
    #[arg(long, env = "NORICERT_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Largest accepted disk index.
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Clone, Debug)]
struct NList(Vec<u32>);

fn parse_n_list(s: &str) -> Result<NList, String> {
    parse_indices(s).map(NList)
}

fn parse_indices(s: &str) -> Result<Vec<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("invalid disk index `{t}`"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Verify(args) = cli.command;
    let config = RunConfig {
        n_list: args.n.0,
        r: args.r,
        rho: args.rho,
        eps_override: args.eps,
        unsafe_eps: args.unsafe_eps,
        samples: args.samples,
        atlas_samples: args.atlas_samples,
        budget: args.budget,
        seed: args.seed,
        max_n: args.max_n,
        format: match args.format {
            Format::Json => OutputFormat::Json,
            Format::Text => OutputFormat::Text,
        },
    };
    match run_verify(&config) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", render(&report, config.format));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("noricert: invalid configuration: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
