use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use holint_cli::analysis::{DEFAULT_MAX_BLOWUPS, DEFAULT_MAX_PERIOD, DEFAULT_SAMPLES, DEFAULT_TOL};
use holint_cli::{render, run, AnalysisRequest, Format, Task};
use holint_core::GaussianRational;

const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(name = "holint", version, about = "Integrability analysis of vector-field germs on (C^3, 0)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze the germ described in FILE.
    Analyze {
        file: std::path::PathBuf,
        /// Comma-separated subset of star, resonances, first_integral,
        /// meromorphic_invariant, distribution, resolution, holonomy.
        #[arg(long, value_delimiter = ',', value_parser = parse_task)]
        tasks: Vec<Task>,
        /// Truncation order; replaces the order given in the file.
        #[arg(long)]
        order: Option<u32>,
        /// Slice parameters, e.g. `1/4,1/2+i`.
        #[arg(long, value_delimiter = ',', value_parser = parse_z0)]
        z0: Vec<GaussianRational>,
        #[arg(long, default_value_t = DEFAULT_MAX_PERIOD)]
        max_period: u32,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Degree bound for the resonance enumeration; defaults to the order.
        #[arg(long)]
        degree_bound: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_BLOWUPS)]
        max_blowups: usize,
        /// Base the holonomy loop at the first dicritical slice parameter.
        #[arg(long)]
        prefer_dicritical_z0: bool,
    },
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.trim().parse()
}

fn parse_z0(s: &str) -> Result<GaussianRational, String> {
    s.trim().parse().map_err(|e| format!("{e}"))
}

fn main() -> ExitCode {
    let Command::Analyze {
        file,
        tasks,
        order,
        z0,
        max_period,
        tol,
        format,
        seed,
        degree_bound,
        samples,
        max_blowups,
        prefer_dicritical_z0,
    } = Cli::parse().command;
    let source = match std::fs::read_to_string(&file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let mut req = AnalysisRequest::new(source);
    if !tasks.is_empty() {
        req = req.with_tasks(tasks);
    }
    req.order = order;
    req.z0 = z0;
    req.max_period = max_period;
    req.tol = tol;
    req.seed = seed;
    req.degree_bound = degree_bound;
    req.samples = samples;
    req.max_blowups = max_blowups;
    req.prefer_dicritical_z0 = prefer_dicritical_z0;
    let report = match run(&req) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let format = match format {
        FormatArg::Text => Format::Text,
        FormatArg::Structured => Format::Structured,
    };
    print!("{}", render(&report, format));
    ExitCode::from(report.exit_code())
}
