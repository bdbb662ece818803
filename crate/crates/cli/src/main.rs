use std::path::PathBuf;
use std::process::ExitCode;

use birkhoff_cli::{run, Command, Format, RunConfig};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "birkhoff",
    version,
    about = "Hilbert-metric contraction and spectral-ratio bounds for positive matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bounds, spectrum and the kappa <= tau check for one matrix.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Checks kappa <= tau on a seeded ensemble of random positive matrices.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        lo: f64,
        #[arg(long, default_value_t = 10.0)]
        hi: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Certified Perron vector by Hilbert-metric power iteration.
    Certify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Complex-neighborhood contraction and metric-equivalence sweep over eps.
    ComplexProbe {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn config(cmd: Cmd) -> RunConfig {
    match cmd {
        Cmd::Analyze { input, output } => RunConfig {
            input_path: Some(input),
            output_path: output,
            ..RunConfig::new(Command::Analyze)
        },
        Cmd::Verify {
            n,
            count,
            seed,
            lo,
            hi,
            output,
        } => RunConfig {
            n,
            count,
            seed,
            lo,
            hi,
            output_path: output,
            ..RunConfig::new(Command::Verify)
        },
        Cmd::Certify {
            input,
            tol,
            max_iter,
            output,
        } => RunConfig {
            input_path: Some(input),
            tol,
            max_iter,
            output_path: output,
            ..RunConfig::new(Command::Certify)
        },
        Cmd::ComplexProbe {
            input,
            eps,
            count,
            seed,
            format,
            output,
        } => RunConfig {
            input_path: Some(input),
            eps_list: eps,
            count,
            seed,
            format: match format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            },
            output_path: output,
            ..RunConfig::new(Command::ComplexProbe)
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // exit code 2 is reserved for failed verifications
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(&config(cli.command)) as u8)
}
