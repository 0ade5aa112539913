use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use boundary_forge::algebra::{parse_rational, Rational};
use boundary_forge::cli::{exit_code, parse_problem, run, Flags, Subcommand, EXIT_USAGE};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Check,
    Boundary,
    Split,
    Realize,
    Verify,
    Report,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Structured,
}

/// Exact boundary variables for differential-operator Dirac structures and
/// Lagrangian subspaces.
#[derive(Debug, Parser)]
#[command(name = "boundary-forge", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON problem file
    problem: PathBuf,
    /// fixed verification interval
    #[arg(long, num_args = 2, value_names = ["A", "B"], value_parser = rational_arg, allow_hyphen_values = true)]
    interval: Option<Vec<Rational>>,
    /// random trials per harness check
    #[arg(long)]
    trials: Option<usize>,
    /// polynomial degree of random trajectories
    #[arg(long)]
    degree: Option<usize>,
    /// base seed of the trajectory generator
    #[arg(long)]
    seed: Option<u64>,
    /// 1-based ports whose effort is an input, e.g. 1,3
    #[arg(long, value_delimiter = ',')]
    swap: Option<Vec<usize>>,
    /// split blockdiag(Σ, -Σ) on (b(β), b(α))
    #[arg(long)]
    two_point: bool,
    /// split residual tolerance
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let file = match parse_problem(&args.problem) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let cmd = match args.command {
        Command::Check => Subcommand::Check,
        Command::Boundary => Subcommand::Boundary,
        Command::Split => Subcommand::Split,
        Command::Realize => Subcommand::Realize,
        Command::Verify => Subcommand::Verify,
        Command::Report => Subcommand::Report,
    };
    let flags = Flags {
        interval: args.interval.map(|v| (v[0].clone(), v[1].clone())),
        trials: args.trials,
        degree: args.degree,
        seed: args.seed,
        swap: args.swap,
        two_point: args.two_point,
        tolerance: args.tolerance,
    };
    let result = run(cmd, &file, &flags);
    // a closed pipe downstream is not an error of ours
    let mut stdout = std::io::stdout().lock();
    match &result {
        Ok(report) => {
            let _ = match args.format {
                Format::Text => write!(stdout, "{}", report.to_text()),
                Format::Structured => writeln!(stdout, "{}", report.to_json()),
            };
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
