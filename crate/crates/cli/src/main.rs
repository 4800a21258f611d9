use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flatcone_cli::{run, CliError, CliResult, Command, Format, ProblemSpec};

#[derive(Parser)]
#[command(name = "flatcone", version, about = "Flat cone metrics on the sphere and their developing maps")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// JSON problem file.
    #[arg(long)]
    spec: PathBuf,
    /// Output file, or `-` for standard output.
    #[arg(long, default_value = "-")]
    out: String,
    /// Relative quadrature tolerance; overrides the problem file.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Sub {
    /// Check the Gauss-Bonnet condition and report the completion at infinity.
    Validate(Common),
    /// Metric density on a grid.
    Metric(Common),
    /// Developing map sampled along a path.
    Develop(Common),
    /// Holonomy of a closed loop.
    Monodromy(Common),
    /// Measured cone angles at the finite cone points.
    ConeAngle(Common),
    /// Frobenius series at a regular singular point.
    Frobenius(Common),
    /// Solve for the prevertices of a polygon.
    ScSolve(Common),
    /// Evaluate the polygon map for given prevertices.
    ScMap(Common),
    /// Draw a developed path or polygon as SVG.
    Plot(Common),
}

impl Sub {
    fn split(self) -> (Command, Common) {
        match self {
            Sub::Validate(c) => (Command::Validate, c),
            Sub::Metric(c) => (Command::Metric, c),
            Sub::Develop(c) => (Command::Develop, c),
            Sub::Monodromy(c) => (Command::Monodromy, c),
            Sub::ConeAngle(c) => (Command::ConeAngle, c),
            Sub::Frobenius(c) => (Command::Frobenius, c),
            Sub::ScSolve(c) => (Command::ScSolve, c),
            Sub::ScMap(c) => (Command::ScMap, c),
            Sub::Plot(c) => (Command::Plot, c),
        }
    }
}

fn write_out(target: &str, text: &str) -> CliResult<()> {
    let res = if target == "-" {
        std::io::stdout().lock().write_all(text.as_bytes())
    } else {
        std::fs::write(target, text)
    };
    res.map_err(|e| CliError::Io(format!("cannot write {target}: {e}")))
}

fn execute(cmd: Command, args: Common) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.spec.display())))?;
    let spec = ProblemSpec::parse(&text)?;
    let format = args.format.map(|f| match f {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
        FormatArg::Svg => Format::Svg,
    });
    let outcome = run(cmd, &spec, format, args.tol)?;
    write_out(&args.out, &outcome.text)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let (cmd, args) = Cli::parse().command.split();
    match execute(cmd, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
