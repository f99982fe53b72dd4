mod error;
mod report;
mod spec;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qubit_coexist::coexist::{boundary_curve, FigurePreset};
use qubit_coexist::oracle::{DEFAULT_GRID, MIN_GRID};
use qubit_coexist::selftest::run_all;
use qubit_coexist::{assemble_observable, decide, find_witness, oracle_coexistent, BlochEffect64};
use serde::Serialize;

use error::CliError;
use report::{CurveOut, OracleOut, SelfTestOut, SharpnessOut, VerdictReport, WitnessOut};

/// Decide whether two qubit effects belong to one observable.
///
/// Effects are JSON objects, either {"alpha": α, "a": [x, y, z]} for
/// ½(α·1 + a·σ) or {"matrix": [[re, im], [re, im], [re, im], [re, im]]}
/// in row-major order.
///
/// Exit codes: 0 coexistent / pass, 1 not coexistent / fail, 2 usage error.
#[derive(Debug, Parser)]
#[command(name = "coexist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether two effects are coexistent.
    Decide(DecideArgs),
    /// Construct a four-outcome observable with the two effects as marginals.
    Witness(PairArgs),
    /// Boundary of the allowed region for fixed (alpha, a, beta).
    Boundary(BoundaryArgs),
    /// Sharpness of one effect.
    Sharpness(SharpnessArgs),
    /// Run the seeded consistency suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct PairArgs {
    /// First effect as JSON.
    #[arg(required_unless_present = "input")]
    a: Option<String>,
    /// Second effect as JSON.
    #[arg(required_unless_present = "input")]
    b: Option<String>,
    /// JSON file holding {"a": …, "b": …}.
    #[arg(long, short, conflicts_with_all = ["a", "b"])]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecideArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Include a witness observable.
    #[arg(long)]
    witness: bool,
    /// Include the brute-force oracle margin and certificate.
    #[arg(long)]
    oracle: bool,
    /// Oracle grid size.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct BoundaryArgs {
    /// Stock parameter set.
    #[arg(long, value_parser = parse_preset, conflicts_with_all = ["alpha", "a", "beta"])]
    preset: Option<FigurePreset>,
    #[arg(
        long,
        required_unless_present = "preset",
        allow_negative_numbers = true
    )]
    alpha: Option<f64>,
    /// Length of the first Bloch vector.
    #[arg(
        long,
        required_unless_present = "preset",
        allow_negative_numbers = true
    )]
    a: Option<f64>,
    #[arg(
        long,
        required_unless_present = "preset",
        allow_negative_numbers = true
    )]
    beta: Option<f64>,
    /// Uniform samples over [-beta, beta]; junction rows are added.
    #[arg(long, default_value_t = 201)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct SharpnessArgs {
    /// Effect as JSON.
    effect: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Instances per suite.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Oracle grid size.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    /// JSON file with extra [{"a": …, "b": …}] pairs for the oracle comparison.
    #[arg(long)]
    pairs: Option<PathBuf>,
}

fn parse_preset(s: &str) -> Result<FigurePreset, String> {
    s.parse()
}

fn read_pair(p: &PairArgs) -> Result<(BlochEffect64, BlochEffect64), CliError> {
    match (&p.input, &p.a, &p.b) {
        (Some(path), _, _) => {
            spec::pair_from_value(&spec::read_json(path)?, &path.display().to_string())
        }
        (None, Some(a), Some(b)) => Ok((
            spec::effect_from_str(a, "A")?,
            spec::effect_from_str(b, "B")?,
        )),
        _ => Err(CliError::Usage(
            "two effects or --input are required".into(),
        )),
    }
}

fn print_json<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    println!("{text}");
}

fn verdict_report(
    a: &BlochEffect64,
    b: &BlochEffect64,
    with_witness: bool,
    with_oracle: Option<usize>,
) -> Result<VerdictReport, CliError> {
    let verdict = decide(a, b);
    let mut out = VerdictReport::from(&verdict);
    if with_witness && verdict.coexistent {
        match find_witness(a, b) {
            Ok(Some(found)) => {
                let obs = assemble_observable(a, b, &found.witness)
                    .map_err(|e| CliError::Parameter(format!("witness rejected: {e}")))?;
                out.witness = Some(WitnessOut::new(&found, &obs));
            }
            Ok(None) => {}
            Err(e) => return Err(CliError::Parameter(e.to_string())),
        }
    }
    if let Some(grid) = with_oracle {
        out.oracle = Some(OracleOut::from(&oracle_coexistent(a, b, grid)));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Decide(args) => {
            if args.oracle && args.grid < MIN_GRID {
                return Err(CliError::Parameter(format!(
                    "--grid must be at least {MIN_GRID}"
                )));
            }
            let (a, b) = read_pair(&args.pair)?;
            let out = verdict_report(&a, &b, args.witness, args.oracle.then_some(args.grid))?;
            print_json(&out);
            Ok(exit_for(out.coexistent))
        }
        Command::Witness(args) => {
            let (a, b) = read_pair(&args)?;
            let out = verdict_report(&a, &b, true, None)?;
            print_json(&out);
            Ok(exit_for(out.witness.is_some()))
        }
        Command::Boundary(args) => {
            let (alpha, a, beta) = match args.preset {
                Some(p) => p.params::<f64>(),
                None => (
                    args.alpha.expect("required by clap"),
                    args.a.expect("required by clap"),
                    args.beta.expect("required by clap"),
                ),
            };
            let curve = boundary_curve(alpha, a, beta, args.samples)
                .map_err(|e| CliError::Parameter(e.to_string()))?;
            match args.format {
                Format::Csv => print!("{}", report::curve_csv(&curve)),
                Format::Json => {
                    print_json(&CurveOut::new(&curve, args.preset.map(FigurePreset::name)))
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sharpness(args) => {
            let e = spec::effect_from_str(&args.effect, "effect")?;
            match args.format {
                Format::Csv => print!("{}", report::sharpness_csv(&e)),
                Format::Json => print_json(&SharpnessOut::from(&e)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest(args) => {
            if args.samples == 0 {
                return Err(CliError::Parameter("--samples must be positive".into()));
            }
            if args.grid < MIN_GRID {
                return Err(CliError::Parameter(format!(
                    "--grid must be at least {MIN_GRID}"
                )));
            }
            let extra = match &args.pairs {
                Some(path) => {
                    spec::pair_list(&spec::read_json(path)?, &path.display().to_string())?
                }
                None => Vec::new(),
            };
            for msg in extra.iter().filter_map(|r| r.as_ref().err()) {
                eprintln!("skipped input: {msg}");
            }
            let report = run_all(args.samples, args.seed, args.grid, &extra);
            print_json(&SelfTestOut::new(
                &report,
                args.samples,
                args.seed,
                args.grid,
                extra.len(),
            ));
            Ok(exit_for(report.passed()))
        }
    }
}

fn exit_for(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    });
    let _ = std::io::stdout().flush();
    code
}
