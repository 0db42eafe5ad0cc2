use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use onoma_core::runner::plot::write_plot_script;
use onoma_core::runner::table::write_csv;
use onoma_core::runner::{
    compare_report, emit_csv, load_csv, run_sweep, validate, Engine, OmegaConvention, Scenario,
};
use onoma_core::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

/// Average-rate sweeps for opportunistic and conventional cooperative NOMA
/// over Rician fading.
#[derive(Parser)]
#[command(name = "onoma", version)]
struct Cli {
    /// Worker threads for Monte Carlo and grid points (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario over its grids and write the rows as CSV.
    Sweep(SweepArgs),
    /// Run the self-check suite for a scenario.
    Validate {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Summarize gains and engine agreement from a sweep CSV.
    Report {
        #[arg(long = "in", value_name = "CSV")]
        input: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in scenario: fig4, fig8, fig9 or fig10.
    #[arg(long)]
    preset: Option<String>,
    /// Scenario TOML file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo draws per grid point.
    #[arg(long)]
    samples: Option<u64>,
    /// Read omega_* values as amplitudes whose squares are the mean powers.
    #[arg(long)]
    omega_squared: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineChoice {
    Analytic,
    Mc,
    Both,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    overrides: Overrides,
    /// Engines to run, overriding the scenario.
    #[arg(long, value_enum)]
    engine: Option<EngineChoice>,
    /// CSV destination (default: standard output).
    #[arg(long, value_name = "CSV")]
    out: Option<PathBuf>,
    /// Also write a gnuplot script that plots the CSV.
    #[arg(long, value_name = "PATH", requires = "out")]
    plot_script: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() || matches!(e, Error::EmptySample) {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

fn load(source: &Source, o: &Overrides) -> Result<Scenario, Error> {
    let mut s = match (&source.preset, &source.config) {
        (Some(name), _) => Scenario::preset(name)?,
        (None, Some(path)) => Scenario::from_path(path)?,
        (None, None) => unreachable!("clap requires one source"),
    };
    if let Some(seed) = o.seed {
        s.mc.seed = seed;
    }
    if let Some(n) = o.samples {
        s.mc.n_samples = n;
        s.mc.validate()
            .map_err(|e| Error::Validation(e.to_string()))?;
    }
    if o.omega_squared {
        s.omega_convention = OmegaConvention::AmplitudeSquared;
    }
    Ok(s)
}

fn sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let mut scenario = load(&args.source, &args.overrides)?;
    if let Some(choice) = args.engine {
        scenario.engines = match choice {
            EngineChoice::Analytic => vec![Engine::Analytic],
            EngineChoice::Mc => vec![Engine::MonteCarlo],
            EngineChoice::Both => vec![Engine::Analytic, Engine::MonteCarlo],
        };
    }
    for note in scenario.topology()?.advisories() {
        eprintln!("note: {note}");
    }
    let rows = run_sweep(&scenario)?;
    match &args.out {
        Some(path) => emit_csv(&rows, path)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&rows, &mut lock)?;
            lock.flush()?;
        }
    }
    if let (Some(script), Some(csv)) = (&args.plot_script, &args.out) {
        write_plot_script(&scenario, csv, script)?;
    }
    let failed: Vec<_> = rows.iter().filter(|r| r.is_failed()).collect();
    for r in &failed {
        eprintln!(
            "error: a2={} rho_db={} {} {}: {}",
            r.a2,
            r.rho_db,
            r.scheme,
            r.engine,
            r.error.as_deref().unwrap_or_default()
        );
    }
    Ok(if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NUMERICAL)
    })
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Validate { source, overrides } => {
            let scenario = load(&source, &overrides)?;
            let report = validate(&scenario)?;
            println!("{report}");
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION)
            })
        }
        Command::Report { input } => {
            let rows = load_csv(&input)?;
            print!("{}", compare_report(&rows)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
