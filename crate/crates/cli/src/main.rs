//! `opuc`: experiment driver. Exit status 0 when every verdict passes, 1 when
//! a verdict fails or the precision budget runs out, 2 on configuration errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opuc::document::parse_measure_spec;
use opuc::experiments::{
    doubling_schedule, run_alphas, run_beta, run_bound_table, run_density_curve, run_lambda,
    run_moments, run_thm_3_3, ExperimentConfig, ExperimentReport, LambdaSpec, OutputFormat,
    Thm33Params,
};
use opuc::measure::MeasureSpec;
use opuc::precision::PrecisionPolicy;
use opuc::OpucError;

#[derive(Parser, Debug)]
#[command(
    name = "opuc",
    version,
    about = "Best-approximation distances and sparse exponent systems on the unit circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trigonometric moments m_0..m_order.
    Moments {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        order: usize,
    },
    /// Verblunsky coefficients and the running norm products.
    Alphas {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        len: usize,
    },
    /// β(k, n) over 1 ≤ k ≤ k_max, 0 ≤ n ≤ n_max.
    Beta {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
    /// β next to both upper bounds, with the sandwich verdicts.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        #[arg(long, default_value_t = 60)]
        n_max: usize,
    },
    /// Build an exponent set from a construction document.
    Lambda {
        #[command(flatten)]
        common: Common,
        /// JSON file such as {"construction":"thm12","s":1.5,"count":6}.
        #[arg(long)]
        construction: PathBuf,
    },
    /// dist(z^m, span E(Λ ∩ [0, N])) along a schedule of N.
    DensityCurve {
        #[command(flatten)]
        common: Common,
        /// Construction document producing Λ (block constructions only).
        #[arg(long)]
        construction: PathBuf,
        #[arg(long, default_value_t = 0)]
        target: u64,
        /// Comma-separated N values; defaults to doubling up to max Λ.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<u64>>,
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
    },
    /// Block witnesses for a given tolerance.
    Thm33 {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        targets: Vec<u64>,
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
        #[arg(long, default_value_t = 4)]
        blocks: usize,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        /// Comma-separated block starts; default k_1 = 1, k_{j+1} = k_j + ℓ_j + 1.
        #[arg(long, value_delimiter = ',')]
        starts: Option<Vec<u64>>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Measure-spec JSON document.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Starting precision in bits.
    #[arg(long, default_value_t = 256)]
    precision: u32,
    /// Highest precision escalation may reach (default 8× the start, at most 4096).
    #[arg(long)]
    ceiling: Option<u32>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Config(String),
    Budget(String),
}

impl From<OpucError> for Failure {
    fn from(e: OpucError) -> Self {
        match e {
            OpucError::Precision { .. } => Failure::Budget(e.to_string()),
            e => Failure::Config(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(Failure::Budget(msg)) => {
            eprintln!("opuc: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("opuc: {msg}");
            ExitCode::from(2)
        }
    }
}

fn name(command: &Command) -> &'static str {
    match command {
        Command::Moments { .. } => "moments",
        Command::Alphas { .. } => "alphas",
        Command::Beta { .. } => "beta",
        Command::Bounds { .. } => "bounds",
        Command::Lambda { .. } => "lambda",
        Command::DensityCurve { .. } => "density-curve",
        Command::Thm33 { .. } => "thm33",
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::Moments { common, .. }
        | Command::Alphas { common, .. }
        | Command::Beta { common, .. }
        | Command::Bounds { common, .. }
        | Command::Lambda { common, .. }
        | Command::DensityCurve { common, .. }
        | Command::Thm33 { common, .. } => common,
    }
}

fn run(command: Command) -> Result<bool, Failure> {
    let c = common(&command);
    let config = ExperimentConfig {
        experiment: name(&command).into(),
        measure_path: c.measure.clone(),
        precision: c.precision,
        out: c.out.clone(),
        format: match c.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
    };
    config.validate()?;
    let policy = match c.ceiling {
        Some(ceiling) => PrecisionPolicy::new(c.precision, ceiling)?,
        None => PrecisionPolicy::from_start(c.precision),
    };
    let measure = || load_measure(config.measure_path.as_deref());

    let report = match &command {
        Command::Moments { order, .. } => run_moments(&measure()?, *order, config.precision)?,
        Command::Alphas { len, .. } => run_alphas(&measure()?, *len, policy)?,
        Command::Beta { k_max, n_max, .. } => run_beta(&measure()?, *k_max, *n_max, policy)?,
        Command::Bounds { k_max, n_max, .. } => {
            run_bound_table(&measure()?, *k_max, *n_max, policy)?
        }
        Command::Lambda { construction, .. } => run_lambda(&load_construction(construction)?)?,
        Command::DensityCurve {
            construction,
            target,
            schedule,
            tol,
            ..
        } => {
            let m = measure()?;
            let lambda = load_construction(construction)?.lambda_set()?;
            let last = lambda
                .max()
                .ok_or_else(|| Failure::Config("construction produced an empty set".into()))?;
            let last = u64::try_from(last)
                .map_err(|_| Failure::Config("Λ exceeds the 64-bit exponent range".into()))?;
            let schedule = schedule
                .clone()
                .unwrap_or_else(|| doubling_schedule(8, last));
            run_density_curve(&m, &lambda, *target, &schedule, *tol, policy)?
        }
        Command::Thm33 {
            targets,
            tol,
            blocks,
            n_max,
            starts,
            ..
        } => {
            let params = Thm33Params {
                targets: targets.clone(),
                tol: *tol,
                blocks: *blocks,
                n_max: *n_max,
                starts: starts.clone(),
            };
            run_thm_3_3(&measure()?, &params, policy)?
        }
    };
    emit(&report, &config)?;
    Ok(report.passed())
}

fn load_measure(path: Option<&Path>) -> Result<MeasureSpec, Failure> {
    let path = path.ok_or_else(|| Failure::Config("--measure <path> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    parse_measure_spec(&text).map_err(|d| Failure::Config(format!("{}: {d}", path.display())))
}

fn load_construction(path: &Path) -> Result<LambdaSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    LambdaSpec::parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn emit(report: &ExperimentReport, config: &ExperimentConfig) -> Result<(), Failure> {
    let body = report.render(config.format);
    match &config.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    for v in &report.verdicts {
        eprintln!(
            "{} {}: {:e} {} {:e}",
            if v.pass { "pass" } else { "FAIL" },
            v.check,
            v.lhs,
            v.relation,
            v.rhs
        );
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}
