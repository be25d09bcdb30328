use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use telegraph_cli::commands::SolveSummary;
use telegraph_cli::{
    cmd_bench, cmd_solve, cmd_stability, CliError, OutputFormat, ProblemSource, RunConfig,
    StabilityConfig, Sweep,
};
use telegraph_core::problem;
use telegraph_core::solver::ForcingLevel;
use telegraph_core::stability::DEFAULT_PHI_SAMPLES;

/// Trigonometric B-spline collocation for the telegraph equation.
#[derive(Parser)]
#[command(name = "telegraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nodal solution at the requested times.
    Solve(RunArgs),
    /// Error norms and stepping time at the requested times.
    Bench(RunArgs),
    /// Von Neumann root scan.
    Stability(StabilityArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in problem 1..=5.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    problem: Option<u32>,
    /// Problem definition file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of cells.
    #[arg(long = "n")]
    n_cells: usize,
    #[arg(long)]
    dt: f64,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long)]
    t_final: f64,
    /// Comma-separated output times; defaults to t-final.
    #[arg(long, value_delimiter = ',')]
    times: Vec<f64>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Defaults to standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Time level of the forcing term: `j` or `theta`.
    #[arg(long, default_value = "j")]
    forcing: String,
    /// Also write (x, t, u) on every time level to this file.
    #[arg(long)]
    emit_plot_data: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityArgs {
    /// Take alpha, beta and the domain from a built-in problem.
    #[arg(long)]
    problem: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long)]
    dt: f64,
    #[arg(long = "n")]
    n_cells: usize,
    /// `a,b`
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    domain: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_PHI_SAMPLES)]
    phi_samples: usize,
    /// e.g. `theta=0:1:0.05`
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    let problem = match (&args.problem, &args.config) {
        (Some(id), _) => ProblemSource::Builtin(*id),
        (None, Some(path)) => ProblemSource::Config(path.clone()),
        (None, None) => return Err(CliError::Config("need --problem or --config".into())),
    };
    let forcing_level = match args.forcing.as_str() {
        "j" => ForcingLevel::Current,
        "theta" => ForcingLevel::Theta,
        other => {
            return Err(CliError::Config(format!(
                "--forcing must be `j` or `theta`, got `{other}`"
            )))
        }
    };
    let mut times = args.times.clone();
    if times.windows(2).any(|w| w[1] <= w[0]) {
        times.sort_by(f64::total_cmp);
        times.dedup();
    }
    Ok(RunConfig {
        problem,
        n_cells: args.n_cells,
        dt: args.dt,
        theta: args.theta,
        t_final: args.t_final,
        times,
        format: args.format.parse()?,
        forcing_level,
    })
}

fn report(summary: &SolveSummary) {
    for d in &summary.diagnostics {
        eprintln!("warning: {d}");
    }
    if summary.stability_warning {
        eprintln!("warning: theta < 0.5 is outside the unconditional stability region");
    }
}

fn solve(args: RunArgs) -> Result<(), CliError> {
    let cfg = run_config(&args)?;
    let out = open_output(args.output.as_deref())?;
    let summary = match &args.emit_plot_data {
        Some(path) => {
            let mut plot = BufWriter::new(File::create(path)?);
            cmd_solve(&cfg, out, Some(&mut plot))?
        }
        None => cmd_solve(&cfg, out, None)?,
    };
    report(&summary);
    Ok(())
}

fn bench(args: RunArgs) -> Result<(), CliError> {
    let cfg = run_config(&args)?;
    if cfg.theta < 0.5 {
        eprintln!("warning: theta < 0.5 is outside the unconditional stability region");
    }
    let out = open_output(args.output.as_deref())?;
    cmd_bench(&cfg, out)?;
    Ok(())
}

fn stability(args: StabilityArgs) -> Result<(), CliError> {
    let base = args.problem.map(problem::builtin_problem).transpose()?;
    let pick = |given: Option<f64>, from: Option<f64>, name: &str| {
        given
            .or(from)
            .ok_or_else(|| CliError::Config(format!("need --{name} or --problem")))
    };
    let alpha = pick(args.alpha, base.as_ref().map(|p| p.alpha()), "alpha")?;
    let beta = pick(args.beta, base.as_ref().map(|p| p.beta()), "beta")?;
    let domain = match (&args.domain, &base) {
        (Some(d), _) => match d[..] {
            [a, b] => (a, b),
            _ => return Err(CliError::Config("--domain takes exactly two values `a,b`".into())),
        },
        (None, Some(p)) => p.domain(),
        (None, None) => return Err(CliError::Config("need --domain or --problem".into())),
    };
    let sweep = args.sweep.as_deref().map(str::parse::<Sweep>).transpose()?;
    let cfg = StabilityConfig {
        alpha,
        beta,
        theta: args.theta,
        dt: args.dt,
        n_cells: args.n_cells,
        domain,
        phi_samples: args.phi_samples,
        sweep,
        format: args.format.parse::<OutputFormat>()?,
    };
    let out = open_output(args.output.as_deref())?;
    cmd_stability(&cfg, out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
        Command::Stability(args) => stability(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
