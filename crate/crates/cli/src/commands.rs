use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use telegraph_core::basis::{self, UniformMesh};
use telegraph_core::metrics;
use telegraph_core::problem::{self, Diagnostic, TelegraphProblem};
use telegraph_core::solver::{ForcingLevel, SchemeParams, Stepper};
use telegraph_core::stability;

use crate::config;
use crate::CliError;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Tsv,
}

impl OutputFormat {
    fn delimiter(self) -> u8 {
        match self {
            OutputFormat::Csv => b',',
            OutputFormat::Tsv => b'\t',
        }
    }

    fn writer<W: Write>(self, out: W) -> csv::Writer<W> {
        csv::WriterBuilder::new()
            .delimiter(self.delimiter())
            .from_writer(out)
    }
}

impl FromStr for OutputFormat {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "tsv" => Ok(OutputFormat::Tsv),
            other => Err(CliError::Config(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Builtin(u32),
    Config(PathBuf),
}

impl ProblemSource {
    pub fn load(&self) -> Result<TelegraphProblem, CliError> {
        match self {
            ProblemSource::Builtin(id) => Ok(problem::builtin_problem(*id)?),
            ProblemSource::Config(path) => config::load_problem(path),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSource,
    pub n_cells: usize,
    pub dt: f64,
    pub theta: f64,
    pub t_final: f64,
    /// Sorted output times; empty means `[t_final]`.
    pub times: Vec<f64>,
    pub format: OutputFormat,
    pub forcing_level: ForcingLevel,
}

struct Prepared {
    problem: TelegraphProblem,
    mesh: UniformMesh,
    params: SchemeParams,
    targets: Vec<(f64, usize)>,
    diagnostics: Vec<Diagnostic>,
}

impl RunConfig {
    pub fn output_times(&self) -> Vec<f64> {
        if self.times.is_empty() {
            vec![self.t_final]
        } else {
            self.times.clone()
        }
    }

    fn prepare(&self) -> Result<Prepared, CliError> {
        let problem = self.problem.load()?;
        let (a, b) = problem.domain();
        let mesh = UniformMesh::new(a, b, self.n_cells)?;
        basis::basis_weights(&mesh)?;
        let params = SchemeParams::new(self.theta, self.dt, self.t_final)?
            .with_forcing_level(self.forcing_level);
        if let Some(limit) = problem.max_time() {
            if self.t_final > limit + 1e-12 {
                return Err(CliError::Config(format!(
                    "t-final {} exceeds the horizon {limit} of {}",
                    self.t_final,
                    problem.name()
                )));
            }
        }
        let mut targets: Vec<(f64, usize)> = Vec::new();
        for t in self.output_times() {
            let m = params.aligned_step(t).ok_or_else(|| {
                CliError::Config(format!(
                    "output time {t} is not a multiple of dt = {} within [0, {}]",
                    self.dt, self.t_final
                ))
            })?;
            if targets.last().is_some_and(|&(_, last)| m <= last) {
                return Err(CliError::Config(
                    "output times must be strictly increasing".into(),
                ));
            }
            targets.push((m as f64 * self.dt, m));
        }
        let diagnostics = problem::validate(&problem, &mesh);
        Ok(Prepared {
            problem,
            mesh,
            params,
            targets,
            diagnostics,
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveSummary {
    pub rows: usize,
    pub diagnostics: Vec<Diagnostic>,
    pub stability_warning: bool,
}

/// One record per (output time, knot): `x, t, u, exact, error`.
///
/// With `plot` set, every time level is also written to it as `x, t, u`.
pub fn cmd_solve<W: Write>(
    cfg: &RunConfig,
    out: W,
    plot: Option<&mut dyn Write>,
) -> Result<SolveSummary, CliError> {
    let prep = cfg.prepare()?;
    let weights = basis::basis_weights(&prep.mesh)?;
    let knots: Vec<f64> = prep.mesh.knots().collect();

    let mut writer = cfg.format.writer(out);
    writer.write_record(["x", "t", "u", "exact", "error"])?;
    let mut plot_writer = plot.map(|p| cfg.format.writer(p));
    if let Some(pw) = plot_writer.as_mut() {
        pw.write_record(["x", "t", "u"])?;
    }

    let mut stepper = Stepper::new(&prep.problem, prep.mesh, prep.params)?;
    let mut rows = 0;
    let last = prep.targets.last().map_or(0, |&(_, m)| m);
    let mut pending = prep.targets.iter().peekable();
    loop {
        let frame = stepper.current();
        let t = stepper.index() as f64 * cfg.dt;
        let u = frame.knot_values(&weights);
        if let Some(pw) = plot_writer.as_mut() {
            for (x, ui) in knots.iter().zip(&u) {
                pw.write_record([fmt_f64(*x), fmt_f64(t), fmt_f64(*ui)])?;
            }
        }
        if pending.peek().is_some_and(|&&(_, m)| m == stepper.index()) {
            pending.next();
            for (x, ui) in knots.iter().zip(&u) {
                let (exact, error) = match prep.problem.exact(*x, t) {
                    Some(e) => (fmt_f64(e), fmt_f64(e - ui)),
                    None => (String::new(), String::new()),
                };
                writer.write_record([fmt_f64(*x), fmt_f64(t), fmt_f64(*ui), exact, error])?;
                rows += 1;
            }
        }
        if stepper.index() >= last {
            break;
        }
        stepper.advance()?;
    }
    writer.flush()?;
    if let Some(pw) = plot_writer.as_mut() {
        pw.flush()?;
    }
    Ok(SolveSummary {
        rows,
        diagnostics: prep.diagnostics,
        stability_warning: prep.params.stability_warning(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub t: f64,
    pub l2: f64,
    pub l_inf: f64,
    pub rms: f64,
    pub cpu_seconds: f64,
}

/// Error norms at each output time: `t, L2, Linf, RMS, cpu_seconds`.
/// `cpu_seconds` is the cumulative wall time spent stepping.
pub fn cmd_bench<W: Write>(cfg: &RunConfig, out: W) -> Result<Vec<BenchRow>, CliError> {
    let prep = cfg.prepare()?;
    if !prep.problem.has_exact() {
        return Err(CliError::Config(format!(
            "bench needs an exact solution; `{}` has none",
            prep.problem.name()
        )));
    }
    let mut writer = cfg.format.writer(out);
    writer.write_record(["t", "L2", "Linf", "RMS", "cpu_seconds"])?;

    let mut stepper = Stepper::new(&prep.problem, prep.mesh, prep.params)?;
    let mut elapsed = 0.0;
    let mut rows = Vec::with_capacity(prep.targets.len());
    for &(_, m) in &prep.targets {
        let start = Instant::now();
        while stepper.index() < m {
            stepper.advance()?;
        }
        elapsed += start.elapsed().as_secs_f64();
        let report = metrics::error_norms(stepper.current(), &prep.problem, &prep.mesh)?;
        let row = BenchRow {
            t: report.time,
            l2: report.l2,
            l_inf: report.l_inf,
            rms: report.rms,
            cpu_seconds: elapsed,
        };
        writer.write_record([
            fmt_f64(row.t),
            fmt_f64(row.l2),
            fmt_f64(row.l_inf),
            fmt_f64(row.rms),
            format!("{:.6}", row.cpu_seconds),
        ])?;
        rows.push(row);
    }
    writer.flush()?;
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Alpha,
    Beta,
    Theta,
    Dt,
}

/// `param=start:stop:step`, inclusive of `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| (self.start + i as f64 * self.step).min(self.stop))
            .collect()
    }
}

impl FromStr for Sweep {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("sweep `{s}` must look like theta=0:1:0.05"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let param = match name.trim() {
            "alpha" => SweepParam::Alpha,
            "beta" => SweepParam::Beta,
            "theta" => SweepParam::Theta,
            "dt" => SweepParam::Dt,
            other => return Err(CliError::Config(format!("cannot sweep `{other}`"))),
        };
        let parts: Vec<f64> = range
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
            return Err(bad());
        }
        Ok(Sweep { param, start, stop, step })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityConfig {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub dt: f64,
    pub n_cells: usize,
    pub domain: (f64, f64),
    pub phi_samples: usize,
    pub sweep: Option<Sweep>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRow {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub dt: f64,
    pub h: f64,
    pub report: stability::StabilityReport,
}

/// Root scan per parameter set: max root magnitude, worst wave number,
/// the three Routh-Hurwitz quantities at `phi = pi` and the verdict.
pub fn cmd_stability<W: Write>(
    cfg: &StabilityConfig,
    out: W,
) -> Result<Vec<StabilityRow>, CliError> {
    if cfg.phi_samples < 2 {
        return Err(CliError::Config(format!(
            "phi-samples must be at least 2, got {}",
            cfg.phi_samples
        )));
    }
    let mesh = UniformMesh::new(cfg.domain.0, cfg.domain.1, cfg.n_cells)?;
    let weights = basis::basis_weights(&mesh)?;
    let base = (cfg.alpha, cfg.beta, cfg.theta, cfg.dt);
    let sets: Vec<(f64, f64, f64, f64)> = match cfg.sweep {
        None => vec![base],
        Some(sweep) => sweep
            .values()
            .into_iter()
            .map(|v| {
                let (mut a, mut b, mut th, mut k) = base;
                match sweep.param {
                    SweepParam::Alpha => a = v,
                    SweepParam::Beta => b = v,
                    SweepParam::Theta => th = v,
                    SweepParam::Dt => k = v,
                }
                (a, b, th, k)
            })
            .collect(),
    };

    let mut writer = cfg.format.writer(out);
    writer.write_record([
        "alpha",
        "beta",
        "theta",
        "dt",
        "h",
        "max_amplification",
        "worst_phi",
        "rh_sum",
        "rh_a_minus_c",
        "rh_a_minus_b_plus_c",
        "verdict",
    ])?;
    let mut rows = Vec::with_capacity(sets.len());
    for (alpha, beta, theta, dt) in sets {
        if !(alpha >= 0.0 && beta >= 0.0 && (0.0..=1.0).contains(&theta) && dt >= 0.0) {
            return Err(CliError::Config(format!(
                "invalid parameters alpha={alpha}, beta={beta}, theta={theta}, dt={dt}"
            )));
        }
        let report =
            stability::scan_with_weights(alpha, beta, theta, dt, &weights, cfg.phi_samples);
        let (s, d, m) = report.rh_conditions;
        writer.write_record([
            fmt_f64(alpha),
            fmt_f64(beta),
            fmt_f64(theta),
            fmt_f64(dt),
            fmt_f64(mesh.h()),
            fmt_f64(report.max_amplification),
            fmt_f64(report.worst_phi),
            fmt_f64(s),
            fmt_f64(d),
            fmt_f64(m),
            if report.stable { "stable" } else { "unstable" }.to_string(),
        ])?;
        rows.push(StabilityRow {
            alpha,
            beta,
            theta,
            dt,
            h: mesh.h(),
            report,
        });
    }
    writer.flush()?;
    Ok(rows)
}
