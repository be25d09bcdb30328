//! `key = value` problem definitions.
//!
//! ```text
//! # Problem 3 as a config file
//! alpha  = 0.5
//! beta   = 1
//! domain = 0, 1
//! q      = (2 - 2*t + t^2)*(x - x^2)*exp(-t) + 2*t^2*exp(-t)
//! g1     = 0
//! g2     = 0
//! bc     = dirichlet
//! left   = 0
//! right  = 0
//! exact  = (x - x^2)*t^2*exp(-t)
//! ```
//!
//! `q` and `exact` may use `x` and `t`; `g1`, `g2` only `x`; `left` and
//! `right` only `t`. `alpha`, `beta` and both `domain` entries are
//! constant expressions. `q` defaults to `0` and `exact` is optional.
//! Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use telegraph_core::expr::{self, Expression, Var};
use telegraph_core::problem::{BoundaryKind, BoundarySpec, TelegraphProblem};

use crate::CliError;

const KEYS: &[&str] = &[
    "alpha", "beta", "domain", "q", "g1", "g2", "bc", "left", "right", "exact",
];

fn config_err(line: Option<usize>, msg: impl Into<String>) -> CliError {
    let msg = msg.into();
    CliError::Config(match line {
        Some(n) => format!("config line {n}: {msg}"),
        None => format!("config: {msg}"),
    })
}

struct Entry {
    line: usize,
    value: String,
}

fn parse_expr(entries: &BTreeMap<String, Entry>, key: &str, allowed: &[Var]) -> Result<Option<Expression>, CliError> {
    let Some(entry) = entries.get(key) else {
        return Ok(None);
    };
    let e = expr::parse(&entry.value)
        .map_err(|err| config_err(Some(entry.line), format!("`{key}`: {err}")))?;
    for (var, name) in [(Var::X, "x"), (Var::T, "t")] {
        if e.uses(var) && !allowed.contains(&var) {
            return Err(config_err(
                Some(entry.line),
                format!("`{key}` may not depend on {name}"),
            ));
        }
    }
    Ok(Some(e))
}

fn required(entries: &BTreeMap<String, Entry>, key: &str, allowed: &[Var]) -> Result<Expression, CliError> {
    parse_expr(entries, key, allowed)?.ok_or_else(|| config_err(None, format!("missing key `{key}`")))
}

fn constant(entries: &BTreeMap<String, Entry>, key: &str) -> Result<f64, CliError> {
    let line = entries.get(key).map(|e| e.line);
    let e = required(entries, key, &[])?;
    e.evaluate(0.0, 0.0)
        .map_err(|err| config_err(line, format!("`{key}`: {err}")))
}

/// Evaluation failures surface as NaN, which the solver reports as a
/// numerical error with location.
fn space_time(e: Expression) -> Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> {
    Arc::new(move |x, t| e.evaluate(x, t).unwrap_or(f64::NAN))
}

fn space(e: Expression) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
    Arc::new(move |x| e.evaluate(x, 0.0).unwrap_or(f64::NAN))
}

fn time(e: Expression) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
    Arc::new(move |t| e.evaluate(0.0, t).unwrap_or(f64::NAN))
}

pub fn parse_problem(source: &str) -> Result<TelegraphProblem, CliError> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (key, value) = text
            .split_once('=')
            .ok_or_else(|| config_err(Some(line), "expected `key = value`"))?;
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(config_err(Some(line), format!("unknown key `{key}`")));
        }
        if entries.contains_key(&key) {
            return Err(config_err(Some(line), format!("duplicate key `{key}`")));
        }
        entries.insert(key, Entry { line, value: value.trim().to_string() });
    }

    let alpha = constant(&entries, "alpha")?;
    let beta = constant(&entries, "beta")?;

    let domain = entries
        .get("domain")
        .ok_or_else(|| config_err(None, "missing key `domain`"))?;
    let bounds: Vec<f64> = domain
        .value
        .split(',')
        .map(|part| {
            let e = expr::parse(part.trim())
                .map_err(|err| config_err(Some(domain.line), format!("`domain`: {err}")))?;
            if e.uses(Var::X) || e.uses(Var::T) {
                return Err(config_err(Some(domain.line), "`domain` must be constant"));
            }
            e.evaluate(0.0, 0.0)
                .map_err(|err| config_err(Some(domain.line), format!("`domain`: {err}")))
        })
        .collect::<Result<_, _>>()?;
    let [a, b] = bounds[..] else {
        return Err(config_err(Some(domain.line), "`domain` needs exactly two values `a, b`"));
    };

    let kind = match entries.get("bc") {
        None => return Err(config_err(None, "missing key `bc`")),
        Some(e) => match e.value.to_ascii_lowercase().as_str() {
            "dirichlet" => BoundaryKind::Dirichlet,
            "neumann" => BoundaryKind::Neumann,
            other => {
                return Err(config_err(
                    Some(e.line),
                    format!("`bc` must be dirichlet or neumann, got `{other}`"),
                ))
            }
        },
    };

    let forcing = parse_expr(&entries, "q", &[Var::X, Var::T])?
        .unwrap_or_else(|| expr::parse("0").expect("literal"));
    let g1 = required(&entries, "g1", &[Var::X])?;
    let g2 = required(&entries, "g2", &[Var::X])?;
    let left = required(&entries, "left", &[Var::T])?;
    let right = required(&entries, "right", &[Var::T])?;
    let exact = parse_expr(&entries, "exact", &[Var::X, Var::T])?;

    let boundary = BoundarySpec {
        kind,
        left: time(left),
        right: time(right),
    };
    let mut problem = TelegraphProblem::new(
        alpha,
        beta,
        (a, b),
        space_time(forcing),
        space(g1),
        space(g2),
        boundary,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(exact) = exact {
        problem = problem.with_exact(space_time(exact));
    }
    Ok(problem)
}

pub fn load_problem(path: &Path) -> Result<TelegraphProblem, CliError> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "config".into());
    Ok(parse_problem(&source)?.with_name(name))
}
