//! Adapter for an external solver executable.
//!
//! The command template may use `{model}`, `{solution}` and `{time_limit}`;
//! it runs through `sh -c`. The solver must write a solution file:
//!
//! ```text
//! # comment
//! status OPTIMAL        (optional: OPTIMAL | FEASIBLE | INFEASIBLE | TIME_LIMIT)
//! objective 319         (optional, recomputed from the values when absent)
//! bound 319             (optional)
//! nodes 42              (optional)
//! x_2_1_1 1             (one `name value` line per nonzero variable)
//! ```
//!
//! Without a status line, a file with values reads as FEASIBLE and one
//! without values as TIME_LIMIT. Incumbent hints are not passed on.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use super::{Backend, SolveError, SolveResult, SolveStatus};
use crate::milp::lp::{export_lp, sanitize_name};
use crate::milp::model::{MilpModel, ObjectiveSense};

pub const SOLVER_ENV: &str = "ALBHW_SOLVER_CMD";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalBackend {
    pub command: String,
}

impl ExternalBackend {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into() }
    }

    /// Reads the command template from `ALBHW_SOLVER_CMD`.
    pub fn from_env() -> Result<Self, SolveError> {
        match std::env::var(SOLVER_ENV) {
            Ok(cmd) if !cmd.trim().is_empty() => Ok(Self::new(cmd)),
            _ => Err(SolveError::NoCommand),
        }
    }
}

fn quote(path: &Path) -> String {
    format!("'{}'", path.display().to_string().replace('\'', r"'\''"))
}

impl Backend for ExternalBackend {
    fn solve(&self, model: &MilpModel, time_limit: f64, _hint: Option<&[f64]>) -> Result<SolveResult, SolveError> {
        if time_limit.is_nan() || time_limit <= 0.0 {
            return Err(SolveError::TimeLimit);
        }
        let start = Instant::now();
        let dir = tempfile::tempdir()?;
        let model_path = dir.path().join("model.lp");
        let solution_path = dir.path().join("model.sol");
        std::fs::write(&model_path, export_lp(model)?)?;
        let cmd = self
            .command
            .replace("{model}", &quote(&model_path))
            .replace("{solution}", &quote(&solution_path))
            .replace("{time_limit}", &format!("{time_limit}"));
        log::debug!("running external solver: {cmd}");
        let out = Command::new("sh").arg("-c").arg(&cmd).output()?;
        if !out.status.success() {
            return Err(SolveError::Process {
                status: out.status.to_string(),
                stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            });
        }
        let text = std::fs::read_to_string(&solution_path)?;
        let mut result = parse_solution_file(model, &text)?;
        result.seconds = start.elapsed().as_secs_f64();
        Ok(result)
    }
}

/// Reads the solution-file format described in the module docs. Variable
/// names are matched after LP sanitization.
pub fn parse_solution_file(model: &MilpModel, text: &str) -> Result<SolveResult, SolveError> {
    let by_lp_name: std::collections::HashMap<String, usize> =
        model.variables().iter().enumerate().map(|(j, v)| (sanitize_name(&v.name), j)).collect();
    let mut status = None;
    let mut objective = None;
    let mut bound = None;
    let mut nodes = 0;
    let mut values: Option<Vec<f64>> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| SolveError::Parse { line: no + 1, message };
        let mut it = line.split_whitespace();
        let (Some(key), Some(val), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad(format!("expected `name value`, got `{line}`")));
        };
        let number = || val.parse::<f64>().map_err(|_| bad(format!("bad number `{val}`")));
        match key {
            "status" => status = Some(val.parse::<SolveStatus>().map_err(bad)?),
            "objective" => objective = Some(number()?),
            "bound" => bound = Some(number()?),
            "nodes" => nodes = val.parse::<u64>().map_err(|_| bad(format!("bad node count `{val}`")))?,
            name => {
                let Some(&j) = by_lp_name.get(name) else {
                    return Err(bad(format!("unknown variable `{name}`")));
                };
                values.get_or_insert_with(|| vec![0.0; model.var_count()])[j] = number()?;
            }
        }
    }
    let status = status.unwrap_or(if values.is_some() { SolveStatus::Feasible } else { SolveStatus::TimeLimit });
    if matches!(status, SolveStatus::Optimal | SolveStatus::Feasible) && values.is_none() {
        values = Some(vec![0.0; model.var_count()]);
    }
    if matches!(status, SolveStatus::Infeasible | SolveStatus::TimeLimit) {
        values = None;
    }
    let objective = match (&values, objective) {
        (Some(v), None) => Some(model.objective().value(v)),
        (Some(_), given) => given,
        (None, _) => None,
    };
    let unknown = match model.objective().sense {
        ObjectiveSense::Minimize => f64::NEG_INFINITY,
        ObjectiveSense::Maximize => f64::INFINITY,
    };
    let bound = match status {
        SolveStatus::Optimal => bound.or(objective).unwrap_or(unknown),
        SolveStatus::Infeasible => -unknown,
        _ => bound.unwrap_or(unknown),
    };
    Ok(SolveResult { status, values, objective, bound, nodes, seconds: 0.0 })
}

/// Writes a result in the solution-file format (nonzero values only).
pub fn write_solution_file(model: &MilpModel, result: &SolveResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "status {}", result.status);
    if let Some(obj) = result.objective {
        let _ = writeln!(out, "objective {obj}");
    }
    if result.bound.is_finite() {
        let _ = writeln!(out, "bound {}", result.bound);
    }
    let _ = writeln!(out, "nodes {}", result.nodes);
    if let Some(values) = &result.values {
        for (v, &x) in model.variables().iter().zip(values) {
            if x != 0.0 {
                let _ = writeln!(out, "{} {x}", sanitize_name(&v.name));
            }
        }
    }
    out
}
