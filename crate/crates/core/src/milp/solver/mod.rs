//! Solver backends behind one contract.

mod embedded;
mod external;
mod line;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::model::MilpModel;

pub use embedded::EmbeddedBackend;
pub use external::{parse_solution_file, write_solution_file, ExternalBackend, SOLVER_ENV};

/// Integrality and feasibility tolerance.
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    /// Stopped early with an incumbent.
    Feasible,
    Infeasible,
    /// Stopped early without an incumbent.
    TimeLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::Feasible => "FEASIBLE",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::TimeLimit => "TIME_LIMIT",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolveStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "OPTIMAL" => Ok(SolveStatus::Optimal),
            "FEASIBLE" => Ok(SolveStatus::Feasible),
            "INFEASIBLE" => Ok(SolveStatus::Infeasible),
            "TIME_LIMIT" => Ok(SolveStatus::TimeLimit),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Incumbent values indexed by variable id.
    pub values: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// Best bound in the objective's direction: a lower bound when
    /// minimizing, an upper bound when maximizing.
    pub bound: f64,
    pub nodes: u64,
    pub seconds: f64,
}

impl SolveResult {
    pub fn has_incumbent(&self) -> bool {
        self.values.is_some()
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("time limit must be positive")]
    TimeLimit,
    #[error("model not supported by this backend: {0}")]
    Unsupported(String),
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver command failed ({status}): {stderr}")]
    Process { status: String, stderr: String },
    #[error("solution file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no solver command configured (set {SOLVER_ENV})")]
    NoCommand,
    #[error(transparent)]
    Lp(#[from] super::lp::LpError),
}

pub trait Backend: Sync {
    fn solve(&self, model: &MilpModel, time_limit: f64, hint: Option<&[f64]>) -> Result<SolveResult, SolveError>;
}

/// Solves with the embedded branch and bound.
pub fn solve(model: &MilpModel, time_limit: f64, hint: Option<&[f64]>) -> Result<SolveResult, SolveError> {
    EmbeddedBackend.solve(model, time_limit, hint)
}
