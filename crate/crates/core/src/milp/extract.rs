//! Reading a line layout back out of model values.

use thiserror::Error;

use crate::instance::Instance;
use crate::solution::{check_feasibility, Solution, Station, Violation};

use super::model::{MilpModel, Symbol};
use super::solver::{SolveResult, TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error("the result carries no incumbent")]
    NoIncumbent,
    #[error("variable `{name}` = {value} is not integral")]
    Fractional { name: String, value: f64 },
    #[error("station {station} has tasks but no single worker type")]
    Staffing { station: usize },
    #[error("extracted layout is infeasible: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Infeasible(Vec<Violation>),
}

/// Stations in index order, empty ones dropped. The layout is checked
/// against the instance before it is returned.
pub fn extract_solution(instance: &Instance, model: &MilpModel, result: &SolveResult) -> Result<Solution, ExtractError> {
    let values = result.values.as_ref().ok_or(ExtractError::NoIncumbent)?;
    for (v, &x) in model.variables().iter().zip(values) {
        if v.kind.is_integral() && (x - x.round()).abs() > TOLERANCE {
            return Err(ExtractError::Fractional { name: v.name.clone(), value: x });
        }
    }
    let on = |j: usize| values[j] > 0.5;
    let mut tasks: Vec<Vec<usize>> = Vec::new();
    let mut workers: Vec<Vec<usize>> = Vec::new();
    for (j, v) in model.variables().iter().enumerate() {
        if !on(j) {
            continue;
        }
        let (station, entry) = match Symbol::parse(&v.name) {
            Some(Symbol::Assign { task, worker, station }) => (station, Some((task, worker))),
            Some(Symbol::Staff { worker, station }) => {
                if workers.len() <= station {
                    workers.resize(station + 1, Vec::new());
                }
                workers[station].push(worker);
                continue;
            }
            _ => continue,
        };
        if let Some((task, worker)) = entry {
            if tasks.len() <= station {
                tasks.resize(station + 1, Vec::new());
            }
            tasks[station].push(task);
            if workers.len() <= station {
                workers.resize(station + 1, Vec::new());
            }
            if !workers[station].contains(&worker) {
                workers[station].push(worker);
            }
        }
    }
    let mut stations = Vec::new();
    for (s, ts) in tasks.into_iter().enumerate() {
        if ts.is_empty() {
            continue;
        }
        let ws = &mut workers[s];
        ws.sort_unstable();
        ws.dedup();
        let [worker] = ws.as_slice() else { return Err(ExtractError::Staffing { station: s + 1 }) };
        stations.push(Station::new(*worker, ts));
    }
    let solution = Solution::new(stations);
    let violations = check_feasibility(instance, &solution);
    if violations.is_empty() {
        Ok(solution)
    } else {
        Err(ExtractError::Infeasible(violations))
    }
}
