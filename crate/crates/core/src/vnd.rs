//! Variable neighbourhood descent over two MILP neighbourhoods:
//! relocating tasks to adjacent stations, and reassigning tasks with the
//! worker mix fixed so that whole stations can be emptied.

use std::time::Instant;

use thiserror::Error;

use crate::instance::{Cost, Instance};
use crate::milp::{
    build_reassignment, build_relocation, extract_solution, neighbourhood, solution_values, Backend, EmbeddedBackend, ExtractError,
    MilpModel, SolveResult, Symbol, TOLERANCE,
};
use crate::solution::{evaluate, Solution};

/// Builds the relocation model for `base`: its stations, each task allowed
/// at its own station and the adjacent ones.
pub fn build_milp1(instance: &Instance, base: &Solution) -> MilpModel {
    build_relocation(instance, base)
}

/// Builds the reassignment model for `base`: its stations and worker counts
/// per type, maximizing the cost of workers whose stations end up empty.
pub fn build_milp2(instance: &Instance, base: &Solution) -> MilpModel {
    build_reassignment(instance, base)
}

/// 0-based stations a task at station `station` of an `m`-station line may
/// take in the relocation model.
pub fn admissible_stations(station: usize, m: usize) -> std::ops::RangeInclusive<usize> {
    neighbourhood(station, m)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VndError {
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("station {0} is marked empty but holds tasks")]
    EmptiedStationHasTasks(usize),
    #[error("cost {cost} does not match the workforce cost {workforce} minus savings {savings}")]
    Savings { cost: Cost, workforce: Cost, savings: f64 },
}

/// Drops the stations the reassignment emptied, together with their
/// workers, and checks that the cost fell by exactly the savings.
pub fn apply_milp2_result(
    instance: &Instance,
    base: &Solution,
    model: &MilpModel,
    result: &SolveResult,
) -> Result<Solution, VndError> {
    let values = result.values.as_ref().ok_or(ExtractError::NoIncumbent)?;
    for s in 0..base.station_count() {
        let Some(beta) = model.var_by_symbol(Symbol::Emptied { station: s }) else { continue };
        if values[beta.0] > 0.5 {
            let busy = (0..instance.task_count()).any(|i| {
                (0..instance.type_count()).any(|h| {
                    model.var_by_symbol(Symbol::Assign { task: i, worker: h, station: s }).is_some_and(|x| values[x.0] > 0.5)
                })
            });
            if busy {
                return Err(VndError::EmptiedStationHasTasks(s + 1));
            }
        }
    }
    let solution = extract_solution(instance, model, result)?;
    let cost = evaluate(instance, &solution).expect("extracted layout is well formed");
    let workforce = evaluate(instance, base).expect("base layout is well formed");
    let savings = result.objective.unwrap_or(0.0);
    if ((workforce - cost) as f64 - savings).abs() > TOLERANCE * (1.0 + savings.abs()) {
        return Err(VndError::Savings { cost, workforce, savings });
    }
    Ok(solution)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VndConfig {
    pub k_max: usize,
    /// Seconds per neighbourhood solve.
    pub time_limit: f64,
}

impl Default for VndConfig {
    fn default() -> Self {
        Self { k_max: 2, time_limit: 15.0 }
    }
}

#[derive(Debug, Clone)]
pub struct VndReport {
    pub solution: Solution,
    pub cost: Cost,
    pub initial_cost: Cost,
    /// Neighbourhood solves performed.
    pub calls: usize,
    /// Strict improvements found.
    pub improvements: usize,
    pub nodes: u64,
    pub seconds: f64,
}

/// One neighbourhood move result with its search statistics.
struct Step {
    solution: Option<Solution>,
    nodes: u64,
}

fn explore(instance: &Instance, base: &Solution, k: usize, time_limit: f64, backend: &dyn Backend) -> Step {
    let model = if k == 1 { build_milp1(instance, base) } else { build_milp2(instance, base) };
    let hint = solution_values(&model, base);
    let result = match backend.solve(&model, time_limit, hint.as_deref()) {
        Ok(r) => r,
        Err(e) => {
            log::warn!("neighbourhood {k} solve failed: {e}");
            return Step { solution: None, nodes: 0 };
        }
    };
    let nodes = result.nodes;
    if !result.has_incumbent() {
        return Step { solution: None, nodes };
    }
    let solution = if k == 1 {
        extract_solution(instance, &model, &result).map_err(VndError::from)
    } else {
        apply_milp2_result(instance, base, &model, &result)
    };
    match solution {
        Ok(s) => Step { solution: Some(s), nodes },
        Err(e) => {
            log::warn!("neighbourhood {k} result rejected: {e}");
            Step { solution: None, nodes }
        }
    }
}

/// One relocation solve from `base`; `None` when the solve yields nothing
/// usable.
pub fn relocation_step(instance: &Instance, base: &Solution, time_limit: f64) -> Option<Solution> {
    explore(instance, base, 1, time_limit, &EmbeddedBackend).solution
}

/// One reassignment solve from `base`.
pub fn reassignment_step(instance: &Instance, base: &Solution, time_limit: f64) -> Option<Solution> {
    explore(instance, base, 2, time_limit, &EmbeddedBackend).solution
}

/// Descent with the default embedded backend.
pub fn vnd(instance: &Instance, initial: &Solution, k_max: usize, per_call_time_limit: f64) -> Solution {
    vnd_with(instance, initial, &VndConfig { k_max, time_limit: per_call_time_limit }, &EmbeddedBackend).solution
}

/// Applies neighbourhood `k` to the best line; a strict improvement
/// restarts at the first neighbourhood, anything else moves to the next.
/// Equal-cost results are adopted without restarting.
pub fn vnd_with(instance: &Instance, initial: &Solution, config: &VndConfig, backend: &dyn Backend) -> VndReport {
    let start = Instant::now();
    let initial_cost = evaluate(instance, initial).expect("initial layout is well formed");
    let mut best = initial.clone();
    let mut best_cost = initial_cost;
    let mut report = VndReport {
        solution: Solution::default(),
        cost: 0,
        initial_cost,
        calls: 0,
        improvements: 0,
        nodes: 0,
        seconds: 0.0,
    };
    let mut k = 1;
    while k <= config.k_max.min(2) {
        let step = explore(instance, &best, k, config.time_limit, backend);
        report.calls += 1;
        report.nodes += step.nodes;
        match step.solution {
            Some(curr) => {
                let cost = evaluate(instance, &curr).expect("neighbourhood output is well formed");
                if cost < best_cost {
                    log::debug!("neighbourhood {k}: {best_cost} -> {cost}");
                    best = curr;
                    best_cost = cost;
                    report.improvements += 1;
                    k = 1;
                } else {
                    if cost == best_cost {
                        best = curr;
                    }
                    k += 1;
                }
            }
            None => k += 1,
        }
    }
    report.solution = best;
    report.cost = best_cost;
    report.seconds = start.elapsed().as_secs_f64();
    report
}
