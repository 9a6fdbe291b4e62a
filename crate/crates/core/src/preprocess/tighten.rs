//! Per-type station caps, lifted execution times and the bound on the
//! number of most-qualified workers.

use crate::instance::{Instance, Time};

use super::arcs::{ceil_div, ArcBounds};
use super::knapsack::{solve_conflict_knapsack, KnapsackMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelTightenings {
    /// Maximum number of tasks a station staffed by each type can hold.
    pub max_tasks: Vec<usize>,
    /// Lifted times, `None` where the original time is infeasible.
    pub lifted_times: Vec<Vec<Option<Time>>>,
    /// Minimum number of type-1 workers.
    pub z1_lb: i64,
}

pub fn compute_tightenings(instance: &Instance, bounds: &ArcBounds) -> ModelTightenings {
    ModelTightenings {
        max_tasks: compute_max_tasks(instance, bounds),
        lifted_times: compute_lifted_times(instance, bounds),
        z1_lb: compute_z1_lb(instance),
    }
}

/// Tasks type `h` may execute, with their times.
fn eligible(instance: &Instance, h: usize) -> (Vec<usize>, Vec<Time>) {
    (0..instance.task_count()).filter_map(|i| instance.time(i, h).map(|t| (i, t))).unzip()
}

/// Conflict pairs restricted to `tasks`, re-indexed to positions.
fn local_conflicts(tasks: &[usize], bounds: &ArcBounds) -> Vec<(usize, usize)> {
    let mut pos = std::collections::HashMap::new();
    for (p, &t) in tasks.iter().enumerate() {
        pos.insert(t, p);
    }
    bounds
        .conflicts()
        .into_iter()
        .filter_map(|(a, b)| Some((*pos.get(&a)?, *pos.get(&b)?)))
        .collect()
}

/// `M_h`: maximum-cardinality conflict knapsack over the tasks type `h`
/// may execute. At least 1 (every task fits alone), at most `n`.
pub fn compute_max_tasks(instance: &Instance, bounds: &ArcBounds) -> Vec<usize> {
    (0..instance.type_count())
        .map(|h| {
            let (tasks, weights) = eligible(instance, h);
            if tasks.is_empty() {
                return 1;
            }
            let conflicts = local_conflicts(&tasks, bounds);
            let r = solve_conflict_knapsack(&weights, instance.cycle_time(), &conflicts, KnapsackMode::MaxCardinality);
            (r.objective as usize).clamp(1, instance.task_count())
        })
        .collect()
}

/// Lifted times `t'_ih = C - Δ_ih`, where `Δ_ih` is the largest
/// conflict-free packing of the other type-`h` tasks into `C - t_ih`.
///
/// Tasks are lifted one at a time in index order and each packing uses the
/// already lifted times of earlier tasks. This keeps every station that is
/// feasible under the original times feasible under the lifted ones; lifting
/// all tasks from the original times at once does not.
pub fn compute_lifted_times(instance: &Instance, bounds: &ArcBounds) -> Vec<Vec<Option<Time>>> {
    let c = instance.cycle_time();
    let mut lifted: Vec<Vec<Option<Time>>> =
        (0..instance.task_count()).map(|i| (0..instance.type_count()).map(|h| instance.time(i, h)).collect()).collect();
    for h in 0..instance.type_count() {
        let (tasks, mut weights) = eligible(instance, h);
        let conflicts = local_conflicts(&tasks, bounds);
        for p in 0..tasks.len() {
            if weights[p] > c {
                // never fits a type-h station; nothing to lift
                continue;
            }
            let others: Vec<Time> = weights.iter().enumerate().map(|(q, &w)| if q == p { c + 1 } else { w }).collect();
            let delta = solve_conflict_knapsack(&others, c - weights[p], &conflicts, KnapsackMode::MaxWeight).objective;
            let lifted_time = c - delta;
            debug_assert!(lifted_time >= weights[p]);
            weights[p] = lifted_time;
            lifted[tasks[p]][h] = Some(lifted_time);
        }
    }
    lifted
}

/// `⌈Σ_{k_i = 1} t_i1 / C⌉`.
pub fn compute_z1_lb(instance: &Instance) -> i64 {
    let total: Time = (0..instance.task_count()).filter(|&i| instance.task_type(i) == 0).map(|i| instance.min_time(i)).sum();
    ceil_div(total, instance.cycle_time())
}
