//! Station-oriented constructive heuristic.
//!
//! Stations are filled one at a time. For every worker type a candidate
//! load is built greedily with a task priority rule; a worker priority rule
//! then picks which type (and load) staffs the station.

mod rules;

use rayon::prelude::*;

use crate::instance::{Cost, Instance, Time};
use crate::solution::{evaluate, Solution, Station};

pub use rules::{score_task, RuleContext, TaskRule, UnknownRule, WorkerRule};

/// A line under construction.
#[derive(Debug, Clone)]
pub struct PartialState {
    pub assigned: Vec<bool>,
    /// Unassigned direct predecessors per task.
    pub pending: Vec<usize>,
    pub stations: Vec<Station>,
    /// Cost of the stations built so far.
    pub cost: Cost,
}

impl PartialState {
    pub fn new(instance: &Instance) -> Self {
        let n = instance.task_count();
        let mut pending = vec![0; n];
        for &(_, b) in instance.arcs() {
            pending[b] += 1;
        }
        Self { assigned: vec![false; n], pending, stations: Vec::new(), cost: 0 }
    }

    pub fn is_complete(&self) -> bool {
        self.assigned.iter().all(|&a| a)
    }

    /// Closes a station staffed by `worker` with `tasks`.
    pub fn commit(&mut self, ctx: &RuleContext<'_>, worker: usize, tasks: Vec<usize>) {
        for &i in &tasks {
            self.assigned[i] = true;
            for &j in &ctx.closures.succs[i] {
                self.pending[j] -= 1;
            }
        }
        self.cost += ctx.instance.cost(worker);
        self.stations.push(Station::new(worker, tasks));
    }
}

/// Unassigned tasks whose direct predecessors are all assigned, ascending.
pub fn available_tasks(state: &PartialState) -> Vec<usize> {
    (0..state.assigned.len()).filter(|&i| !state.assigned[i] && state.pending[i] == 0).collect()
}

/// Greedy load for worker type `h`: repeatedly the best-scoring fitting
/// candidate, falling back to the longest fitting one when the rule scores
/// none. Tasks released by the load join the candidates. Returned in
/// selection order.
pub fn build_station_load(state: &PartialState, h: usize, rule: TaskRule, ctx: &RuleContext<'_>) -> Vec<usize> {
    let inst = ctx.instance;
    let mut pending = state.pending.clone();
    let mut taken = state.assigned.clone();
    let mut candidates = available_tasks(state);
    let mut load: Time = 0;
    let mut out = Vec::new();
    loop {
        let fits = |i: usize| inst.time(i, h).is_some_and(|t| load + t <= inst.cycle_time());
        let mut best: Option<(usize, f64)> = None;
        for &i in candidates.iter().filter(|&&i| fits(i)) {
            let Some(v) = score_task(i, h, rule, ctx) else { continue };
            let better = match best {
                None => true,
                Some((_, b)) => (rule.maximizes() && v > b) || (!rule.maximizes() && v < b),
            };
            if better {
                best = Some((i, v));
            }
        }
        let pick = match best {
            Some((i, _)) => Some(i),
            None => candidates
                .iter()
                .copied()
                .filter(|&i| fits(i))
                .fold(None, |acc: Option<usize>, i| match acc {
                    Some(a) if inst.time(a, h) >= inst.time(i, h) => Some(a),
                    _ => Some(i),
                }),
        };
        let Some(i) = pick else { break };
        load += inst.time(i, h).expect("fits implies eligible");
        taken[i] = true;
        out.push(i);
        candidates.retain(|&c| c != i);
        for &j in &ctx.closures.succs[i] {
            pending[j] -= 1;
            if pending[j] == 0 && !taken[j] {
                let pos = candidates.partition_point(|&c| c < j);
                candidates.insert(pos, j);
            }
        }
    }
    out
}

/// Cost estimate for the unassigned tasks (other than `load`) if type `h`
/// were never used again: each task goes to the cheapest other type that
/// may execute it, or to `h` when no other type qualifies; each type's
/// total time is rounded up to whole stations.
pub fn look_ahead_cost(state: &PartialState, h: usize, load: &[usize], instance: &Instance) -> Cost {
    let l = instance.type_count();
    let mut time = vec![0 as Time; l];
    for i in 0..instance.task_count() {
        if state.assigned[i] || load.contains(&i) {
            continue;
        }
        let k = instance.task_type(i);
        let alt = (0..=k).filter(|&g| g != h).min_by_key(|&g| (instance.cost(g), g)).unwrap_or(h);
        time[alt] += instance.time(i, alt).expect("alt <= k_i");
    }
    let c = instance.cycle_time();
    (0..l).map(|g| (time[g] + c - 1) / c * instance.cost(g)).sum()
}

/// Picks the worker type for the station among types with a nonempty load;
/// ties go to the lowest type.
pub fn select_worker(loads: &[Vec<usize>], rule: WorkerRule, state: &PartialState, instance: &Instance) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (h, load) in loads.iter().enumerate() {
        if load.is_empty() {
            continue;
        }
        let c = instance.cost(h) as f64;
        let total: Time = load.iter().map(|&i| instance.time(i, h).expect("load is eligible")).sum();
        // smaller is better
        let key = match rule {
            WorkerRule::W1 => (state.cost + instance.cost(h) + look_ahead_cost(state, h, load, instance)) as f64,
            WorkerRule::W2 => c / load.len() as f64,
            WorkerRule::W3 => c / total as f64,
            WorkerRule::W4 => -(total as f64),
        };
        if best.is_none_or(|(_, b)| key < b) {
            best = Some((h, key));
        }
    }
    best.expect("type 1 can always take an available task").0
}

/// Builds a complete line with one rule pair.
pub fn constructive(instance: &Instance, t_rule: TaskRule, w_rule: WorkerRule) -> Solution {
    constructive_with(&RuleContext::new(instance), t_rule, w_rule)
}

pub fn constructive_with(ctx: &RuleContext<'_>, t_rule: TaskRule, w_rule: WorkerRule) -> Solution {
    let inst = ctx.instance;
    let mut state = PartialState::new(inst);
    while !state.is_complete() {
        let loads: Vec<Vec<usize>> =
            (0..inst.type_count()).map(|h| build_station_load(&state, h, t_rule, ctx)).collect();
        let h = select_worker(&loads, w_rule, &state, inst);
        let load = loads.into_iter().nth(h).expect("selected type exists");
        state.commit(ctx, h, load);
    }
    Solution::new(state.stations)
}

/// Best line over all 52 rule pairs, with the winning pair. Ties go to the
/// lowest (task rule, worker rule).
pub fn run_portfolio(instance: &Instance) -> (Solution, TaskRule, WorkerRule) {
    let ctx = RuleContext::new(instance);
    let pairs: Vec<(TaskRule, WorkerRule)> =
        TaskRule::ALL.iter().flat_map(|&t| WorkerRule::ALL.iter().map(move |&w| (t, w))).collect();
    let runs: Vec<(Cost, Solution)> = pairs
        .par_iter()
        .map(|&(t, w)| {
            let sol = constructive_with(&ctx, t, w);
            (evaluate(instance, &sol).expect("heuristic output is well formed"), sol)
        })
        .collect();
    let best = (0..runs.len()).min_by_key(|&k| (runs[k].0, k)).expect("52 runs");
    let (t, w) = pairs[best];
    (runs.into_iter().nth(best).expect("index in range").1, t, w)
}
