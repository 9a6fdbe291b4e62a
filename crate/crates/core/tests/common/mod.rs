//! Independent oracles shared by the integration tests. Nothing here calls
//! into the crate's algorithms; only the `Instance` accessors are used.

#![allow(dead_code)]

use std::collections::HashMap;

use albhw::{Instance, Solution, Station};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GOLDEN: &str = include_str!("../../data/golden13.albhw");
pub const GOLDEN_SOLUTION: &str = include_str!("../../data/golden13.sol");

pub fn golden() -> Instance {
    Instance::parse(GOLDEN).expect("golden instance parses")
}

/// Random valid instance with at most `n_max` tasks and `l_max` types.
pub fn random_instance(seed: u64, n_max: usize, l_max: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=n_max);
    let l = rng.gen_range(1..=l_max);
    let c: i64 = rng.gen_range(10..=60);
    let mut costs = vec![rng.gen_range(50..=150i64)];
    for h in 1..l {
        let prev = costs[h - 1];
        costs.push(rng.gen_range(prev / 2..=prev));
    }
    let mut task_types = Vec::with_capacity(n);
    let mut times = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.gen_range(0..l);
        let mut row = vec![None; l];
        let mut t = rng.gen_range(1..=c * 2 / 3);
        for slot in row.iter_mut().take(k + 1) {
            *slot = Some(t);
            t += rng.gen_range(0..=t / 2 + 1);
        }
        task_types.push(k);
        times.push(row);
    }
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(&mut rng);
    let density = rng.gen_range(0.0..0.5);
    let mut arcs = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(density) {
                arcs.push((labels[i], labels[j]));
            }
        }
    }
    Instance::new(c, costs, task_types, times, arcs).expect("generated instance is valid")
}

/// Direct successors, read straight from the arc list.
pub fn successors(instance: &Instance) -> Vec<Vec<usize>> {
    let mut succ = vec![Vec::new(); instance.task_count()];
    for &(a, b) in instance.arcs() {
        succ[a].push(b);
    }
    succ
}

/// Transitive successor sets by plain DFS from every task.
pub fn reachability(instance: &Instance) -> Vec<Vec<bool>> {
    let n = instance.task_count();
    let succ = successors(instance);
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = succ[s].clone();
            while let Some(v) = stack.pop() {
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(&succ[v]);
                }
            }
            seen
        })
        .collect()
}

/// Cheapest worker type able to run `mask` within the cycle time, with its
/// cost.
fn best_type(instance: &Instance, mask: u32) -> Option<(usize, i64)> {
    let tasks: Vec<usize> = (0..instance.task_count()).filter(|&i| mask >> i & 1 == 1).collect();
    (0..instance.type_count())
        .filter(|&h| {
            let load: Option<i64> = tasks.iter().map(|&i| instance.time(i, h)).sum();
            load.is_some_and(|t| t <= instance.cycle_time())
        })
        .map(|h| (h, instance.cost(h)))
        .min_by_key(|&(h, c)| (c, h))
}

/// Every worker type able to run `mask`, with its cost.
fn all_types(instance: &Instance, mask: u32) -> Vec<(usize, i64)> {
    let tasks: Vec<usize> = (0..instance.task_count()).filter(|&i| mask >> i & 1 == 1).collect();
    (0..instance.type_count())
        .filter(|&h| {
            let load: Option<i64> = tasks.iter().map(|&i| instance.time(i, h)).sum();
            load.is_some_and(|t| t <= instance.cycle_time())
        })
        .map(|h| (h, instance.cost(h)))
        .collect()
}

/// Station contents that may follow the already placed `done` set: every
/// direct predecessor of a chosen task is placed or chosen too.
fn next_stations(instance: &Instance, done: u32) -> Vec<u32> {
    let n = instance.task_count();
    let full = (1u32 << n) - 1;
    let rest = full & !done;
    let mut preds = vec![0u32; n];
    for &(a, b) in instance.arcs() {
        preds[b] |= 1 << a;
    }
    let mut out = Vec::new();
    let mut sub = rest;
    while sub != 0 {
        let ok = (0..n).filter(|&i| sub >> i & 1 == 1).all(|i| preds[i] & !(done | sub) == 0);
        if ok {
            out.push(sub);
        }
        sub = (sub - 1) & rest;
    }
    out
}

/// Exhaustive optimum over ordered partitions into stations and worker
/// types per station (memoized on the placed set).
pub fn brute_force_optimum(instance: &Instance) -> i64 {
    fn go(instance: &Instance, done: u32, full: u32, memo: &mut HashMap<u32, i64>) -> i64 {
        if done == full {
            return 0;
        }
        if let Some(&v) = memo.get(&done) {
            return v;
        }
        let mut best = i64::MAX;
        for s in next_stations(instance, done) {
            if let Some((_, c)) = best_type(instance, s) {
                let rest = go(instance, done | s, full, memo);
                if rest != i64::MAX {
                    best = best.min(c + rest);
                }
            }
        }
        memo.insert(done, best);
        best
    }
    assert!(instance.task_count() <= 16, "oracle is exponential");
    let full = (1u32 << instance.task_count()) - 1;
    go(instance, 0, full, &mut HashMap::new())
}

/// Every optimal line, capped at `limit` lines.
pub fn all_optimal_solutions(instance: &Instance, limit: usize) -> Vec<Solution> {
    let n = instance.task_count();
    let full = (1u32 << n) - 1;
    let mut memo = HashMap::new();
    fn cost_to_go(instance: &Instance, done: u32, full: u32, memo: &mut HashMap<u32, i64>) -> i64 {
        if done == full {
            return 0;
        }
        if let Some(&v) = memo.get(&done) {
            return v;
        }
        let mut best = i64::MAX;
        for s in next_stations(instance, done) {
            if let Some((_, c)) = best_type(instance, s) {
                let rest = cost_to_go(instance, done | s, full, memo);
                if rest != i64::MAX {
                    best = best.min(c + rest);
                }
            }
        }
        memo.insert(done, best);
        best
    }
    fn collect(
        instance: &Instance,
        done: u32,
        full: u32,
        memo: &mut HashMap<u32, i64>,
        prefix: &mut Vec<Station>,
        out: &mut Vec<Solution>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if done == full {
            out.push(Solution::new(prefix.clone()));
            return;
        }
        let target = cost_to_go(instance, done, full, memo);
        for s in next_stations(instance, done) {
            for (h, c) in all_types(instance, s) {
                let rest = cost_to_go(instance, done | s, full, memo);
                if rest != i64::MAX && c + rest == target {
                    let tasks = (0..instance.task_count()).filter(|&i| s >> i & 1 == 1).collect();
                    prefix.push(Station::new(h, tasks));
                    collect(instance, done | s, full, memo, prefix, out, limit);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    collect(instance, 0, full, &mut memo, &mut Vec::new(), &mut out, limit);
    out
}

/// Independent feasibility check: no empty station, every task once,
/// eligible worker, cycle time, precedence.
pub fn is_feasible(instance: &Instance, solution: &Solution) -> bool {
    let n = instance.task_count();
    let mut at = vec![usize::MAX; n];
    for (s, st) in solution.stations.iter().enumerate() {
        if st.tasks.is_empty() || st.worker >= instance.type_count() {
            return false;
        }
        let mut load = 0;
        for &i in &st.tasks {
            if i >= n || at[i] != usize::MAX {
                return false;
            }
            at[i] = s;
            match instance.time(i, st.worker) {
                Some(t) => load += t,
                None => return false,
            }
        }
        if load > instance.cycle_time() {
            return false;
        }
    }
    at.iter().all(|&s| s != usize::MAX) && instance.arcs().iter().all(|&(a, b)| at[a] <= at[b])
}

pub fn cost(instance: &Instance, solution: &Solution) -> i64 {
    solution.stations.iter().map(|s| instance.cost(s.worker)).sum()
}

/// 2^n enumeration of the conflict knapsack: best (cardinality or weight)
/// over conflict-free subsets within capacity.
pub fn knapsack_by_enumeration(weights: &[i64], capacity: i64, conflicts: &[(usize, usize)], by_weight: bool) -> i64 {
    let n = weights.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        if conflicts.iter().any(|&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1) {
            continue;
        }
        let w: i64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| weights[i]).sum();
        if w > capacity {
            continue;
        }
        let value = if by_weight { w } else { mask.count_ones() as i64 };
        best = best.max(value);
    }
    best
}
