//! Exact 0-1 knapsack with pairwise conflicts, in the two flavours the
//! model tightening needs: maximum cardinality and maximum weight (subset
//! sum).

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnapsackMode {
    MaxCardinality,
    MaxWeight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackResult {
    /// Number of chosen items or their total weight, depending on the mode.
    pub objective: i64,
    /// Chosen item indices, ascending.
    pub chosen: Vec<usize>,
}

/// Depth-first branch and bound. Items heavier than the capacity are never
/// chosen; conflicting items are never chosen together.
pub fn solve_conflict_knapsack(
    weights: &[i64],
    capacity: i64,
    conflicts: &[(usize, usize)],
    mode: KnapsackMode,
) -> KnapsackResult {
    assert!(weights.iter().all(|&w| w >= 0), "weights must be nonnegative");
    let n = weights.len();
    let mut order: Vec<usize> = (0..n).filter(|&i| weights[i] <= capacity).collect();
    match mode {
        KnapsackMode::MaxCardinality => order.sort_by_key(|&i| (weights[i], i)),
        KnapsackMode::MaxWeight => order.sort_by_key(|&i| (std::cmp::Reverse(weights[i]), i)),
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in conflicts {
        if a != b && a < n && b < n {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut search = Search {
        weights,
        order,
        adj,
        mode,
        blocked: vec![0; n],
        chosen: Vec::new(),
        best: -1,
        best_set: Vec::new(),
        ceiling: i64::MAX,
    };
    search.ceiling = search.bound(0, capacity);
    search.dfs(0, capacity, 0);
    let mut chosen = search.best_set;
    chosen.sort_unstable();
    KnapsackResult { objective: search.best.max(0), chosen }
}

struct Search<'a> {
    weights: &'a [i64],
    order: Vec<usize>,
    adj: Vec<Vec<usize>>,
    mode: KnapsackMode,
    blocked: Vec<u32>,
    chosen: Vec<usize>,
    best: i64,
    best_set: Vec<usize>,
    ceiling: i64,
}

impl Search<'_> {
    fn value(&self, item: usize) -> i64 {
        match self.mode {
            KnapsackMode::MaxCardinality => 1,
            KnapsackMode::MaxWeight => self.weights[item],
        }
    }

    /// Conflict-free relaxation over the undecided items from `pos`.
    fn bound(&self, pos: usize, room: i64) -> i64 {
        let free = self.order[pos..].iter().copied().filter(|&i| self.blocked[i] == 0 && self.weights[i] <= room);
        match self.mode {
            // ascending weights: greedy count is the exact relaxed optimum
            KnapsackMode::MaxCardinality => {
                let mut left = room;
                let mut count = 0;
                for i in free {
                    if self.weights[i] > left {
                        break;
                    }
                    left -= self.weights[i];
                    count += 1;
                }
                count
            }
            KnapsackMode::MaxWeight => free.map(|i| self.weights[i]).sum::<i64>().min(room),
        }
    }

    fn dfs(&mut self, pos: usize, room: i64, value: i64) {
        if value > self.best {
            self.best = value;
            self.best_set = self.chosen.clone();
        }
        if self.best >= self.ceiling || pos == self.order.len() {
            return;
        }
        if value + self.bound(pos, room) <= self.best {
            return;
        }
        let item = self.order[pos];
        if self.blocked[item] == 0 && self.weights[item] <= room {
            for k in 0..self.adj[item].len() {
                self.blocked[self.adj[item][k]] += 1;
            }
            self.chosen.push(item);
            self.dfs(pos + 1, room - self.weights[item], value + self.value(item));
            self.chosen.pop();
            for k in 0..self.adj[item].len() {
                self.blocked[self.adj[item][k]] -= 1;
            }
        }
        self.dfs(pos + 1, room, value);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_respects_conflicts() {
        let r = solve_conflict_knapsack(&[3, 3, 3], 6, &[(0, 1)], KnapsackMode::MaxCardinality);
        assert_eq!(r.objective, 2);
        assert_eq!(r.chosen.len(), 2);
        assert!(!(r.chosen.contains(&0) && r.chosen.contains(&1)));
    }

    #[test]
    fn subset_sum_without_conflicts() {
        let r = solve_conflict_knapsack(&[4, 4], 7, &[], KnapsackMode::MaxWeight);
        assert_eq!(r.objective, 4);
    }

    #[test]
    fn zero_capacity_chooses_nothing() {
        for mode in [KnapsackMode::MaxCardinality, KnapsackMode::MaxWeight] {
            let r = solve_conflict_knapsack(&[2, 5], 0, &[], mode);
            assert_eq!(r, KnapsackResult { objective: 0, chosen: vec![] });
        }
    }
}
