//! Direct and transitive predecessor/successor sets of the precedence graph.

use crate::instance::Instance;

/// Per-task neighbourhoods of the precedence DAG. All sets are sorted
/// ascending (0-based task indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closures {
    pub preds: Vec<Vec<usize>>,
    pub succs: Vec<Vec<usize>>,
    pub all_preds: Vec<Vec<usize>>,
    pub all_succs: Vec<Vec<usize>>,
    reach: Vec<Vec<bool>>,
}

impl Closures {
    /// `true` when there is a nonempty path `i -> ... -> j`.
    pub fn reaches(&self, i: usize, j: usize) -> bool {
        self.reach[i][j]
    }
}

pub fn compute_closures(instance: &Instance) -> Closures {
    let n = instance.task_count();
    let mut preds = vec![Vec::new(); n];
    let mut succs = vec![Vec::new(); n];
    for &(a, b) in instance.arcs() {
        preds[b].push(a);
        succs[a].push(b);
    }
    preds.iter_mut().for_each(|v| v.sort_unstable());
    succs.iter_mut().for_each(|v| v.sort_unstable());

    let mut reach = vec![vec![false; n]; n];
    // reverse topological order: successors are complete before their predecessors
    for &i in instance.topological_order().iter().rev() {
        for &j in &succs[i] {
            reach[i][j] = true;
            let (row_i, row_j) = if i < j {
                let (lo, hi) = reach.split_at_mut(j);
                (&mut lo[i], &hi[0])
            } else {
                let (lo, hi) = reach.split_at_mut(i);
                (&mut hi[0], &lo[j])
            };
            for (dst, &src) in row_i.iter_mut().zip(row_j.iter()) {
                *dst |= src;
            }
        }
    }
    let all_succs: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| reach[i][j]).collect()).collect();
    let all_preds: Vec<Vec<usize>> = (0..n).map(|j| (0..n).filter(|&i| reach[i][j]).collect()).collect();
    Closures { preds, succs, all_preds, all_succs, reach }
}
