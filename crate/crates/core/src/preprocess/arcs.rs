//! Station-gap lower bounds on the transitive precedence graph.

use std::collections::BTreeMap;

use crate::closures::Closures;
use crate::instance::{Instance, Time};

/// `LB_ij` for every connected pair `(i, j)` (a path `i -> ... -> j`
/// exists): at least `LB_ij` stations separate `i` from `j` in any
/// feasible line.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ArcBounds {
    bounds: BTreeMap<(usize, usize), i64>,
}

impl ArcBounds {
    pub fn get(&self, i: usize, j: usize) -> Option<i64> {
        self.bounds.get(&(i, j)).copied()
    }

    /// All arcs of the auxiliary graph with their bound, ordered by pair.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.bounds.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    /// Pairs that can never share a station (`LB_ij > 0`).
    pub fn conflicts(&self) -> Vec<(usize, usize)> {
        self.iter().filter(|&(_, lb)| lb > 0).map(|(p, _)| p).collect()
    }

    /// Tab-separated dump: `i  j  LB_ij`, 1-based.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("i\tj\tlb\n");
        for ((i, j), lb) in self.iter() {
            out.push_str(&format!("{}\t{}\t{}\n", i + 1, j + 1, lb));
        }
        out
    }
}

pub fn compute_arc_bounds(instance: &Instance, closures: &Closures) -> ArcBounds {
    let n = instance.task_count();
    let c = instance.cycle_time();
    let mut bounds = BTreeMap::new();
    for i in 0..n {
        for &j in &closures.all_succs[i] {
            // tasks on some path i -> j, both ends included
            let inner: Time = closures.all_succs[i]
                .iter()
                .filter(|&&k| closures.reaches(k, j))
                .map(|&k| instance.min_time(k))
                .sum();
            let total = inner + instance.min_time(i) + instance.min_time(j);
            bounds.insert((i, j), ceil_div(total, c) - 1);
        }
    }
    ArcBounds { bounds }
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    (a + b - 1).div_euclid(b)
}
