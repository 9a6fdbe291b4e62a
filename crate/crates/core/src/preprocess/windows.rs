//! Earliest/latest station windows by longest paths over the weighted
//! auxiliary graph.

use thiserror::Error;

use crate::closures::Closures;
use crate::instance::{Cost, Instance};

use super::arcs::ArcBounds;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    /// No line with at most `m_ub` stations exists.
    #[error("task {task}: earliest station {earliest} exceeds latest station {latest} (station bound {m_ub})")]
    Infeasible { task: usize, earliest: usize, latest: i64, m_ub: usize },
    #[error("station bound needs a positive cheapest worker cost, got {0}")]
    NonPositiveCost(Cost),
}

/// 1-based station windows `[e_i, l_i]` and the station bound they were
/// computed for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationWindows {
    pub earliest: Vec<usize>,
    pub latest: Vec<usize>,
    pub m_ub: usize,
}

impl StationWindows {
    pub fn contains(&self, task: usize, station: usize) -> bool {
        (self.earliest[task]..=self.latest[task]).contains(&station)
    }

    /// Tab-separated dump: `task  earliest  latest`, 1-based.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# m_ub\t{}\ntask\tearliest\tlatest\n", self.m_ub);
        for (i, (e, l)) in self.earliest.iter().zip(&self.latest).enumerate() {
            out.push_str(&format!("{}\t{}\t{}\n", i + 1, e, l));
        }
        out
    }
}

/// `⌊z / c_l⌋`, never below the station count of the layout that produced
/// `z` and never below 1.
pub fn compute_m_ub(z: Cost, cheapest_cost: Cost, layout_stations: usize) -> Result<usize, WindowError> {
    if cheapest_cost <= 0 {
        return Err(WindowError::NonPositiveCost(cheapest_cost));
    }
    let floor = usize::try_from(z.div_euclid(cheapest_cost)).unwrap_or(0);
    Ok(floor.max(layout_stations).max(1))
}

pub fn compute_station_windows(
    instance: &Instance,
    closures: &Closures,
    bounds: &ArcBounds,
    m_ub: usize,
) -> Result<StationWindows, WindowError> {
    let n = instance.task_count();
    let order = instance.topological_order();
    let mut into = vec![Vec::new(); n];
    let mut out = vec![Vec::new(); n];
    for ((i, j), lb) in bounds.iter() {
        out[i].push((j, lb));
        into[j].push((i, lb));
    }
    // head[i]: longest source -> i path; source arcs reach tasks without
    // predecessors with weight 0
    let mut head = vec![0i64; n];
    for &i in order {
        for &(p, lb) in &into[i] {
            head[i] = head[i].max(head[p] + lb);
        }
    }
    // tail[i]: longest i -> sink path, i.e. earliest times on the transpose
    let mut tail = vec![0i64; n];
    for &i in order.iter().rev() {
        for &(j, lb) in &out[i] {
            tail[i] = tail[i].max(tail[j] + lb);
        }
    }
    debug_assert!((0..n).all(|i| !closures.preds[i].is_empty() || head[i] == 0));
    let mut earliest = Vec::with_capacity(n);
    let mut latest = Vec::with_capacity(n);
    for i in 0..n {
        let e = 1 + head[i] as usize;
        let l = m_ub as i64 - tail[i];
        if (e as i64) > l {
            return Err(WindowError::Infeasible { task: i + 1, earliest: e, latest: l, m_ub });
        }
        earliest.push(e);
        latest.push(l as usize);
    }
    Ok(StationWindows { earliest, latest, m_ub })
}
