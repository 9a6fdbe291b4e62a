//! Bounds and reductions that tighten the exact model: station-gap bounds
//! on precedence pairs, station windows, per-type station caps, lifted
//! times and the type-1 worker bound.

mod arcs;
mod knapsack;
mod tighten;
mod windows;

pub use arcs::{compute_arc_bounds, ArcBounds};
pub use knapsack::{solve_conflict_knapsack, KnapsackMode, KnapsackResult};
pub use tighten::{compute_lifted_times, compute_max_tasks, compute_tightenings, compute_z1_lb, ModelTightenings};
pub use windows::{compute_m_ub, compute_station_windows, StationWindows, WindowError};

use crate::closures::{compute_closures, Closures};
use crate::instance::{Cost, Instance};

/// Everything the tightened model needs.
#[derive(Debug, Clone)]
pub struct PreprocessInfo {
    pub closures: Closures,
    pub arc_bounds: ArcBounds,
    pub windows: StationWindows,
    pub tightenings: ModelTightenings,
}

/// Cost and station count of a known feasible line, used for the station
/// bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnownSolution {
    pub cost: Cost,
    pub stations: usize,
}

/// Runs the full preprocessing pipeline. Without a known solution (or with
/// a zero-cost cheapest worker) the station bound falls back to `n`.
pub fn preprocess(instance: &Instance, known: Option<KnownSolution>) -> Result<PreprocessInfo, WindowError> {
    let closures = compute_closures(instance);
    let arc_bounds = compute_arc_bounds(instance, &closures);
    let cheapest = *instance.costs().last().expect("at least one worker type");
    let m_ub = match known {
        Some(k) if cheapest > 0 => compute_m_ub(k.cost, cheapest, k.stations)?.min(instance.task_count()),
        _ => instance.task_count(),
    };
    let windows = compute_station_windows(instance, &closures, &arc_bounds, m_ub)?;
    let tightenings = compute_tightenings(instance, &arc_bounds);
    Ok(PreprocessInfo { closures, arc_bounds, windows, tightenings })
}
