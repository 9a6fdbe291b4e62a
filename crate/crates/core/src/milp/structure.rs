//! Line-balancing layout of a model's variables. Builders attach it so the
//! embedded backend can bound and prune with problem knowledge; models read
//! from LP files carry none and are solved generically.

use crate::instance::Instance;

use super::model::VarId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineObjective {
    /// Minimize the total cost of the staffed workers.
    WorkerCost,
    /// Maximize the cost of workers whose stations end up empty, with the
    /// per-type worker counts fixed.
    EmptiedSavings { workforce: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct LineStructure {
    pub instance: Instance,
    pub stations: usize,
    /// `v_s` per station.
    pub open: Vec<VarId>,
    /// `y_hs`, indexed `[h][s]`.
    pub staff: Vec<Vec<VarId>>,
    /// `x_ihs`, indexed `[i][h][s]`; `None` where the variable was not created.
    pub assign: Vec<Vec<Vec<Option<VarId>>>>,
    /// Modelled precedence rows `(i, j, gap)`: station(i) + gap <= station(j).
    pub precedence: Vec<(usize, usize, i64)>,
    pub objective: LineObjective,
    /// Allows pruning partial layouts whose closed stations could still
    /// absorb an available task (moving it earlier keeps every model row
    /// satisfied and never costs more).
    pub maximal_loads: bool,
}
