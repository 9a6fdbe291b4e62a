//! Depth-first branch and bound over the integer variables with
//! activity-based bound propagation.
//!
//! Continuous variables are supported when no row holds more than one of
//! them: once the integers are fixed, each continuous variable is pinned
//! to the end of its propagated interval that the objective prefers.

use std::time::{Duration, Instant};

use super::line::LineBounder;
use super::{Backend, SolveError, SolveResult, SolveStatus, TOLERANCE};
use crate::milp::model::{MilpModel, ObjectiveSense, Sense, VarId};

const STACK_BYTES: usize = 256 << 20;

#[derive(Debug, Clone, Copy, Default)]
pub struct EmbeddedBackend;

impl Backend for EmbeddedBackend {
    fn solve(&self, model: &MilpModel, time_limit: f64, hint: Option<&[f64]>) -> Result<SolveResult, SolveError> {
        if time_limit.is_nan() || time_limit <= 0.0 {
            return Err(SolveError::TimeLimit);
        }
        // deep trees recurse once per integer variable
        std::thread::scope(|scope| {
            std::thread::Builder::new()
                .stack_size(STACK_BYTES)
                .spawn_scoped(scope, || run(model, time_limit, hint))
                .expect("spawn solver thread")
                .join()
                .expect("solver thread panicked")
        })
    }
}

struct Row {
    terms: Vec<(usize, f64)>,
    rhs: f64,
}

struct Search<'a> {
    rows: Vec<Row>,
    var_rows: Vec<Vec<usize>>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    integral: Vec<bool>,
    /// Objective in minimization form.
    obj: Vec<(usize, f64)>,
    obj_row: usize,
    obj_dirty: bool,
    /// Integer variables in branching order.
    order: Vec<usize>,
    /// Improvement an incumbent must beat by.
    step: f64,
    trail: Vec<(usize, f64, f64)>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    incumbent: Option<(f64, Vec<f64>)>,
    line: Option<LineBounder<'a>>,
    fix_buf: Vec<usize>,
    nodes: u64,
    deadline: Option<Instant>,
    aborted: bool,
    open_bound: f64,
}

fn run(model: &MilpModel, time_limit: f64, hint: Option<&[f64]>) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let deadline = Duration::try_from_secs_f64(time_limit).ok().and_then(|d| start.checked_add(d));
    let flip = if model.objective().sense == ObjectiveSense::Maximize { -1.0 } else { 1.0 };
    let nv = model.var_count();
    let integral: Vec<bool> = model.variables().iter().map(|v| v.kind.is_integral()).collect();

    let mut rows = Vec::new();
    for c in model.constraints() {
        let merged = merge_terms(&c.terms, 1.0);
        let continuous = merged.iter().filter(|&&(j, _)| !integral[j]).count();
        if continuous > 1 {
            return Err(SolveError::Unsupported(format!("row `{}` links several continuous variables", c.name)));
        }
        if matches!(c.sense, Sense::Le | Sense::Eq) {
            rows.push(Row { terms: merged.clone(), rhs: c.rhs });
        }
        if matches!(c.sense, Sense::Ge | Sense::Eq) {
            rows.push(Row { terms: merged.iter().map(|&(j, a)| (j, -a)).collect(), rhs: -c.rhs });
        }
    }
    let obj = merge_terms(&model.objective().terms, flip);
    let integral_obj = obj.iter().all(|&(j, c)| integral[j] && c.fract() == 0.0);
    let obj_row = rows.len();
    rows.push(Row { terms: obj.clone(), rhs: f64::INFINITY });
    let mut var_rows = vec![Vec::new(); nv];
    for (r, row) in rows.iter().enumerate() {
        for &(j, _) in &row.terms {
            if var_rows[j].last() != Some(&r) {
                var_rows[j].push(r);
            }
        }
    }
    let nrows = rows.len();
    let order = (0..nv).filter(|&j| integral[j]).collect();
    let mut search = Search {
        rows,
        var_rows,
        lb: model.variables().iter().map(|v| v.lower).collect(),
        ub: model.variables().iter().map(|v| v.upper).collect(),
        integral,
        obj,
        obj_row,
        obj_dirty: false,
        order,
        step: if integral_obj { 1.0 } else { TOLERANCE },
        trail: Vec::new(),
        queue: (0..nrows).collect(),
        queued: vec![true; nrows],
        incumbent: None,
        line: model.structure().map(LineBounder::new),
        fix_buf: Vec::new(),
        nodes: 0,
        deadline,
        aborted: false,
        open_bound: f64::INFINITY,
    };
    for j in 0..nv {
        if search.integral[j] {
            search.lb[j] = (search.lb[j] - TOLERANCE).ceil();
            search.ub[j] = (search.ub[j] + TOLERANCE).floor();
        }
    }

    let root_ok = (0..nv).all(|j| search.lb[j] <= search.ub[j]) && search.propagate();
    if root_ok {
        if (0..nv).any(|j| search.integral[j] && !(search.lb[j].is_finite() && search.ub[j].is_finite())) {
            return Err(SolveError::Unsupported("integer variable without finite bounds".into()));
        }
        if let Some(h) = hint {
            search.install_hint(h)?;
        }
        // the hint's cutoff may already close the root
        if search.propagate() {
            search.dfs(0)?;
        }
    }

    let seconds = start.elapsed().as_secs_f64();
    let nodes = search.nodes;
    let (status, bound) = match (&search.incumbent, search.aborted) {
        (Some((v, _)), false) => (SolveStatus::Optimal, *v),
        (None, false) => (SolveStatus::Infeasible, f64::INFINITY),
        // every open node was already beaten by the incumbent
        (Some((v, _)), true) if search.open_bound > v - search.step + TOLERANCE => (SolveStatus::Optimal, *v),
        (Some((v, _)), true) => (SolveStatus::Feasible, search.open_bound.min(*v)),
        (None, true) => (SolveStatus::TimeLimit, search.open_bound),
    };
    let (objective, values) = match search.incumbent {
        Some((v, x)) => (Some(flip * v), Some(x)),
        None => (None, None),
    };
    Ok(SolveResult { status, values, objective, bound: flip * bound, nodes, seconds })
}

/// Sums repeated variables and drops zero coefficients.
fn merge_terms(terms: &[(VarId, f64)], scale: f64) -> Vec<(usize, f64)> {
    let mut merged: Vec<(usize, f64)> = Vec::new();
    for &(v, a) in terms {
        match merged.iter_mut().find(|(j, _)| *j == v.0) {
            Some(t) => t.1 += scale * a,
            None => merged.push((v.0, scale * a)),
        }
    }
    merged.retain(|&(_, a)| a != 0.0);
    merged
}

impl Search<'_> {
    fn enqueue_var(&mut self, j: usize) {
        for k in 0..self.var_rows[j].len() {
            let r = self.var_rows[j][k];
            if !self.queued[r] {
                self.queued[r] = true;
                self.queue.push(r);
            }
        }
    }

    fn set_ub(&mut self, j: usize, v: f64) -> bool {
        if v < self.lb[j] - TOLERANCE {
            return false;
        }
        let v = v.max(self.lb[j]);
        let gain = self.ub[j] - v;
        let min_gain = if self.integral[j] { 0.5 } else { 1e-7 * (1.0 + v.abs()) };
        if gain > min_gain || (self.ub[j].is_infinite() && v.is_finite()) {
            self.trail.push((j, self.lb[j], self.ub[j]));
            self.ub[j] = v;
            self.enqueue_var(j);
        }
        true
    }

    fn set_lb(&mut self, j: usize, v: f64) -> bool {
        if v > self.ub[j] + TOLERANCE {
            return false;
        }
        let v = v.min(self.ub[j]);
        let gain = v - self.lb[j];
        let min_gain = if self.integral[j] { 0.5 } else { 1e-7 * (1.0 + v.abs()) };
        if gain > min_gain || (self.lb[j].is_infinite() && v.is_finite()) {
            self.trail.push((j, self.lb[j], self.ub[j]));
            self.lb[j] = v;
            self.enqueue_var(j);
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (j, lo, hi) = self.trail.pop().expect("len checked");
            self.lb[j] = lo;
            self.ub[j] = hi;
        }
    }

    fn clear_queue(&mut self) {
        for r in self.queue.drain(..) {
            self.queued[r] = false;
        }
    }

    /// Runs rows (and line windows) to a fixpoint. `false` on conflict.
    fn propagate(&mut self) -> bool {
        if std::mem::take(&mut self.obj_dirty) && !self.queued[self.obj_row] {
            self.queued[self.obj_row] = true;
            self.queue.push(self.obj_row);
        }
        loop {
            while let Some(r) = self.queue.pop() {
                self.queued[r] = false;
                if !self.propagate_row(r) {
                    self.clear_queue();
                    return false;
                }
            }
            let Some(line) = &self.line else { return true };
            let mut fixes = std::mem::take(&mut self.fix_buf);
            fixes.clear();
            let ok = line.propagate(&self.ub, &mut fixes);
            let before = self.trail.len();
            if ok {
                for &j in &fixes {
                    if !self.set_ub(j, 0.0) {
                        self.fix_buf = fixes;
                        self.clear_queue();
                        return false;
                    }
                }
            }
            let changed = self.trail.len() > before;
            self.fix_buf = fixes;
            if !ok {
                self.clear_queue();
                return false;
            }
            if !changed {
                return true;
            }
        }
    }

    fn propagate_row(&mut self, r: usize) -> bool {
        let rhs = self.rows[r].rhs;
        if rhs == f64::INFINITY {
            return true;
        }
        let mut min_act = 0.0;
        let mut inf = 0;
        for &(j, a) in &self.rows[r].terms {
            let b = if a > 0.0 { self.lb[j] } else { self.ub[j] };
            if b.is_infinite() {
                inf += 1;
            } else {
                min_act += a * b;
            }
        }
        let tol = TOLERANCE * (1.0 + rhs.abs());
        if inf == 0 && min_act > rhs + tol {
            return false;
        }
        if inf >= 2 {
            return true;
        }
        for k in 0..self.rows[r].terms.len() {
            let (j, a) = self.rows[r].terms[k];
            let b = if a > 0.0 { self.lb[j] } else { self.ub[j] };
            let rest = if b.is_infinite() {
                min_act
            } else if inf == 1 {
                continue;
            } else {
                min_act - a * b
            };
            let limit = (rhs - rest) / a;
            let ok = if a > 0.0 {
                let v = if self.integral[j] { (limit + TOLERANCE).floor() } else { limit };
                v >= self.ub[j] || self.set_ub(j, v)
            } else {
                let v = if self.integral[j] { (limit - TOLERANCE).ceil() } else { limit };
                v <= self.lb[j] || self.set_lb(j, v)
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn cutoff(&self) -> f64 {
        match &self.incumbent {
            Some((v, _)) => v - self.step,
            None => f64::INFINITY,
        }
    }

    fn node_bound(&self) -> f64 {
        let mut generic = 0.0;
        for &(j, c) in &self.obj {
            generic += if c > 0.0 { c * self.lb[j] } else if c < 0.0 { c * self.ub[j] } else { 0.0 };
        }
        if generic.is_nan() {
            generic = f64::NEG_INFINITY;
        }
        match &self.line {
            Some(line) => generic.max(line.bound(&self.lb, &self.ub)),
            None => generic,
        }
    }

    /// Evaluates a node whose integer variables are all fixed.
    fn leaf(&mut self) -> Result<(), SolveError> {
        let n = self.lb.len();
        let mut values = vec![0.0; n];
        let mut cost = vec![0.0; n];
        for &(j, c) in &self.obj {
            cost[j] += c;
        }
        for j in 0..n {
            let (lo, hi) = (self.lb[j], self.ub[j]);
            values[j] = if self.integral[j] || cost[j] > 0.0 || (cost[j] == 0.0 && lo.is_finite()) {
                lo
            } else if hi.is_finite() {
                hi
            } else if lo.is_finite() {
                lo
            } else if cost[j] == 0.0 {
                0.0
            } else {
                return Err(SolveError::Unsupported("objective is unbounded".into()));
            };
            if values[j].is_infinite() {
                return Err(SolveError::Unsupported("objective is unbounded".into()));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if r == self.obj_row {
                continue;
            }
            let act: f64 = row.terms.iter().map(|&(j, a)| a * values[j]).sum();
            if act > row.rhs + TOLERANCE * (1.0 + row.rhs.abs()) {
                return Ok(());
            }
        }
        let value: f64 = self.obj.iter().map(|&(j, c)| c * values[j]).sum();
        let better = match &self.incumbent {
            Some((best, _)) => value < *best - TOLERANCE,
            None => true,
        };
        if better {
            self.incumbent = Some((value, values));
            self.rows[self.obj_row].rhs = value - self.step;
            self.obj_dirty = true;
        }
        Ok(())
    }

    fn install_hint(&mut self, hint: &[f64]) -> Result<(), SolveError> {
        if hint.len() != self.lb.len() {
            log::debug!("hint ignored: {} values for {} variables", hint.len(), self.lb.len());
            return Ok(());
        }
        let mark = self.trail.len();
        let mut ok = true;
        for j in 0..hint.len() {
            if !self.integral[j] {
                continue;
            }
            let v = hint[j].round();
            if (hint[j] - v).abs() > TOLERANCE || !self.set_lb(j, v) || !self.set_ub(j, v) {
                ok = false;
                break;
            }
        }
        if ok && self.propagate() {
            self.leaf()?;
        } else {
            self.clear_queue();
        }
        if self.incumbent.is_none() {
            log::debug!("hint ignored: not feasible for the model");
        }
        self.undo(mark);
        Ok(())
    }

    /// Explores the subtree below the current domains. `Ok(false)` when the
    /// time limit stopped the search.
    fn dfs(&mut self, from: usize) -> Result<bool, SolveError> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.aborted = true;
        }
        if self.aborted {
            return Ok(false);
        }
        let bound = self.node_bound();
        if self.pruned(bound) {
            return Ok(true);
        }
        if self.line.as_ref().is_some_and(|line| line.dominated(&self.lb, &self.ub)) {
            return Ok(true);
        }
        let mut k = from;
        while k < self.order.len() && self.lb[self.order[k]] == self.ub[self.order[k]] {
            k += 1;
        }
        if k == self.order.len() {
            self.leaf()?;
            return Ok(true);
        }
        let j = self.order[k];
        let (lo, hi) = (self.lb[j], self.ub[j]);
        let children = if lo == 0.0 && hi == 1.0 { [(1.0, 1.0), (0.0, 0.0)] } else { [(lo, lo), (lo + 1.0, hi)] };
        for (a, b) in children {
            if self.pruned(bound) {
                break;
            }
            let mark = self.trail.len();
            let feasible = self.set_lb(j, a) && self.set_ub(j, b) && self.propagate();
            if !feasible {
                self.clear_queue();
            }
            let cont = !feasible || self.dfs(k)?;
            self.undo(mark);
            if !cont {
                self.open_bound = self.open_bound.min(bound);
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn pruned(&self, bound: f64) -> bool {
        let cut = self.cutoff();
        cut.is_finite() && bound > cut + TOLERANCE * (1.0 + cut.abs())
    }
}
