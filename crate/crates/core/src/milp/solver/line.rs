//! Problem-aware propagation, bounding and dominance for models that carry
//! a [`LineStructure`].

use crate::milp::structure::{LineObjective, LineStructure};

const EPS: f64 = 1e-9;

pub(super) struct LineBounder<'a> {
    s: &'a LineStructure,
    n: usize,
    l: usize,
    m: usize,
    cycle: f64,
    costs: Vec<f64>,
    t1: Vec<f64>,
    /// Smallest time ratio `t_ih / t_i1` over tasks type `h` may execute.
    rho: Vec<f64>,
    preds: Vec<Vec<usize>>,
}

/// Per-node view of the layout decided so far.
struct Snapshot {
    /// `(h, s)` of tasks whose assignment is fixed.
    placed: Vec<Option<(usize, usize)>>,
    /// Load of each station under the fixed assignments.
    load: Vec<f64>,
    has_task: Vec<bool>,
    /// Some unplaced task may still go there.
    usable: Vec<bool>,
}

fn on(v: f64) -> bool {
    v > 0.5
}

impl<'a> LineBounder<'a> {
    pub(super) fn new(s: &'a LineStructure) -> Self {
        let inst = &s.instance;
        let (n, l) = (inst.task_count(), inst.type_count());
        let t1: Vec<f64> = (0..n).map(|i| inst.time(i, 0).unwrap_or(0) as f64).collect();
        let rho = (0..l)
            .map(|h| {
                (0..n)
                    .filter_map(|i| inst.time(i, h).map(|t| t as f64 / t1[i]))
                    .fold(f64::INFINITY, f64::min)
                    .max(1.0)
            })
            .collect::<Vec<_>>();
        let mut preds = vec![Vec::new(); n];
        for &(a, b) in inst.arcs() {
            preds[b].push(a);
        }
        Self {
            s,
            n,
            l,
            m: s.stations,
            cycle: inst.cycle_time() as f64,
            costs: inst.costs().iter().map(|&c| c as f64).collect(),
            t1,
            rho,
            preds,
        }
    }

    fn snapshot(&self, lb: &[f64], ub: &[f64]) -> Snapshot {
        let inst = &self.s.instance;
        let mut snap = Snapshot {
            placed: vec![None; self.n],
            load: vec![0.0; self.m],
            has_task: vec![false; self.m],
            usable: vec![false; self.m],
        };
        for i in 0..self.n {
            'find: for h in 0..self.l {
                for s in 0..self.m {
                    if let Some(v) = self.s.assign[i][h][s] {
                        if on(lb[v.0]) {
                            snap.placed[i] = Some((h, s));
                            snap.load[s] += inst.time(i, h).unwrap_or(0) as f64;
                            snap.has_task[s] = true;
                            break 'find;
                        }
                    }
                }
            }
            if snap.placed[i].is_none() {
                for h in 0..self.l {
                    for s in 0..self.m {
                        if let Some(v) = self.s.assign[i][h][s] {
                            if on(ub[v.0]) {
                                snap.usable[s] = true;
                            }
                        }
                    }
                }
            }
        }
        snap
    }

    /// Station windows implied by the precedence rows; pushes `x` variables
    /// that fall outside onto `fix_zero`. Returns `false` on a wipe-out.
    pub(super) fn propagate(&self, ub: &[f64], fix_zero: &mut Vec<usize>) -> bool {
        let mut lo = vec![usize::MAX; self.n];
        let mut hi = vec![0usize; self.n];
        for i in 0..self.n {
            for xh in &self.s.assign[i] {
                for (s, v) in xh.iter().enumerate() {
                    if let Some(v) = v {
                        if on(ub[v.0]) {
                            lo[i] = lo[i].min(s);
                            hi[i] = hi[i].max(s);
                        }
                    }
                }
            }
            if lo[i] == usize::MAX {
                return false;
            }
        }
        let orig = (lo.clone(), hi.clone());
        let mut changed = true;
        while changed {
            changed = false;
            for &(i, j, gap) in &self.s.precedence {
                let need = lo[i] as i64 + gap;
                if need > lo[j] as i64 {
                    lo[j] = need as usize;
                    changed = true;
                }
                let allow = hi[j] as i64 - gap;
                if allow < hi[i] as i64 {
                    if allow < 0 {
                        return false;
                    }
                    hi[i] = allow as usize;
                    changed = true;
                }
            }
            if (0..self.n).any(|i| lo[i] > hi[i]) {
                return false;
            }
        }
        for i in 0..self.n {
            if lo[i] == orig.0[i] && hi[i] == orig.1[i] {
                continue;
            }
            for xh in &self.s.assign[i] {
                for (s, v) in xh.iter().enumerate() {
                    if let Some(v) = v {
                        if (s < lo[i] || s > hi[i]) && on(ub[v.0]) {
                            fix_zero.push(v.0);
                        }
                    }
                }
            }
        }
        true
    }

    /// Bound in minimization form (negated savings for the savings model).
    pub(super) fn bound(&self, lb: &[f64], ub: &[f64]) -> f64 {
        let snap = self.snapshot(lb, ub);
        let mut demand = vec![0.0; self.l];
        let mut any_open_task = false;
        for i in 0..self.n {
            if snap.placed[i].is_none() {
                demand[self.s.instance.task_type(i)] += self.t1[i];
                any_open_task = true;
            }
        }
        let mut supply = vec![0.0; self.l];
        let mut avail = vec![0usize; self.l];
        let mut avail_total = 0usize;
        let mut committed_cost = 0.0;
        let mut fixed_count = vec![0usize; self.l];
        let savings = matches!(self.s.objective, LineObjective::EmptiedSavings { .. });

        for s in 0..self.m {
            let open_possible = on(ub[self.s.open[s].0]);
            if !open_possible {
                if snap.has_task[s] {
                    return f64::INFINITY;
                }
                continue;
            }
            let types: Vec<usize> = (0..self.l).filter(|&h| on(ub[self.s.staff[h][s].0])).collect();
            let fixed = (0..self.l).find(|&h| on(lb[self.s.staff[h][s].0]));
            let committed = if savings { snap.has_task[s] } else { snap.has_task[s] || on(lb[self.s.open[s].0]) };
            if types.is_empty() {
                if committed {
                    return f64::INFINITY;
                }
                continue;
            }
            if committed {
                committed_cost += types.iter().map(|&h| self.costs[h]).fold(f64::INFINITY, f64::min);
                if let Some(h) = fixed {
                    fixed_count[h] += 1;
                }
                if snap.usable[s] {
                    let h = fixed.unwrap_or(types[0]);
                    supply[h] += (self.cycle - snap.load[s]).max(0.0) / self.rho[h];
                }
            } else if snap.usable[s] {
                for &h in &types {
                    avail[h] += 1;
                }
                avail_total += 1;
            }
        }
        if let LineObjective::EmptiedSavings { workforce } = &self.s.objective {
            for h in 0..self.l {
                avail[h] = avail[h].min(workforce[h].saturating_sub(fixed_count[h]));
            }
        }
        let extra = if any_open_task { self.cheapest_cover(&demand, &supply, &avail, avail_total) } else { 0.0 };
        if extra.is_infinite() {
            return f64::INFINITY;
        }
        match &self.s.objective {
            LineObjective::WorkerCost => committed_cost + extra,
            LineObjective::EmptiedSavings { workforce } => {
                let total: f64 = workforce.iter().zip(&self.costs).map(|(&z, &c)| z as f64 * c).sum();
                -(total - committed_cost - extra)
            }
        }
    }

    /// Cheapest worker counts whose capacity (type-1 units) covers the
    /// demand of every qualification prefix.
    fn cheapest_cover(&self, demand: &[f64], supply: &[f64], avail: &[usize], total: usize) -> f64 {
        let per: Vec<f64> = self.rho.iter().map(|r| self.cycle / r).collect();
        let mut best = f64::INFINITY;
        self.cover_dfs(0, 0.0, 0.0, 0.0, total, demand, supply, avail, &per, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn cover_dfs(
        &self,
        h: usize,
        cost: f64,
        demand_prefix: f64,
        supply_prefix: f64,
        left: usize,
        demand: &[f64],
        supply: &[f64],
        avail: &[usize],
        per: &[f64],
        best: &mut f64,
    ) {
        if h == self.l {
            if cost < *best {
                *best = cost;
            }
            return;
        }
        let d = demand_prefix + demand[h];
        let base = supply_prefix + supply[h];
        let short = d - base;
        let need = if short <= EPS { 0 } else { ((short - EPS) / per[h]).ceil() as usize };
        let cap = avail[h].min(left);
        if need > cap {
            return;
        }
        for k in need..=cap {
            let c = cost + k as f64 * self.costs[h];
            if c >= *best - EPS {
                break;
            }
            self.cover_dfs(h + 1, c, d, base + k as f64 * per[h], left - k, demand, supply, avail, per, best);
        }
    }

    /// `true` when some closed station could still take an available task
    /// that was placed later or not yet placed.
    pub(super) fn dominated(&self, lb: &[f64], ub: &[f64]) -> bool {
        if !self.s.maximal_loads {
            return false;
        }
        let inst = &self.s.instance;
        let fixed = |v: usize| (lb[v] - ub[v]).abs() < 0.5;
        let mut closed = 0;
        'stations: for s in 0..self.m {
            if !fixed(self.s.open[s].0) || (0..self.l).any(|h| !fixed(self.s.staff[h][s].0)) {
                break;
            }
            for i in 0..self.n {
                for h in 0..self.l {
                    if let Some(v) = self.s.assign[i][h][s] {
                        if !fixed(v.0) {
                            break 'stations;
                        }
                    }
                }
            }
            closed = s + 1;
        }
        if closed == 0 {
            return false;
        }
        let snap = self.snapshot(lb, ub);
        let station = |i: usize| snap.placed[i].map(|(_, s)| s);
        for s in 0..closed {
            if !on(lb[self.s.open[s].0]) {
                continue;
            }
            let Some(h) = (0..self.l).find(|&h| on(lb[self.s.staff[h][s].0])) else { continue };
            let room = self.cycle - snap.load[s];
            for j in 0..self.n {
                if station(j).is_some_and(|sj| sj <= s) || self.s.assign[j][h].get(s).copied().flatten().is_none() {
                    continue;
                }
                let Some(t) = inst.time(j, h) else { continue };
                if t as f64 <= room + EPS && self.preds[j].iter().all(|&p| station(p).is_some_and(|sp| sp <= s)) {
                    return true;
                }
            }
        }
        false
    }
}
