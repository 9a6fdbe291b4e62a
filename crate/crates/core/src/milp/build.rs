//! Builders for the exact formulations and the VND neighbourhood models.
//!
//! Variables are declared station by station (`v_s`, `y_1s..y_ls`, then
//! `beta_s`/`alpha_s` where present, then `x_ihs` by task and type), with
//! the worker counts `z_h` last. The embedded backend branches in
//! declaration order.

use crate::instance::{Instance, Time};
use crate::preprocess::PreprocessInfo;
use crate::solution::Solution;

use super::model::{MilpModel, ObjectiveSense, Sense, Symbol, VarId, VarKind};
use super::structure::{LineObjective, LineStructure};

/// Which row families a builder emits.
struct Spec<'a> {
    name: &'a str,
    stations: usize,
    /// Whether `x_ihs` is created (h is already known to be eligible).
    allowed: &'a dyn Fn(usize, usize) -> bool,
    /// Task cap per `(h, s)` coupling row.
    couple_cap: Vec<f64>,
    /// Capacity row times; `Some` also switches the rhs to `C v_s`.
    lifted: Option<&'a [Vec<Option<Time>>]>,
    /// Extra station gap per arc.
    gap: &'a dyn Fn(usize, usize) -> i64,
    objective: Objective,
    z1_lb: i64,
}

enum Objective {
    /// `min Σ c_h z_h`.
    Workforce,
    /// `min Σ c_h Σ_s y_hs`, `z_h` kept as defined counts.
    Staffing,
    /// `max Σ α_s` with `Σ_s y_hs = z̃_h`.
    Savings(Vec<usize>),
}

fn add(model: &mut MilpModel, sym: Symbol, lo: f64, hi: f64, kind: VarKind) -> VarId {
    model.add_var(sym.name(), lo, hi, kind).expect("builder names are unique")
}

fn row(model: &mut MilpModel, name: String, terms: Vec<(VarId, f64)>, sense: Sense, rhs: f64) {
    model.add_constraint(name, terms, sense, rhs).expect("builder rows are well formed");
}

fn build(instance: &Instance, spec: Spec<'_>) -> MilpModel {
    let n = instance.task_count();
    let l = instance.type_count();
    let m = spec.stations;
    let savings = matches!(spec.objective, Objective::Savings(_));
    let sense = if savings { ObjectiveSense::Maximize } else { ObjectiveSense::Minimize };
    let mut model = MilpModel::new(spec.name, sense);

    let mut open = Vec::with_capacity(m);
    let mut staff = vec![Vec::with_capacity(m); l];
    let mut assign = vec![vec![vec![None; m]; l]; n];
    let mut beta = Vec::new();
    let mut alpha = Vec::new();
    for s in 0..m {
        open.push(add(&mut model, Symbol::Open { station: s }, 0.0, 1.0, VarKind::Binary));
        for (h, ys) in staff.iter_mut().enumerate() {
            ys.push(add(&mut model, Symbol::Staff { worker: h, station: s }, 0.0, 1.0, VarKind::Binary));
        }
        if savings {
            beta.push(add(&mut model, Symbol::Emptied { station: s }, 0.0, 1.0, VarKind::Binary));
            alpha.push(add(
                &mut model,
                Symbol::Savings { station: s },
                f64::NEG_INFINITY,
                f64::INFINITY,
                VarKind::Continuous,
            ));
        }
        for (i, xi) in assign.iter_mut().enumerate() {
            if !(spec.allowed)(i, s) {
                continue;
            }
            for (h, xih) in xi.iter_mut().enumerate().take(instance.task_type(i) + 1) {
                xih[s] = Some(add(&mut model, Symbol::Assign { task: i, worker: h, station: s }, 0.0, 1.0, VarKind::Binary));
            }
        }
    }
    let z: Vec<VarId> = if savings {
        Vec::new()
    } else {
        (0..l).map(|h| add(&mut model, Symbol::Workforce { worker: h }, 0.0, m as f64, VarKind::Integer)).collect()
    };

    // each task exactly once
    for (i, xi) in assign.iter().enumerate() {
        let terms = xi.iter().flatten().flatten().map(|&v| (v, 1.0)).collect();
        row(&mut model, format!("assign_{}", i + 1), terms, Sense::Eq, 1.0);
    }
    // one worker per open station
    for s in 0..m {
        let mut terms: Vec<_> = (0..l).map(|h| (staff[h][s], 1.0)).collect();
        terms.push((open[s], -1.0));
        row(&mut model, format!("staff_{}", s + 1), terms, Sense::Eq, 0.0);
    }
    // tasks only where the worker type is present
    for h in 0..l {
        for s in 0..m {
            let mut terms: Vec<_> = (0..n).filter_map(|i| assign[i][h][s]).map(|v| (v, 1.0)).collect();
            if terms.is_empty() {
                continue;
            }
            terms.push((staff[h][s], -spec.couple_cap[h]));
            row(&mut model, format!("couple_{}_{}", h + 1, s + 1), terms, Sense::Le, 0.0);
        }
    }
    // worker counts
    match &spec.objective {
        Objective::Savings(workforce) => {
            for h in 0..l {
                let terms = (0..m).map(|s| (staff[h][s], 1.0)).collect();
                row(&mut model, format!("workforce_{}", h + 1), terms, Sense::Eq, workforce[h] as f64);
            }
        }
        _ => {
            for h in 0..l {
                let mut terms: Vec<_> = (0..m).map(|s| (staff[h][s], 1.0)).collect();
                terms.push((z[h], -1.0));
                row(&mut model, format!("workforce_{}", h + 1), terms, Sense::Eq, 0.0);
            }
        }
    }
    // precedence on direct arcs
    let mut precedence = Vec::new();
    for &(i, j) in instance.arcs() {
        let gap = (spec.gap)(i, j);
        let mut terms = Vec::new();
        for (task, sign) in [(i, 1.0), (j, -1.0)] {
            for xh in &assign[task] {
                for (s, v) in xh.iter().enumerate() {
                    if let Some(v) = v {
                        terms.push((*v, sign * (s + 1) as f64));
                    }
                }
            }
        }
        row(&mut model, format!("prec_{}_{}", i + 1, j + 1), terms, Sense::Le, -(gap as f64));
        precedence.push((i, j, gap));
    }
    // cycle time
    for s in 0..m {
        let mut terms = Vec::new();
        for i in 0..n {
            for h in 0..l {
                if let Some(v) = assign[i][h][s] {
                    let t = match spec.lifted {
                        Some(lifted) => lifted[i][h],
                        None => instance.time(i, h),
                    };
                    terms.push((v, t.expect("x exists only for eligible types") as f64));
                }
            }
        }
        let rhs = if spec.lifted.is_some() {
            terms.push((open[s], -(instance.cycle_time() as f64)));
            0.0
        } else {
            instance.cycle_time() as f64
        };
        if !terms.is_empty() {
            row(&mut model, format!("cycle_{}", s + 1), terms, Sense::Le, rhs);
        }
    }
    // stations open in line order
    for s in 0..m.saturating_sub(1) {
        row(&mut model, format!("order_{}", s + 1), vec![(open[s + 1], 1.0), (open[s], -1.0)], Sense::Le, 0.0);
    }
    if spec.z1_lb > 0 {
        row(&mut model, "z1_lb".into(), vec![(z[0], 1.0)], Sense::Ge, spec.z1_lb as f64);
    }
    if savings {
        let c1 = instance.cost(0) as f64;
        for s in 0..m {
            let tasks: Vec<VarId> =
                (0..n).flat_map(|i| (0..l).map(move |h| (i, h))).filter_map(|(i, h)| assign[i][h][s]).collect();
            let mut terms: Vec<_> = tasks.iter().map(|&v| (v, 1.0)).collect();
            terms.push((beta[s], 1.0));
            row(&mut model, format!("nonempty_{}", s + 1), terms, Sense::Ge, 1.0);
            let mut terms: Vec<_> = tasks.iter().map(|&v| (v, 1.0)).collect();
            terms.push((beta[s], n as f64));
            row(&mut model, format!("empty_{}", s + 1), terms, Sense::Le, n as f64);
            let mut terms = vec![(alpha[s], 1.0)];
            terms.extend((0..l).map(|h| (staff[h][s], -(instance.cost(h) as f64))));
            row(&mut model, format!("save_worker_{}", s + 1), terms, Sense::Le, 0.0);
            row(&mut model, format!("save_empty_{}", s + 1), vec![(alpha[s], 1.0), (beta[s], -c1)], Sense::Le, 0.0);
        }
    }

    let (objective_terms, line_objective) = match spec.objective {
        Objective::Workforce => {
            ((0..l).map(|h| (z[h], instance.cost(h) as f64)).collect(), LineObjective::WorkerCost)
        }
        Objective::Staffing => (
            (0..l).flat_map(|h| (0..m).map(move |s| (h, s))).map(|(h, s)| (staff[h][s], instance.cost(h) as f64)).collect(),
            LineObjective::WorkerCost,
        ),
        Objective::Savings(workforce) => {
            (alpha.iter().map(|&a| (a, 1.0)).collect(), LineObjective::EmptiedSavings { workforce })
        }
    };
    model.set_objective(sense, objective_terms);
    model.set_structure(LineStructure {
        instance: instance.clone(),
        stations: m,
        open,
        staff,
        assign,
        precedence,
        objective: line_objective,
        maximal_loads: true,
    });
    model
}

/// The base formulation over `m` stations: assignment, staffing,
/// precedence and cycle-time rows with objective `min Σ c_h z_h`.
pub fn build_msy(instance: &Instance, m: usize) -> MilpModel {
    assert!(m >= 1, "at least one station");
    let n = instance.task_count() as f64;
    build(
        instance,
        Spec {
            name: "msy",
            stations: m,
            allowed: &|_, _| true,
            couple_cap: vec![n; instance.type_count()],
            lifted: None,
            gap: &|_, _| 0,
            objective: Objective::Workforce,
            z1_lb: 0,
        },
    )
}

/// The tightened formulation over `m_ub` stations: per-type task caps,
/// lifted times against `C v_s`, station-gap precedence, window-restricted
/// variables and the type-1 worker bound.
pub fn build_mcim(instance: &Instance, info: &PreprocessInfo) -> MilpModel {
    let windows = &info.windows;
    build(
        instance,
        Spec {
            name: "mcim",
            stations: windows.m_ub,
            allowed: &|i, s| windows.contains(i, s + 1),
            couple_cap: info.tightenings.max_tasks.iter().map(|&c| c as f64).collect(),
            lifted: Some(&info.tightenings.lifted_times),
            gap: &|i, j| info.arc_bounds.get(i, j).unwrap_or(0),
            objective: Objective::Workforce,
            z1_lb: info.tightenings.z1_lb,
        },
    )
}

/// Task relocation neighbourhood: every task may stay or move to an
/// adjacent station of `base`; stations are capped at those of `base`.
pub(crate) fn build_relocation(instance: &Instance, base: &Solution) -> MilpModel {
    let m = base.station_count().max(1);
    let at = base.station_of(instance.task_count());
    let allowed = |i: usize, s: usize| match at[i] {
        Some(si) => neighbourhood(si, m).contains(&s),
        None => true,
    };
    build(
        instance,
        Spec {
            name: "milp1",
            stations: m,
            allowed: &allowed,
            couple_cap: vec![instance.task_count() as f64; instance.type_count()],
            lifted: None,
            gap: &|_, _| 0,
            objective: Objective::Staffing,
            z1_lb: 0,
        },
    )
}

/// 0-based admissible stations for a task at station `si` of an `m`-station
/// line.
pub(crate) fn neighbourhood(si: usize, m: usize) -> std::ops::RangeInclusive<usize> {
    if m == 1 {
        0..=0
    } else if si == 0 {
        0..=1
    } else if si + 1 >= m {
        m - 2..=m - 1
    } else {
        si - 1..=si + 1
    }
}

/// Reassignment neighbourhood with the worker mix of `base` fixed,
/// maximizing the cost of workers left without tasks.
pub(crate) fn build_reassignment(instance: &Instance, base: &Solution) -> MilpModel {
    let m = base.station_count().max(1);
    build(
        instance,
        Spec {
            name: "milp2",
            stations: m,
            allowed: &|_, _| true,
            couple_cap: vec![instance.task_count() as f64; instance.type_count()],
            lifted: None,
            gap: &|_, _| 0,
            objective: Objective::Savings(base.workforce(instance.type_count())),
            z1_lb: 0,
        },
    )
}

/// Variable values encoding `solution` in a model produced by this module,
/// `None` when the layout does not fit the model (too many stations, or a
/// task placed where its variable was not created). Continuous variables
/// are left at 0; the embedded backend recomputes them.
pub fn solution_values(model: &MilpModel, solution: &Solution) -> Option<Vec<f64>> {
    let mut values = vec![0.0; model.var_count()];
    let mut set = |sym: Symbol, value: f64| -> Option<()> {
        values[model.var_by_symbol(sym)?.0] = value;
        Some(())
    };
    let mut counts = Vec::new();
    for (s, st) in solution.stations.iter().enumerate() {
        set(Symbol::Open { station: s }, 1.0)?;
        set(Symbol::Staff { worker: st.worker, station: s }, 1.0)?;
        for &i in &st.tasks {
            set(Symbol::Assign { task: i, worker: st.worker, station: s }, 1.0)?;
        }
        if counts.len() <= st.worker {
            counts.resize(st.worker + 1, 0);
        }
        counts[st.worker] += 1;
    }
    for (h, &c) in counts.iter().enumerate() {
        if let Some(v) = model.var_by_symbol(Symbol::Workforce { worker: h }) {
            values[v.0] = c as f64;
        }
    }
    Some(values)
}
