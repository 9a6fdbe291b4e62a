//! Line layouts (stations with one worker each), cost evaluation and
//! exhaustive feasibility diagnostics.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::{Cost, Instance, InstanceError, Time, Tokens};

/// One station: the worker type staffing it and the tasks it executes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Station {
    /// 0-based worker type.
    pub worker: usize,
    /// 0-based task indices, kept sorted.
    pub tasks: Vec<usize>,
}

impl Station {
    pub fn new(worker: usize, mut tasks: Vec<usize>) -> Self {
        tasks.sort_unstable();
        Self { worker, tasks }
    }
}

/// Stations in line order; the station index is the 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub stations: Vec<Station>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("station {station} references unknown task {task}")]
    UnknownTask { station: usize, task: usize },
    #[error("station {station} references unknown worker type {worker}")]
    UnknownWorker { station: usize, worker: usize },
    #[error(transparent)]
    Parse(#[from] InstanceError),
}

/// A breached constraint. Stations and tasks are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownTask { station: usize, task: usize },
    UnknownWorker { station: usize, worker: usize },
    Unassigned { task: usize },
    Duplicate { task: usize, stations: Vec<usize> },
    EmptyStation { station: usize },
    Qualification { station: usize, task: usize, worker: usize },
    CycleTime { station: usize, load: Time, cycle_time: Time },
    Precedence { from: usize, to: usize, from_station: usize, to_station: usize },
}

/// Constraint family a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Structure,
    Assignment,
    Qualification,
    CycleTime,
    Precedence,
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match self {
            Violation::UnknownTask { .. } | Violation::UnknownWorker { .. } => ViolationKind::Structure,
            Violation::Unassigned { .. } | Violation::Duplicate { .. } | Violation::EmptyStation { .. } => {
                ViolationKind::Assignment
            }
            Violation::Qualification { .. } => ViolationKind::Qualification,
            Violation::CycleTime { .. } => ViolationKind::CycleTime,
            Violation::Precedence { .. } => ViolationKind::Precedence,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownTask { station, task } => write!(f, "structure: station {station} has unknown task {task}"),
            Violation::UnknownWorker { station, worker } => {
                write!(f, "structure: station {station} has unknown worker type {worker}")
            }
            Violation::Unassigned { task } => write!(f, "assignment: task {task} is not assigned"),
            Violation::Duplicate { task, stations } => {
                write!(f, "assignment: task {task} appears in stations {stations:?}")
            }
            Violation::EmptyStation { station } => write!(f, "assignment: station {station} is empty"),
            Violation::Qualification { station, task, worker } => {
                write!(f, "qualification: worker type {worker} at station {station} cannot execute task {task}")
            }
            Violation::CycleTime { station, load, cycle_time } => {
                write!(f, "cycle time: station {station} load {load} exceeds {cycle_time}")
            }
            Violation::Precedence { from, to, from_station, to_station } => write!(
                f,
                "precedence: arc ({from}, {to}) has task {from} at station {from_station} after task {to} at station {to_station}"
            ),
        }
    }
}

impl Solution {
    pub fn new(stations: Vec<Station>) -> Self {
        Self { stations }
    }

    pub fn station_count(&self) -> usize {
        self.stations.len()
    }

    /// 0-based station of every task, `None` for unassigned tasks. Tasks
    /// listed twice keep their first station.
    pub fn station_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut at = vec![None; n];
        for (s, st) in self.stations.iter().enumerate() {
            for &i in &st.tasks {
                if i < n && at[i].is_none() {
                    at[i] = Some(s);
                }
            }
        }
        at
    }

    /// Number of stations staffed by each worker type.
    pub fn workforce(&self, types: usize) -> Vec<usize> {
        let mut z = vec![0; types];
        for st in &self.stations {
            z[st.worker] += 1;
        }
        z
    }

    /// Parses `station_count cost` followed by one `h task...` line per
    /// station. Returns the layout and the declared cost.
    pub fn parse(text: &str) -> Result<(Self, Cost), SolutionError> {
        let mut tokens = Tokens::new(text);
        let head = tokens.next_ints(2, "header `station_count cost`")?;
        let count = usize::try_from(head[0])
            .map_err(|_| InstanceError::Syntax { line: tokens.line, message: "negative station count".into() })?;
        let mut stations = Vec::with_capacity(count);
        for _ in 0..count {
            let Some((no, row)) = tokens.next_ints_any("station")? else {
                return Err(InstanceError::Syntax { line: tokens.line + 1, message: "missing station line".into() }.into());
            };
            if row.iter().any(|&v| v < 1) {
                return Err(InstanceError::Syntax { line: no, message: "indices are 1-based".into() }.into());
            }
            let worker = row[0] as usize - 1;
            stations.push(Station::new(worker, row[1..].iter().map(|&t| t as usize - 1).collect()));
        }
        if let Some((no, _)) = tokens.next_line() {
            return Err(InstanceError::Syntax { line: no, message: "unexpected trailing content".into() }.into());
        }
        Ok((Self { stations }, head[1]))
    }

    /// Writes the solution file format with the given total cost.
    pub fn to_text(&self, cost: Cost) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.stations.len(), cost);
        for st in &self.stations {
            let _ = write!(out, "{}", st.worker + 1);
            for t in &st.tasks {
                let _ = write!(out, " {}", t + 1);
            }
            out.push('\n');
        }
        out
    }
}

/// Total worker cost. Feasibility is not checked.
pub fn evaluate(instance: &Instance, solution: &Solution) -> Result<Cost, SolutionError> {
    let mut total = 0;
    for (s, st) in solution.stations.iter().enumerate() {
        if st.worker >= instance.type_count() {
            return Err(SolutionError::UnknownWorker { station: s + 1, worker: st.worker + 1 });
        }
        if let Some(&t) = st.tasks.iter().find(|&&t| t >= instance.task_count()) {
            return Err(SolutionError::UnknownTask { station: s + 1, task: t + 1 });
        }
        total += instance.cost(st.worker);
    }
    Ok(total)
}

/// Station load C̄(s) under the staffed worker type, `None` when some task
/// cannot be executed by it.
pub fn station_load(instance: &Instance, station: &Station) -> Option<Time> {
    station.tasks.iter().map(|&i| instance.time(i, station.worker)).sum()
}

/// Collects every violated constraint; an empty list means feasible.
pub fn check_feasibility(instance: &Instance, solution: &Solution) -> Vec<Violation> {
    let n = instance.task_count();
    let mut out = Vec::new();
    let mut seen: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, st) in solution.stations.iter().enumerate() {
        let worker_ok = st.worker < instance.type_count();
        if !worker_ok {
            out.push(Violation::UnknownWorker { station: s + 1, worker: st.worker + 1 });
        }
        if st.tasks.is_empty() {
            out.push(Violation::EmptyStation { station: s + 1 });
        }
        let mut load = 0;
        for &i in &st.tasks {
            if i >= n {
                out.push(Violation::UnknownTask { station: s + 1, task: i + 1 });
                continue;
            }
            seen[i].push(s + 1);
            if !worker_ok {
                continue;
            }
            match instance.time(i, st.worker) {
                Some(t) => load += t,
                None => out.push(Violation::Qualification { station: s + 1, task: i + 1, worker: st.worker + 1 }),
            }
        }
        if worker_ok && load > instance.cycle_time() {
            out.push(Violation::CycleTime { station: s + 1, load, cycle_time: instance.cycle_time() });
        }
    }
    for (i, at) in seen.iter().enumerate() {
        match at.len() {
            0 => out.push(Violation::Unassigned { task: i + 1 }),
            1 => {}
            _ => out.push(Violation::Duplicate { task: i + 1, stations: at.clone() }),
        }
    }
    for &(a, b) in instance.arcs() {
        if let (Some(&sa), Some(&sb)) = (seen[a].first(), seen[b].first()) {
            if sa > sb {
                out.push(Violation::Precedence { from: a + 1, to: b + 1, from_station: sa, to_station: sb });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_task_instance() -> Instance {
        Instance::parse("2 2 10\n100 70\n1 2\n6 -1\n5 6\n1\n1 2\n").unwrap()
    }

    #[test]
    fn evaluate_sums_worker_costs() {
        let inst = two_task_instance();
        assert_eq!(evaluate(&inst, &Solution::default()).unwrap(), 0);
        let sol = Solution::new(vec![Station::new(0, vec![0]), Station::new(0, vec![1])]);
        assert_eq!(evaluate(&inst, &sol).unwrap(), 200);
        let bad = Solution::new(vec![Station::new(5, vec![0])]);
        assert!(matches!(evaluate(&inst, &bad), Err(SolutionError::UnknownWorker { station: 1, worker: 6 })));
    }

    #[test]
    fn feasibility_collects_all_families() {
        let inst = two_task_instance();
        let sol = Solution::new(vec![Station::new(1, vec![1, 0]), Station::new(0, vec![])]);
        let v = check_feasibility(&inst, &sol);
        let kinds: Vec<_> = v.iter().map(Violation::kind).collect();
        assert!(kinds.contains(&ViolationKind::Qualification));
        assert!(kinds.contains(&ViolationKind::Assignment));
        let sol = Solution::new(vec![Station::new(0, vec![1]), Station::new(0, vec![0])]);
        assert_eq!(
            check_feasibility(&inst, &sol),
            vec![Violation::Precedence { from: 1, to: 2, from_station: 2, to_station: 1 }]
        );
        let sol = Solution::new(vec![Station::new(0, vec![0, 1])]);
        assert_eq!(check_feasibility(&inst, &sol), vec![Violation::CycleTime { station: 1, load: 11, cycle_time: 10 }]);
    }

    #[test]
    fn solution_text_round_trip() {
        let sol = Solution::new(vec![Station::new(0, vec![0]), Station::new(1, vec![1])]);
        let text = sol.to_text(170);
        assert_eq!(text, "2 170\n1 1\n2 2\n");
        assert_eq!(Solution::parse(&text).unwrap(), (sol, 170));
    }
}
