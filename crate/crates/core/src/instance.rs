//! Problem instances: tasks, worker types, execution times, costs and the
//! precedence graph.
//!
//! Tasks and worker types are 0-based inside the crate. Files, variable
//! names and user-facing messages use 1-based indices.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

/// Time units (execution times, loads, cycle time).
pub type Time = i64;
/// Monetary units (worker costs, solution cost).
pub type Cost = i64;

/// Validation and parse failures for instance data. Task and type indices
/// in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("instance needs at least one task and one worker type")]
    Empty,
    #[error("cycle time must be positive, got {0}")]
    CycleTime(Time),
    #[error("worker type {ty}: cost {cost} is negative")]
    NegativeCost { ty: usize, cost: Cost },
    #[error("worker type {ty}: costs must be nonincreasing ({prev} then {cost})")]
    CostOrder { ty: usize, prev: Cost, cost: Cost },
    #[error("task {task}: task type {ty} is outside 1..={levels}")]
    TaskType { task: usize, ty: usize, levels: usize },
    #[error("task {task}, worker type {ty}: time must be infeasible exactly when the type exceeds the task type")]
    InfeasibleMarker { task: usize, ty: usize },
    #[error("task {task}, worker type {ty}: execution time {time} must be positive")]
    NonPositiveTime { task: usize, ty: usize, time: Time },
    #[error("task {task}, worker type {ty}: times must be nondecreasing in the worker type")]
    TimeOrder { task: usize, ty: usize },
    #[error("task {task} exceeds cycle time ({time} > {cycle_time})")]
    ExceedsCycleTime { task: usize, time: Time, cycle_time: Time },
    #[error("arc ({from}, {to}) references an unknown task")]
    ArcRange { from: usize, to: usize },
    #[error("arc ({0}, {0}) is a self loop")]
    SelfLoop(usize),
    #[error("precedence graph contains a cycle through task {0}")]
    Cycle(usize),
    #[error("expected {expected} values for {what}, found {found}")]
    Shape { what: &'static str, expected: usize, found: usize },
}

/// An ALBHW instance. Immutable once constructed; every constructor
/// validates the invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    cycle_time: Time,
    costs: Vec<Cost>,
    task_types: Vec<usize>,
    times: Vec<Vec<Option<Time>>>,
    arcs: Vec<(usize, usize)>,
    topo: Vec<usize>,
}

impl Instance {
    /// Builds an instance from 0-based data. `task_types[i]` is the
    /// 0-based index of the least qualified worker type allowed on task
    /// `i`; `times[i][h]` is `None` exactly for `h > task_types[i]`.
    pub fn new(
        cycle_time: Time,
        costs: Vec<Cost>,
        task_types: Vec<usize>,
        times: Vec<Vec<Option<Time>>>,
        arcs: Vec<(usize, usize)>,
    ) -> Result<Self, InstanceError> {
        let n = task_types.len();
        let l = costs.len();
        if n == 0 || l == 0 {
            return Err(InstanceError::Empty);
        }
        if cycle_time <= 0 {
            return Err(InstanceError::CycleTime(cycle_time));
        }
        for (h, &c) in costs.iter().enumerate() {
            if c < 0 {
                return Err(InstanceError::NegativeCost { ty: h + 1, cost: c });
            }
            if h > 0 && c > costs[h - 1] {
                return Err(InstanceError::CostOrder { ty: h + 1, prev: costs[h - 1], cost: c });
            }
        }
        if times.len() != n {
            return Err(InstanceError::Shape { what: "time rows", expected: n, found: times.len() });
        }
        for (i, row) in times.iter().enumerate() {
            let k = task_types[i];
            if k >= l {
                return Err(InstanceError::TaskType { task: i + 1, ty: k + 1, levels: l });
            }
            if row.len() != l {
                return Err(InstanceError::Shape { what: "time columns", expected: l, found: row.len() });
            }
            let mut prev: Option<Time> = None;
            for (h, t) in row.iter().enumerate() {
                match (*t, h <= k) {
                    (Some(t), true) => {
                        if t <= 0 {
                            return Err(InstanceError::NonPositiveTime { task: i + 1, ty: h + 1, time: t });
                        }
                        if prev.is_some_and(|p| t < p) {
                            return Err(InstanceError::TimeOrder { task: i + 1, ty: h + 1 });
                        }
                        prev = Some(t);
                    }
                    (None, false) => {}
                    _ => return Err(InstanceError::InfeasibleMarker { task: i + 1, ty: h + 1 }),
                }
            }
            let t1 = row[0].expect("type 1 qualifies for every task");
            if t1 > cycle_time {
                return Err(InstanceError::ExceedsCycleTime { task: i + 1, time: t1, cycle_time });
            }
        }
        let mut clean = Vec::with_capacity(arcs.len());
        for &(a, b) in &arcs {
            if a >= n || b >= n {
                return Err(InstanceError::ArcRange { from: a + 1, to: b + 1 });
            }
            if a == b {
                return Err(InstanceError::SelfLoop(a + 1));
            }
            if !clean.contains(&(a, b)) {
                clean.push((a, b));
            }
        }
        let topo = topological_order(n, &clean)?;
        Ok(Self { cycle_time, costs, task_types, times, arcs: clean, topo })
    }

    pub fn task_count(&self) -> usize {
        self.task_types.len()
    }

    pub fn type_count(&self) -> usize {
        self.costs.len()
    }

    pub fn cycle_time(&self) -> Time {
        self.cycle_time
    }

    pub fn costs(&self) -> &[Cost] {
        &self.costs
    }

    pub fn cost(&self, h: usize) -> Cost {
        self.costs[h]
    }

    /// 0-based least qualified worker type allowed on task `i`.
    pub fn task_type(&self, i: usize) -> usize {
        self.task_types[i]
    }

    pub fn task_types(&self) -> &[usize] {
        &self.task_types
    }

    /// `None` marks a worker type that may not execute the task.
    pub fn time(&self, i: usize, h: usize) -> Option<Time> {
        self.times[i][h]
    }

    /// Time of the most qualified (fastest) worker type.
    pub fn min_time(&self, i: usize) -> Time {
        self.times[i][0].expect("type 1 qualifies for every task")
    }

    pub fn can_execute(&self, h: usize, i: usize) -> bool {
        h <= self.task_types[i]
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// A topological order of the tasks (stable: lowest index first among
    /// ready tasks).
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Parses the line-oriented instance format; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let mut lines = Tokens::new(text);
        let head = lines.next_ints(3, "header `n l C`")?;
        let (n, l, c) = (to_count(&head, 0, lines.line)?, to_count(&head, 1, lines.line)?, head[2]);
        if n == 0 || l == 0 {
            return Err(InstanceError::Empty);
        }
        let costs = lines.next_ints(l, "worker costs")?;
        let kinds = lines.next_ints(n, "task types")?;
        let mut task_types = Vec::with_capacity(n);
        for (i, &k) in kinds.iter().enumerate() {
            if k < 1 || k as usize > l {
                return Err(InstanceError::TaskType { task: i + 1, ty: k.max(0) as usize, levels: l });
            }
            task_types.push(k as usize - 1);
        }
        let mut times = Vec::with_capacity(n);
        for _ in 0..n {
            let row = lines.next_ints(l, "execution times")?;
            times.push(row.into_iter().map(|t| if t == -1 { None } else { Some(t) }).collect());
        }
        let p = lines.next_ints(1, "arc count")?;
        let p = to_count(&p, 0, lines.line)?;
        let mut arcs = Vec::with_capacity(p);
        for _ in 0..p {
            let arc = lines.next_ints(2, "arc `i j`")?;
            if arc[0] < 1 || arc[1] < 1 {
                return Err(InstanceError::ArcRange { from: arc[0].max(0) as usize, to: arc[1].max(0) as usize });
            }
            arcs.push((arc[0] as usize - 1, arc[1] as usize - 1));
        }
        if let Some(line) = lines.next_line() {
            return Err(InstanceError::Syntax { line: line.0, message: "unexpected trailing content".into() });
        }
        Instance::new(c, costs, task_types, times, arcs)
    }

    /// Writes the instance in the format accepted by [`Instance::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.task_count(), self.type_count(), self.cycle_time);
        let _ = writeln!(out, "{}", join(self.costs.iter()));
        let _ = writeln!(out, "{}", join(self.task_types.iter().map(|k| k + 1)));
        for row in &self.times {
            let _ = writeln!(out, "{}", join(row.iter().map(|t| t.unwrap_or(-1))));
        }
        let _ = writeln!(out, "{}", self.arcs.len());
        for (a, b) in &self.arcs {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }
}

fn join<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn to_count(values: &[i64], at: usize, line: usize) -> Result<usize, InstanceError> {
    usize::try_from(values[at])
        .map_err(|_| InstanceError::Syntax { line, message: format!("expected a nonnegative count, got {}", values[at]) })
}

/// Kahn's algorithm; ready tasks are taken lowest index first.
pub(crate) fn topological_order(n: usize, arcs: &[(usize, usize)]) -> Result<Vec<usize>, InstanceError> {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in arcs {
        indeg[b] += 1;
        succ[a].push(b);
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert(j);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap_or(0);
        return Err(InstanceError::Cycle(stuck + 1));
    }
    Ok(order)
}

/// Line tokenizer shared by the text formats of this crate.
pub(crate) struct Tokens<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    pub(crate) line: usize,
}

impl<'a> Tokens<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self { lines: text.lines().enumerate(), line: 0 }
    }

    /// Next non-blank line with comments stripped, as (1-based number, content).
    pub(crate) fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (no, raw) in self.lines.by_ref() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if !content.is_empty() {
                self.line = no + 1;
                return Some((no + 1, content));
            }
        }
        None
    }

    pub(crate) fn next_ints(&mut self, count: usize, what: &str) -> Result<Vec<i64>, InstanceError> {
        let Some((no, content)) = self.next_line() else {
            return Err(InstanceError::Syntax { line: self.line + 1, message: format!("missing {what}") });
        };
        let values = content
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i64>().map_err(|_| InstanceError::Syntax {
                    line: no,
                    message: format!("`{tok}` is not an integer ({what})"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != count {
            return Err(InstanceError::Syntax {
                line: no,
                message: format!("expected {count} values for {what}, found {}", values.len()),
            });
        }
        Ok(values)
    }

    pub(crate) fn next_ints_any(&mut self, what: &str) -> Result<Option<(usize, Vec<i64>)>, InstanceError> {
        let Some((no, content)) = self.next_line() else { return Ok(None) };
        let values = content
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i64>().map_err(|_| InstanceError::Syntax {
                    line: no,
                    message: format!("`{tok}` is not an integer ({what})"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some((no, values)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "1 1 1\n5\n1\n1\n0\n";

    #[test]
    fn parses_minimal_instance() {
        let inst = Instance::parse(MINIMAL).unwrap();
        assert_eq!(inst.task_count(), 1);
        assert_eq!(inst.type_count(), 1);
        assert_eq!(inst.time(0, 0), Some(1));
    }

    #[test]
    fn rejects_task_longer_than_cycle() {
        let err = Instance::parse("1 1 10\n5\n1\n11\n0\n").unwrap_err();
        assert!(err.to_string().contains("task 1 exceeds cycle time"), "{err}");
    }

    #[test]
    fn rejects_misplaced_infeasible_marker() {
        let err = Instance::parse("1 2 10\n5 4\n2\n3 -1\n0\n").unwrap_err();
        assert_eq!(err, InstanceError::InfeasibleMarker { task: 1, ty: 2 });
        let err = Instance::parse("1 2 10\n5 4\n1\n3 4\n0\n").unwrap_err();
        assert_eq!(err, InstanceError::InfeasibleMarker { task: 1, ty: 2 });
    }

    #[test]
    fn rejects_increasing_costs_and_decreasing_times() {
        let err = Instance::parse("1 2 10\n4 5\n2\n3 4\n0\n").unwrap_err();
        assert!(matches!(err, InstanceError::CostOrder { ty: 2, .. }));
        let err = Instance::parse("1 2 10\n5 4\n2\n3 2\n0\n").unwrap_err();
        assert_eq!(err, InstanceError::TimeOrder { task: 1, ty: 2 });
    }

    #[test]
    fn rejects_cycles() {
        let err = Instance::parse("2 1 10\n5\n1 1\n3\n3\n2\n1 2\n2 1\n").unwrap_err();
        assert!(matches!(err, InstanceError::Cycle(_)));
    }

    #[test]
    fn reports_syntax_line() {
        let err = Instance::parse("# header\n1 1 x\n").unwrap_err();
        assert!(matches!(err, InstanceError::Syntax { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn text_round_trip() {
        let text = "3 2 10\n5 4\n1 2 2\n3 -1\n4 5\n2 2\n2\n1 2\n1 3\n";
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.to_text(), text);
        assert_eq!(Instance::parse(&inst.to_text()).unwrap(), inst);
    }
}
