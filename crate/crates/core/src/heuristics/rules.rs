//! Task and worker priority rules.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::closures::{compute_closures, Closures};
use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskRule {
    /// Most transitive successors.
    T1,
    /// Most direct successors.
    T2,
    /// Largest type-1 time.
    T3,
    /// Largest time under the task's own qualification level.
    T4,
    /// Largest type-1 positional weight.
    T5,
    /// Largest positional weight under the task's qualification level.
    T6,
    /// Largest positional weight under the candidate worker type.
    T7,
    /// Shortest type-1 time.
    T8,
    /// Largest direct successor count per unit of positional weight.
    T9,
    /// Largest transitive successor count per unit of time.
    T10,
    /// Largest time under the candidate worker type.
    T11,
    /// Largest time among tasks whose qualification level is the candidate type.
    T12,
    /// Shortest time among tasks whose qualification level is the candidate type.
    T13,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorkerRule {
    /// Look-ahead on the cost of never using the type again.
    W1,
    /// Smallest cost per task.
    W2,
    /// Smallest cost per unit of assigned time.
    W3,
    /// Largest assigned time.
    W4,
}

impl TaskRule {
    pub const ALL: [TaskRule; 13] = [
        TaskRule::T1,
        TaskRule::T2,
        TaskRule::T3,
        TaskRule::T4,
        TaskRule::T5,
        TaskRule::T6,
        TaskRule::T7,
        TaskRule::T8,
        TaskRule::T9,
        TaskRule::T10,
        TaskRule::T11,
        TaskRule::T12,
        TaskRule::T13,
    ];

    /// 1-based rule number.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    /// `false` for the two "shortest" rules.
    pub fn maximizes(self) -> bool {
        !matches!(self, TaskRule::T8 | TaskRule::T13)
    }
}

impl WorkerRule {
    pub const ALL: [WorkerRule; 4] = [WorkerRule::W1, WorkerRule::W2, WorkerRule::W3, WorkerRule::W4];

    pub fn number(self) -> usize {
        self as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown rule `{0}`")]
pub struct UnknownRule(pub String);

impl FromStr for TaskRule {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let k: usize = s
            .trim()
            .strip_prefix(['t', 'T'])
            .map(|d| d.trim_start_matches('.'))
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| UnknownRule(s.to_string()))?;
        TaskRule::ALL.get(k.wrapping_sub(1)).copied().ok_or_else(|| UnknownRule(s.to_string()))
    }
}

impl FromStr for WorkerRule {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let k: usize = s
            .trim()
            .strip_prefix(['w', 'W'])
            .map(|d| d.trim_start_matches('.'))
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| UnknownRule(s.to_string()))?;
        WorkerRule::ALL.get(k.wrapping_sub(1)).copied().ok_or_else(|| UnknownRule(s.to_string()))
    }
}

impl fmt::Display for TaskRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.number())
    }
}

impl fmt::Display for WorkerRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.number())
    }
}

/// Instance-derived quantities the rules read.
#[derive(Debug, Clone)]
pub struct RuleContext<'a> {
    pub instance: &'a Instance,
    pub closures: Closures,
    /// `succ_time[i][h]`: Σ over transitive successors `j` of `t_{j,min(h,k_j)}`.
    succ_time: Vec<Vec<f64>>,
}

impl<'a> RuleContext<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let closures = compute_closures(instance);
        let succ_time = (0..instance.task_count())
            .map(|i| (0..instance.type_count()).map(|h| capped_sum(instance, &closures.all_succs[i], h)).collect())
            .collect();
        Self { instance, closures, succ_time }
    }

    /// Time of task `i` under type `h`, or under its own qualification
    /// level when `h` may not execute it.
    fn capped_time(&self, i: usize, h: usize) -> f64 {
        capped(self.instance, i, h)
    }
}

fn capped(instance: &Instance, i: usize, h: usize) -> f64 {
    let h = h.min(instance.task_type(i));
    instance.time(i, h).expect("types up to k_i are finite") as f64
}

fn capped_sum(instance: &Instance, tasks: &[usize], h: usize) -> f64 {
    tasks.iter().map(|&j| capped(instance, j, h)).sum()
}

/// Raw value of `rule` for task `i` under candidate type `h`; `None` when
/// the rule does not apply (t12/t13 need `k_i = h`).
pub fn score_task(i: usize, h: usize, rule: TaskRule, ctx: &RuleContext<'_>) -> Option<f64> {
    let inst = ctx.instance;
    let c = &ctx.closures;
    let k = inst.task_type(i);
    let t = |h: usize| ctx.capped_time(i, h);
    Some(match rule {
        TaskRule::T1 => c.all_succs[i].len() as f64,
        TaskRule::T2 => c.succs[i].len() as f64,
        TaskRule::T3 | TaskRule::T8 => t(0),
        TaskRule::T4 => t(k),
        TaskRule::T5 => t(0) + ctx.succ_time[i][0],
        TaskRule::T6 => t(k) + ctx.succ_time[i][k],
        TaskRule::T7 => t(h) + ctx.succ_time[i][h],
        TaskRule::T9 => c.succs[i].len() as f64 / (t(h) + ctx.succ_time[i][h]),
        TaskRule::T10 => c.all_succs[i].len() as f64 / t(h),
        TaskRule::T11 => t(h),
        TaskRule::T12 | TaskRule::T13 => {
            if k != h {
                return None;
            }
            t(k)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_names_round_trip() {
        for r in TaskRule::ALL {
            assert_eq!(r.to_string().parse::<TaskRule>().unwrap(), r);
        }
        for r in WorkerRule::ALL {
            assert_eq!(r.to_string().parse::<WorkerRule>().unwrap(), r);
        }
        assert!("t99".parse::<TaskRule>().is_err());
        assert!("t0".parse::<TaskRule>().is_err());
        assert!("w5".parse::<WorkerRule>().is_err());
        assert_eq!("t.12".parse::<TaskRule>().unwrap(), TaskRule::T12);
    }
}
