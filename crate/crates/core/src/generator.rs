//! Instance generation from SALBP-1 base data.
//!
//! A base gives type-1 times, a cycle time and precedences. Slower worker
//! types multiply the previous type's time by `w1`, cheaper types the
//! previous cost by `w2`, both rounded half up level by level. Task types
//! are drawn from a seeded RNG.
//!
//! Base format (1-based task numbers, `#` starts a comment):
//!
//! ```text
//! n C
//! t_1
//! ...
//! t_n
//! p
//! i j      (p lines)
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::instance::{topological_order, Cost, Instance, InstanceError, Time, Tokens};

/// The five `(w1, w2)` pairs of the benchmark protocol.
pub const PARAMETER_GRID: [(f64, f64); 5] = [(1.0, 1.0), (1.10, 0.70), (1.10, 0.85), (1.20, 0.70), (1.20, 0.85)];

/// SALBP-1 data: type-1 times, cycle time and 0-based arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SalbpBase {
    pub cycle_time: Time,
    pub times: Vec<Time>,
    pub arcs: Vec<(usize, usize)>,
}

impl SalbpBase {
    pub fn task_count(&self) -> usize {
        self.times.len()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.times.len(), self.cycle_time);
        for t in &self.times {
            let _ = writeln!(out, "{t}");
        }
        let _ = writeln!(out, "{}", self.arcs.len());
        for (a, b) in &self.arcs {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Parses the base format. Times must be positive and the arcs acyclic;
/// times above the cycle time are accepted here and rejected by
/// [`generate`].
pub fn parse_salbp_base(text: &str) -> Result<SalbpBase, InstanceError> {
    let mut lines = Tokens::new(text);
    let head = lines.next_ints(2, "header `n C`")?;
    let n = usize::try_from(head[0])
        .map_err(|_| InstanceError::Syntax { line: lines.line, message: format!("bad task count {}", head[0]) })?;
    if n == 0 {
        return Err(InstanceError::Empty);
    }
    let cycle_time = head[1];
    if cycle_time <= 0 {
        return Err(InstanceError::CycleTime(cycle_time));
    }
    let mut times = Vec::with_capacity(n);
    for i in 0..n {
        let t = lines.next_ints(1, "task time")?[0];
        if t <= 0 {
            return Err(InstanceError::NonPositiveTime { task: i + 1, ty: 1, time: t });
        }
        times.push(t);
    }
    let p = lines.next_ints(1, "arc count")?[0];
    let p = usize::try_from(p)
        .map_err(|_| InstanceError::Syntax { line: lines.line, message: format!("bad arc count {p}") })?;
    let mut arcs = Vec::with_capacity(p);
    for _ in 0..p {
        let arc = lines.next_ints(2, "arc `i j`")?;
        let (a, b) = (arc[0], arc[1]);
        if a < 1 || b < 1 || a as usize > n || b as usize > n {
            return Err(InstanceError::ArcRange { from: a.max(0) as usize, to: b.max(0) as usize });
        }
        if a == b {
            return Err(InstanceError::SelfLoop(a as usize));
        }
        arcs.push((a as usize - 1, b as usize - 1));
    }
    if let Some((line, _)) = lines.next_line() {
        return Err(InstanceError::Syntax { line, message: "unexpected trailing content".into() });
    }
    topological_order(n, &arcs)?;
    Ok(SalbpBase { cycle_time, times, arcs })
}

/// How task types are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum TypePolicy {
    /// Each task independently uniform over `1..=l`.
    Uniform,
    /// Fixed fraction of tasks per level (largest-remainder rounding),
    /// randomly placed.
    Quota(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    /// Number of worker types.
    pub levels: usize,
    /// Time factor from one type to the next, at least 1.
    pub w1: f64,
    /// Cost factor from one type to the next, in `(0, 1]`.
    pub w2: f64,
    /// Type-1 cost.
    pub base_cost: Cost,
    pub policy: TypePolicy,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self { levels: 3, w1: 1.0, w2: 1.0, base_cost: 100, policy: TypePolicy::Uniform, seed: 0 }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |m: String| Err(GeneratorError::Config(m));
        if self.levels == 0 {
            return bad("at least one worker type is needed".into());
        }
        if !(self.w1 >= 1.0 && self.w1.is_finite()) {
            return bad(format!("w1 must be at least 1, got {}", self.w1));
        }
        if !(self.w2 > 0.0 && self.w2 <= 1.0) {
            return bad(format!("w2 must lie in (0, 1], got {}", self.w2));
        }
        if self.base_cost <= 0 {
            return bad(format!("base cost must be positive, got {}", self.base_cost));
        }
        if let TypePolicy::Quota(q) = &self.policy {
            if q.len() != self.levels || q.iter().any(|&f| !(f >= 0.0)) || q.iter().sum::<f64>() <= 0.0 {
                return bad(format!("quota needs {} nonnegative fractions with a positive sum", self.levels));
            }
        }
        Ok(())
    }
}

/// Nearest integer, halves rounded up. The epsilon absorbs products such
/// as `1.1 * 5` landing just below `5.5`.
pub fn round_half_up(x: f64) -> i64 {
    (x + 0.5 + 1e-9).floor() as i64
}

/// `c_1 = base`, `c_{h+1} = round(w2 * c_h)`.
pub fn scaled_costs(base: Cost, w2: f64, levels: usize) -> Vec<Cost> {
    let mut costs = Vec::with_capacity(levels);
    let mut c = base;
    for _ in 0..levels {
        costs.push(c);
        c = round_half_up(w2 * c as f64);
    }
    costs
}

/// 0-based task types under `config.policy`.
pub fn draw_task_types(n: usize, config: &GeneratorConfig) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match &config.policy {
        TypePolicy::Uniform => (0..n).map(|_| rng.gen_range(0..config.levels)).collect(),
        TypePolicy::Quota(fractions) => {
            let total: f64 = fractions.iter().sum();
            let exact: Vec<f64> = fractions.iter().map(|f| f / total * n as f64).collect();
            let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
            let mut order: Vec<usize> = (0..counts.len()).collect();
            order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
            let missing = n - counts.iter().sum::<usize>();
            for &h in order.iter().take(missing) {
                counts[h] += 1;
            }
            let mut types: Vec<usize> = counts.iter().enumerate().flat_map(|(h, &c)| std::iter::repeat_n(h, c)).collect();
            types.shuffle(&mut rng);
            types
        }
    }
}

/// Builds an instance from `base`. Times above a task's type stay
/// infeasible.
pub fn generate(base: &SalbpBase, config: &GeneratorConfig) -> Result<Instance, GeneratorError> {
    config.validate()?;
    let l = config.levels;
    let task_types = draw_task_types(base.task_count(), config);
    let times = base
        .times
        .iter()
        .zip(&task_types)
        .map(|(&t1, &k)| {
            let mut row = vec![None; l];
            let mut t = t1;
            for slot in row.iter_mut().take(k + 1) {
                *slot = Some(t);
                t = round_half_up(config.w1 * t as f64);
            }
            row
        })
        .collect();
    let costs = scaled_costs(config.base_cost, config.w2, l);
    Ok(Instance::new(base.cycle_time, costs, task_types, times, base.arcs.clone())?)
}

/// File name of one suite member.
pub fn suite_file_name(base: &str, w1: f64, w2: f64, seed: u64) -> String {
    format!("{base}__{w1:.2}_{w2:.2}__{seed}.albhw")
}

/// `(w1, w2, seed)` tags of a suite file name, if it follows
/// [`suite_file_name`].
pub fn parse_suite_tags(file_name: &str) -> Option<(f64, f64, u64)> {
    let stem = file_name.strip_suffix(".albhw").unwrap_or(file_name);
    let mut parts = stem.rsplitn(3, "__");
    let seed = parts.next()?.parse().ok()?;
    let (w1, w2) = parts.next()?.split_once('_')?;
    parts.next()?;
    Some((w1.parse().ok()?, w2.parse().ok()?, seed))
}

/// Writes one instance per (base, grid pair) into `out_dir`, using
/// `template` for everything but `w1` and `w2`. Every member of a base
/// shares the same task types. Returns the paths in (base, grid) order.
pub fn generate_suite(
    bases: &[(String, SalbpBase)],
    grid: &[(f64, f64)],
    template: &GeneratorConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, GeneratorError> {
    let jobs: Vec<(&str, &SalbpBase, f64, f64)> = bases
        .iter()
        .flat_map(|(name, base)| grid.iter().map(move |&(w1, w2)| (name.as_str(), base, w1, w2)))
        .collect();
    if jobs.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(out_dir).map_err(|source| GeneratorError::Io { path: out_dir.to_path_buf(), source })?;
    jobs.par_iter()
        .map(|&(name, base, w1, w2)| {
            let config = GeneratorConfig { w1, w2, ..template.clone() };
            let instance = generate(base, &config)?;
            let path = out_dir.join(suite_file_name(name, w1, w2, template.seed));
            std::fs::write(&path, instance.to_text()).map_err(|source| GeneratorError::Io { path: path.clone(), source })?;
            Ok(path)
        })
        .collect()
}

/// Shape of a random SALBP-1 base.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomBaseConfig {
    pub tasks: usize,
    pub cycle_time: Time,
    /// Inclusive range of type-1 times.
    pub min_time: Time,
    pub max_time: Time,
    /// Probability of a direct arc `i -> j` for each `i < j`.
    pub arc_density: f64,
}

impl Default for RandomBaseConfig {
    fn default() -> Self {
        Self { tasks: 20, cycle_time: 1000, min_time: 10, max_time: 400, arc_density: 0.15 }
    }
}

/// Random base with arcs only from lower to higher task numbers, so the
/// graph is acyclic by construction.
pub fn random_base(config: &RandomBaseConfig, seed: u64) -> SalbpBase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = config.max_time.min(config.cycle_time).max(1);
    let lo = config.min_time.clamp(1, hi);
    let times = (0..config.tasks).map(|_| rng.gen_range(lo..=hi)).collect();
    let mut arcs = Vec::new();
    for j in 1..config.tasks {
        for i in 0..j {
            if rng.gen_bool(config.arc_density.clamp(0.0, 1.0)) {
                arcs.push((i, j));
            }
        }
    }
    SalbpBase { cycle_time: config.cycle_time, times, arcs }
}
