//! Run records, method pipelines, CSV output and batch benchmarking.
//!
//! CSV data rows have the columns
//! `instance,n,l,w1,w2,method,status,UB,LB,gap_pct,impr_pct,nodes,seconds`.
//! A blank line separates them from the aggregate section, whose header is
//! `group,n,w1,w2,method,instances,opt,feas,gap_pct,impr_pct,nodes,seconds`.
//! Empty cells mean "not available".

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::generator::parse_suite_tags;
use crate::heuristics::run_portfolio;
use crate::instance::{Cost, Instance};
use crate::milp::{build_mcim, build_msy, extract_solution, solution_values, Backend, SolveError, SolveStatus};
use crate::preprocess::{compute_z1_lb, preprocess, KnownSolution};
use crate::solution::{check_feasibility, evaluate, Solution};
use crate::vnd::{vnd_with, VndConfig};

pub const CSV_HEADER: [&str; 13] =
    ["instance", "n", "l", "w1", "w2", "method", "status", "UB", "LB", "gap_pct", "impr_pct", "nodes", "seconds"];
pub const AGGREGATE_HEADER: [&str; 12] =
    ["group", "n", "w1", "w2", "method", "instances", "opt", "feas", "gap_pct", "impr_pct", "nodes", "seconds"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Msy,
    Mcim,
    Ch,
    ChMilp1,
    ChVnd,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Msy, Method::Mcim, Method::Ch, Method::ChMilp1, Method::ChVnd];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Msy => "msy",
            Method::Mcim => "mcim",
            Method::Ch => "ch",
            Method::ChMilp1 => "ch+milp1",
            Method::ChVnd => "ch+vnd",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Method::Msy | Method::Mcim)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown method `{s}` (expected msy, mcim, ch, ch+milp1 or ch+vnd)"))
    }
}

/// Solver status, or `HEURISTIC` for the constructive and descent methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordStatus {
    Solver(SolveStatus),
    Heuristic,
}

impl RecordStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordStatus::Solver(s) => s.as_str(),
            RecordStatus::Heuristic => "HEURISTIC",
        }
    }
}

impl fmt::Display for RecordStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One (instance, method) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub n: usize,
    pub l: usize,
    pub w1: Option<f64>,
    pub w2: Option<f64>,
    pub method: Method,
    pub status: RecordStatus,
    pub ub: Option<Cost>,
    pub lb: Option<f64>,
    /// Descent improvement over the constructive heuristic.
    pub impr_pct: Option<f64>,
    pub nodes: u64,
    pub seconds: f64,
}

impl RunRecord {
    /// `100 (UB - LB) / UB`; exactly 0 for proven optima.
    pub fn gap_pct(&self) -> Option<f64> {
        if self.status == RecordStatus::Solver(SolveStatus::Optimal) {
            return Some(0.0);
        }
        gap_pct(self.ub?, self.lb?)
    }

    pub fn csv_fields(&self) -> [String; 13] {
        [
            self.instance.clone(),
            self.n.to_string(),
            self.l.to_string(),
            opt(self.w1.map(|w| format!("{w:.2}"))),
            opt(self.w2.map(|w| format!("{w:.2}"))),
            self.method.to_string(),
            self.status.to_string(),
            opt(self.ub.map(|u| u.to_string())),
            opt(self.lb.map(fmt_num)),
            opt(self.gap_pct().map(|g| format!("{g:.4}"))),
            opt(self.impr_pct.map(|g| format!("{g:.4}"))),
            self.nodes.to_string(),
            format!("{:.3}", self.seconds),
        ]
    }
}

fn opt(v: Option<String>) -> String {
    v.unwrap_or_default()
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.4}")
    }
}

/// `100 (ub - lb) / ub`, never negative; `None` when `ub` is not positive
/// or `lb` is not finite.
pub fn gap_pct(ub: Cost, lb: f64) -> Option<f64> {
    if ub <= 0 || !lb.is_finite() {
        return None;
    }
    Some((100.0 * (ub as f64 - lb) / ub as f64).max(0.0))
}

/// `100 (after - before) / after`; negative when the descent improved.
pub fn impr_pct(before: Cost, after: Cost) -> f64 {
    if after == 0 {
        return 0.0;
    }
    100.0 * (after - before) as f64 / after as f64
}

/// Cheap lower bound for heuristic records: every task costs at least
/// `c_h t_ih / C` under its cheapest type, and type-1 stations forced by
/// tasks only type 1 can do cost `c_1` each.
pub fn quick_lower_bound(instance: &Instance) -> Cost {
    let c = instance.cycle_time() as f64;
    let spread: f64 = (0..instance.task_count())
        .map(|i| {
            (0..=instance.task_type(i))
                .map(|h| instance.cost(h) as f64 * instance.time(i, h).expect("eligible") as f64 / c)
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    let forced = compute_z1_lb(instance) as Cost * instance.cost(0);
    ((spread - 1e-9).ceil() as Cost).max(forced)
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("solver returned an unusable solution: {0}")]
    Extract(String),
    #[error("preprocessing failed: {0}")]
    Preprocess(String),
}

/// Knobs shared by every method.
#[derive(Clone, Copy)]
pub struct RunOptions<'a> {
    /// Seconds for exact solves.
    pub time_limit: f64,
    /// Seconds per VND neighbourhood solve.
    pub nb_time_limit: f64,
    pub backend: &'a dyn Backend,
    /// Attach [`quick_lower_bound`] to heuristic records.
    pub with_bound: bool,
}

/// Record skeleton for `instance` named `name`; `w1`/`w2` come from suite
/// file-name tags when present.
pub fn record_for(name: &str, instance: &Instance, method: Method) -> RunRecord {
    let tags = parse_suite_tags(name);
    RunRecord {
        instance: name.to_string(),
        n: instance.task_count(),
        l: instance.type_count(),
        w1: tags.map(|t| t.0),
        w2: tags.map(|t| t.1),
        method,
        status: RecordStatus::Heuristic,
        ub: None,
        lb: None,
        impr_pct: None,
        nodes: 0,
        seconds: 0.0,
    }
}

/// Outcome of one method: the record and the best line found, if any.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub solution: Option<Solution>,
}

/// Portfolio heuristic followed by descent limited to `k_max`
/// neighbourhoods (0 for the plain portfolio).
fn heuristic_chain(instance: &Instance, k_max: usize, opts: &RunOptions<'_>) -> (Solution, Cost, Cost, u64) {
    let (ch, _, _) = run_portfolio(instance);
    let ch_cost = evaluate(instance, &ch).expect("heuristic output is well formed");
    if k_max == 0 {
        return (ch, ch_cost, ch_cost, 0);
    }
    let report = vnd_with(instance, &ch, &VndConfig { k_max, time_limit: opts.nb_time_limit }, opts.backend);
    (report.solution, ch_cost, report.cost, report.nodes)
}

/// Runs one method on one instance.
pub fn run_method(name: &str, instance: &Instance, method: Method, opts: &RunOptions<'_>) -> Result<RunOutcome, RunError> {
    let start = Instant::now();
    let mut record = record_for(name, instance, method);
    let solution = match method {
        Method::Ch | Method::ChMilp1 | Method::ChVnd => {
            let k_max = match method {
                Method::Ch => 0,
                Method::ChMilp1 => 1,
                _ => 2,
            };
            let (sol, ch_cost, cost, nodes) = heuristic_chain(instance, k_max, opts);
            record.ub = Some(cost);
            record.nodes = nodes;
            if k_max > 0 {
                record.impr_pct = Some(impr_pct(ch_cost, cost));
            }
            if opts.with_bound {
                record.lb = Some(quick_lower_bound(instance) as f64);
            }
            Some(sol)
        }
        Method::Msy => {
            let model = build_msy(instance, instance.task_count());
            let result = opts.backend.solve(&model, opts.time_limit, None)?;
            record.status = RecordStatus::Solver(result.status);
            record.nodes = result.nodes;
            record.lb = Some(result.bound).filter(|b| b.is_finite());
            let sol = if result.has_incumbent() {
                Some(extract_solution(instance, &model, &result).map_err(|e| RunError::Extract(e.to_string()))?)
            } else {
                None
            };
            record.ub = sol.as_ref().map(|s| evaluate(instance, s).expect("extracted layout is well formed"));
            sol
        }
        Method::Mcim => {
            let (known, _, known_cost, _) = heuristic_chain(instance, 2, opts);
            let info = preprocess(instance, Some(KnownSolution { cost: known_cost, stations: known.station_count() }))
                .map_err(|e| RunError::Preprocess(e.to_string()))?;
            let model = build_mcim(instance, &info);
            let hint = solution_values(&model, &known);
            let result = opts.backend.solve(&model, opts.time_limit, hint.as_deref())?;
            record.nodes = result.nodes;
            record.lb = Some(result.bound).filter(|b| b.is_finite());
            let found = if result.has_incumbent() {
                Some(extract_solution(instance, &model, &result).map_err(|e| RunError::Extract(e.to_string()))?)
            } else {
                None
            };
            let found_cost = found.as_ref().map(|s| evaluate(instance, s).expect("extracted layout is well formed"));
            // a backend that ignores the hint may stop without beating it
            let (status, sol, cost) = match (result.status, found_cost) {
                (SolveStatus::Optimal, Some(c)) => (SolveStatus::Optimal, found, c),
                (SolveStatus::Infeasible, _) => (SolveStatus::Optimal, Some(known), known_cost),
                (_, Some(c)) if c <= known_cost => (SolveStatus::Feasible, found, c),
                _ => (SolveStatus::Feasible, Some(known), known_cost),
            };
            if result.status == SolveStatus::Infeasible {
                // nothing cheaper than the known line exists
                record.lb = Some(known_cost as f64);
            }
            record.status = RecordStatus::Solver(status);
            record.ub = Some(cost);
            sol
        }
    };
    record.seconds = start.elapsed().as_secs_f64();
    Ok(RunOutcome { record, solution })
}

/// Per-group summary over the records of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub n: Option<usize>,
    pub w1: Option<f64>,
    pub w2: Option<f64>,
    pub method: Method,
    pub instances: usize,
    pub opt: usize,
    pub feas: usize,
    pub gap_pct: Option<f64>,
    pub impr_pct: Option<f64>,
    pub nodes: f64,
    pub seconds: f64,
}

impl Aggregate {
    pub fn csv_fields(&self) -> [String; 12] {
        let group = match (self.n, self.w1, self.w2) {
            (Some(n), Some(a), Some(b)) => format!("n{n}_{a:.2}_{b:.2}"),
            _ => "all".to_string(),
        };
        [
            group,
            opt(self.n.map(|n| n.to_string())),
            opt(self.w1.map(|w| format!("{w:.2}"))),
            opt(self.w2.map(|w| format!("{w:.2}"))),
            self.method.to_string(),
            self.instances.to_string(),
            self.opt.to_string(),
            self.feas.to_string(),
            opt(self.gap_pct.map(|g| format!("{g:.4}"))),
            opt(self.impr_pct.map(|g| format!("{g:.4}"))),
            format!("{:.1}", self.nodes),
            format!("{:.3}", self.seconds),
        ]
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Groups by `(n, w1, w2)` when every record carries the tags, else a
/// single group per method. `#feas` counts records with an incumbent.
pub fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let tagged = records.iter().all(|r| r.w1.is_some() && r.w2.is_some());
    type Key = (Option<usize>, Option<i64>, Option<i64>, Method);
    let mut groups: BTreeMap<Key, Vec<&RunRecord>> = BTreeMap::new();
    let milli = |w: Option<f64>| w.map(|w| (w * 1000.0).round() as i64);
    for r in records {
        let key = if tagged { (Some(r.n), milli(r.w1), milli(r.w2), r.method) } else { (None, None, None, r.method) };
        groups.entry(key).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((n, w1, w2, method), rs)| Aggregate {
            n,
            w1: w1.map(|w| w as f64 / 1000.0),
            w2: w2.map(|w| w as f64 / 1000.0),
            method,
            instances: rs.len(),
            opt: rs.iter().filter(|r| r.status == RecordStatus::Solver(SolveStatus::Optimal)).count(),
            feas: rs.iter().filter(|r| r.ub.is_some()).count(),
            gap_pct: mean(rs.iter().filter_map(|r| r.gap_pct())),
            impr_pct: mean(rs.iter().filter_map(|r| r.impr_pct)),
            nodes: mean(rs.iter().map(|r| r.nodes as f64)).unwrap_or(0.0),
            seconds: mean(rs.iter().map(|r| r.seconds)).unwrap_or(0.0),
        })
        .collect()
}

/// Instances where `ch+vnd` ended above `ch`; empty when the descent never
/// made a line worse.
pub fn descent_violations(records: &[RunRecord]) -> Vec<String> {
    let mut ch: BTreeMap<&str, Cost> = BTreeMap::new();
    for r in records.iter().filter(|r| r.method == Method::Ch) {
        if let Some(u) = r.ub {
            ch.insert(&r.instance, u);
        }
    }
    records
        .iter()
        .filter(|r| r.method == Method::ChVnd)
        .filter(|r| matches!((r.ub, ch.get(r.instance.as_str())), (Some(v), Some(&c)) if v > c))
        .map(|r| r.instance.clone())
        .collect()
}

/// Writes data rows, a blank line and the aggregate section.
pub fn write_csv(out: impl Write, records: &[RunRecord], aggregates: &[Aggregate]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    let mut out = w.into_inner().map_err(|e| csv::Error::from(std::io::Error::other(e.to_string())))?;
    out.write_all(b"\n")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER)?;
    for a in aggregates {
        w.write_record(a.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Sorted `.albhw` files of a directory.
pub fn instance_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "albhw"))
        .collect();
    files.sort();
    Ok(files)
}

/// Batch results: rows sorted by (instance, method), then aggregates.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
    /// Files that failed to load or solve, with the reason.
    pub failures: Vec<(PathBuf, String)>,
}

/// Runs every method on every instance file, `jobs` at a time. Failures
/// are logged and reported, the run continues.
pub fn bench(files: &[PathBuf], methods: &[Method], jobs: usize, opts: &RunOptions<'_>) -> BenchReport {
    let work: Vec<(&PathBuf, Method)> = files.iter().flat_map(|f| methods.iter().map(move |&m| (f, m))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    let results: Vec<Result<RunRecord, (PathBuf, String)>> = pool.install(|| {
        work.par_iter()
            .map(|&(path, method)| {
                let fail = |e: String| {
                    log::error!("{}: {method}: {e}", path.display());
                    (path.clone(), format!("{method}: {e}"))
                };
                let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
                let instance = Instance::parse(&text).map_err(|e| fail(e.to_string()))?;
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                let outcome = run_method(&name, &instance, method, opts).map_err(|e| fail(e.to_string()))?;
                if let Some(sol) = &outcome.solution {
                    let violations = check_feasibility(&instance, sol);
                    if !violations.is_empty() {
                        return Err(fail(format!("infeasible output: {}", violations[0])));
                    }
                }
                log::info!("{name} {method}: {} UB={:?}", outcome.record.status, outcome.record.ub);
                Ok(outcome.record)
            })
            .collect()
    });
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(f) => failures.push(f),
        }
    }
    records.sort_by(|a, b| a.instance.cmp(&b.instance).then(a.method.cmp(&b.method)));
    let aggregates = aggregate(&records);
    BenchReport { records, aggregates, failures }
}
