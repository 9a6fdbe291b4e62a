//! Command-line front end. The `albhw` binary only forwards to [`run`].
//!
//! Exit codes: 0 success, 1 usage, 2 parse, 3 infeasible, 4 time limit
//! without an incumbent.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::generator::{
    generate_suite, parse_salbp_base, random_base, GeneratorConfig, RandomBaseConfig, SalbpBase, TypePolicy,
    PARAMETER_GRID,
};
use crate::heuristics::{constructive, run_portfolio, TaskRule, WorkerRule};
use crate::instance::Instance;
use crate::milp::{
    build_mcim, build_msy, export_lp, import_lp, write_solution_file, Backend, EmbeddedBackend, ExternalBackend,
    SolveStatus,
};
use crate::preprocess::{preprocess, KnownSolution};
use crate::report::{
    bench, descent_violations, instance_files, quick_lower_bound, record_for, run_method, write_csv, Method,
    RecordStatus, RunOptions, RunRecord, CSV_HEADER,
};
use crate::solution::{check_feasibility, evaluate, Solution};
use crate::vnd::{vnd_with, VndConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_TIME_LIMIT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "albhw", version, about = "Assembly line balancing with hierarchical worker assignment")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance with an exact model.
    Solve(SolveArgs),
    /// Run the constructive heuristic.
    Heuristic(HeuristicArgs),
    /// Run the rule portfolio followed by variable neighbourhood descent.
    Vnd(VndArgs),
    /// Generate instances from SALBP-1 bases.
    Generate(GenerateArgs),
    /// Write an exact model in LP format.
    ExportLp(ExportLpArgs),
    /// Check a solution file against an instance.
    Validate(ValidateArgs),
    /// Run methods over a directory of instances and write a CSV.
    Bench(BenchArgs),
    /// Solve an LP file with the embedded solver and write a solution file.
    #[command(hide = true)]
    SolveLp(SolveLpArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelKind {
    Msy,
    Mcim,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverKind {
    Embedded,
    External,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "embedded")]
    solver: SolverKind,
    /// Command template for the external solver; defaults to $ALBHW_SOLVER_CMD.
    #[arg(long)]
    solver_cmd: Option<String>,
}

impl SolverArgs {
    fn backend(&self) -> Result<Box<dyn Backend>, CliError> {
        Ok(match self.solver {
            SolverKind::Embedded => Box::new(EmbeddedBackend),
            SolverKind::External => match &self.solver_cmd {
                Some(cmd) => Box::new(ExternalBackend::new(cmd.clone())),
                None => Box::new(ExternalBackend::from_env().map_err(|e| CliError::Usage(e.to_string()))?),
            },
        })
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "mcim")]
    model: ModelKind,
    /// Seconds for the exact solve.
    #[arg(long, default_value_t = 7200.0)]
    time_limit: f64,
    /// Seconds per neighbourhood solve in the mcim warm start.
    #[arg(long, default_value_t = 15.0)]
    nb_time_limit: f64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Also write the model in LP format.
    #[arg(long)]
    lp_out: Option<PathBuf>,
    /// Solution file; defaults to `<instance stem>.sol` in the working directory.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HeuristicArgs {
    instance: PathBuf,
    #[arg(long, requires = "worker_rule", conflicts_with = "portfolio")]
    task_rule: Option<TaskRule>,
    #[arg(long, requires = "task_rule", conflicts_with = "portfolio")]
    worker_rule: Option<WorkerRule>,
    /// Best of all rule pairs (the default without rules).
    #[arg(long)]
    portfolio: bool,
    /// Report a quick lower bound and gap.
    #[arg(long)]
    with_bound: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VndArgs {
    instance: PathBuf,
    /// Seconds per neighbourhood solve.
    #[arg(long, default_value_t = 15.0)]
    nb_time_limit: f64,
    /// Neighbourhoods to cycle through (1 or 2).
    #[arg(long, default_value_t = 2)]
    k_max: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    with_bound: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Base files in the SALBP base format; the file stem names the base.
    #[arg(long = "base")]
    bases: Vec<PathBuf>,
    /// Number of random bases to add.
    #[arg(long, default_value_t = 0)]
    random: usize,
    /// Tasks per random base.
    #[arg(long, default_value_t = 20)]
    tasks: usize,
    /// Cycle time of random bases.
    #[arg(long, default_value_t = 1000)]
    cycle_time: i64,
    /// Arc probability for random bases.
    #[arg(long, default_value_t = 0.15)]
    arc_density: f64,
    /// `w1:w2` pairs, comma separated; defaults to the five benchmark pairs.
    #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
    grid: Vec<(f64, f64)>,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Type-1 worker cost.
    #[arg(long, default_value_t = 100)]
    c1: i64,
    /// `uniform` or `quota:f1,f2,...` with one fraction per level.
    #[arg(long, default_value = "uniform", value_parser = parse_policy)]
    policy: TypePolicy,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct ExportLpArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "msy")]
    model: ModelKind,
    /// Stations for msy; defaults to the task count.
    #[arg(long)]
    stations: Option<usize>,
    #[arg(long, default_value_t = 15.0)]
    nb_time_limit: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    instance: PathBuf,
    solution: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    dir: PathBuf,
    /// Comma separated: msy, mcim, ch, ch+milp1, ch+vnd.
    #[arg(long, value_delimiter = ',', default_value = "mcim,ch,ch+vnd")]
    methods: Vec<Method>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 7200.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 15.0)]
    nb_time_limit: f64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    with_bound: bool,
}

#[derive(Debug, Args)]
struct SolveLpArgs {
    model: PathBuf,
    solution: PathBuf,
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `w1:w2`, got `{s}`"))?;
    Ok((a.trim().parse().map_err(|_| format!("bad w1 `{a}`"))?, b.trim().parse().map_err(|_| format!("bad w2 `{b}`"))?))
}

fn parse_policy(s: &str) -> Result<TypePolicy, String> {
    if s.eq_ignore_ascii_case("uniform") {
        return Ok(TypePolicy::Uniform);
    }
    let list = s.strip_prefix("quota:").ok_or_else(|| format!("expected `uniform` or `quota:...`, got `{s}`"))?;
    let fractions = list.split(',').map(|f| f.trim().parse::<f64>().map_err(|_| format!("bad fraction `{f}`"))).collect::<Result<_, _>>()?;
    Ok(TypePolicy::Quota(fractions))
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Parse(String),
    Infeasible(String),
    NoIncumbent(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Other(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::NoIncumbent(_) => EXIT_TIME_LIMIT,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Infeasible(m) | CliError::NoIncumbent(m) => f.write_str(m),
            CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve(a) => cmd_solve(a),
        Command::Heuristic(a) => cmd_heuristic(a),
        Command::Vnd(a) => cmd_vnd(a),
        Command::Generate(a) => cmd_generate(a),
        Command::ExportLp(a) => cmd_export_lp(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::SolveLp(a) => cmd_solve_lp(a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Instance::parse(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn name_of(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn default_output(instance: &Path, output: Option<PathBuf>) -> PathBuf {
    output.unwrap_or_else(|| {
        let stem = instance.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "solution".into());
        PathBuf::from(format!("{stem}.sol"))
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display())).map_err(CliError::Other)
}

fn write_solution(instance: &Instance, solution: &Solution, path: &Path) -> Result<(), CliError> {
    let cost = evaluate(instance, solution).expect("solver output is well formed");
    write_file(path, &solution.to_text(cost))
}

fn print_record(record: &RunRecord) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(CSV_HEADER).context("writing record")?;
    w.write_record(record.csv_fields()).context("writing record")?;
    w.flush().context("writing record")?;
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> Result<(), CliError> {
    let instance = load_instance(&a.instance)?;
    let backend = a.solver.backend()?;
    let opts = RunOptions { time_limit: a.time_limit, nb_time_limit: a.nb_time_limit, backend: backend.as_ref(), with_bound: false };
    let method = match a.model {
        ModelKind::Msy => Method::Msy,
        ModelKind::Mcim => Method::Mcim,
    };
    if let Some(lp) = &a.lp_out {
        let model = match a.model {
            ModelKind::Msy => build_msy(&instance, instance.task_count()),
            ModelKind::Mcim => mcim_model(&instance, a.nb_time_limit)?,
        };
        write_file(lp, &export_lp(&model).context("exporting LP")?)?;
    }
    let outcome = run_method(&name_of(&a.instance), &instance, method, &opts).map_err(|e| CliError::Other(e.into()))?;
    if let Some(sol) = &outcome.solution {
        write_solution(&instance, sol, &default_output(&a.instance, a.output))?;
    }
    print_record(&outcome.record)?;
    match outcome.record.status {
        RecordStatus::Solver(SolveStatus::Infeasible) => Err(CliError::Infeasible("model is infeasible".into())),
        RecordStatus::Solver(SolveStatus::TimeLimit) => {
            Err(CliError::NoIncumbent("time limit reached without a feasible solution".into()))
        }
        _ => Ok(()),
    }
}

/// The tightened model, preprocessed from the portfolio and descent line.
fn mcim_model(instance: &Instance, nb_time_limit: f64) -> Result<crate::milp::MilpModel, CliError> {
    let (ch, _, _) = run_portfolio(instance);
    let known = vnd_with(instance, &ch, &VndConfig { k_max: 2, time_limit: nb_time_limit }, &EmbeddedBackend);
    let info = preprocess(instance, Some(KnownSolution { cost: known.cost, stations: known.solution.station_count() }))
        .map_err(|e| CliError::Other(anyhow::anyhow!("preprocessing failed: {e}")))?;
    Ok(build_mcim(instance, &info))
}

fn cmd_heuristic(a: HeuristicArgs) -> Result<(), CliError> {
    let instance = load_instance(&a.instance)?;
    let name = name_of(&a.instance);
    let start = std::time::Instant::now();
    let solution = match (a.task_rule, a.worker_rule) {
        (Some(t), Some(w)) => constructive(&instance, t, w),
        _ => {
            let (sol, t, w) = run_portfolio(&instance);
            log::info!("best rule pair {t}/{w}");
            sol
        }
    };
    let mut record = record_for(&name, &instance, Method::Ch);
    record.ub = Some(evaluate(&instance, &solution).expect("heuristic output is well formed"));
    if a.with_bound {
        record.lb = Some(quick_lower_bound(&instance) as f64);
    }
    record.seconds = start.elapsed().as_secs_f64();
    write_solution(&instance, &solution, &default_output(&a.instance, a.output))?;
    print_record(&record)
}

fn cmd_vnd(a: VndArgs) -> Result<(), CliError> {
    if !(1..=2).contains(&a.k_max) {
        return Err(CliError::Usage(format!("--k-max must be 1 or 2, got {}", a.k_max)));
    }
    let instance = load_instance(&a.instance)?;
    let backend = a.solver.backend()?;
    let opts = RunOptions { time_limit: a.nb_time_limit, nb_time_limit: a.nb_time_limit, backend: backend.as_ref(), with_bound: a.with_bound };
    let method = if a.k_max == 1 { Method::ChMilp1 } else { Method::ChVnd };
    let outcome = run_method(&name_of(&a.instance), &instance, method, &opts).map_err(|e| CliError::Other(e.into()))?;
    let sol = outcome.solution.as_ref().expect("heuristics always produce a line");
    write_solution(&instance, sol, &default_output(&a.instance, a.output))?;
    print_record(&outcome.record)
}

fn cmd_generate(a: GenerateArgs) -> Result<(), CliError> {
    let mut bases: Vec<(String, SalbpBase)> = Vec::new();
    for path in &a.bases {
        let base = parse_salbp_base(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        bases.push((stem, base));
    }
    let shape =
        RandomBaseConfig { tasks: a.tasks, cycle_time: a.cycle_time, arc_density: a.arc_density, ..Default::default() };
    if a.random > 0 && (a.tasks == 0 || a.cycle_time <= 0) {
        return Err(CliError::Usage("random bases need --tasks > 0 and --cycle-time > 0".into()));
    }
    for k in 0..a.random {
        let seed = a.seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
        bases.push((format!("rand{}_{:02}", a.tasks, k + 1), random_base(&shape, seed)));
    }
    let grid = if a.grid.is_empty() { PARAMETER_GRID.to_vec() } else { a.grid };
    let template = GeneratorConfig { levels: a.levels, base_cost: a.c1, policy: a.policy, seed: a.seed, ..Default::default() };
    for &(w1, w2) in &grid {
        GeneratorConfig { w1, w2, ..template.clone() }.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let files = generate_suite(&bases, &grid, &template, &a.out_dir).map_err(|e| match e {
        crate::generator::GeneratorError::Instance(e) => CliError::Parse(e.to_string()),
        other => CliError::Other(other.into()),
    })?;
    println!("wrote {} instance files to {}", files.len(), a.out_dir.display());
    Ok(())
}

fn cmd_export_lp(a: ExportLpArgs) -> Result<(), CliError> {
    let instance = load_instance(&a.instance)?;
    let model = match a.model {
        ModelKind::Msy => {
            let m = a.stations.unwrap_or(instance.task_count());
            if m == 0 {
                return Err(CliError::Usage("--stations must be positive".into()));
            }
            build_msy(&instance, m)
        }
        ModelKind::Mcim => mcim_model(&instance, a.nb_time_limit)?,
    };
    write_file(&a.output, &export_lp(&model).context("exporting LP")?)?;
    println!("{}: {} variables, {} constraints", a.output.display(), model.var_count(), model.constraints().len());
    Ok(())
}

fn cmd_validate(a: ValidateArgs) -> Result<(), CliError> {
    let instance = load_instance(&a.instance)?;
    let (solution, declared) =
        Solution::parse(&read(&a.solution)?).map_err(|e| CliError::Parse(format!("{}: {e}", a.solution.display())))?;
    let cost = evaluate(&instance, &solution).map_err(|e| CliError::Parse(format!("{}: {e}", a.solution.display())))?;
    let violations = check_feasibility(&instance, &solution);
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "cost {cost}");
    if cost != declared {
        let _ = writeln!(out, "note: file declares cost {declared}");
    }
    for v in &violations {
        let _ = writeln!(out, "violation: {v}");
    }
    if violations.is_empty() {
        let _ = writeln!(out, "feasible");
        Ok(())
    } else {
        let _ = writeln!(out, "infeasible ({} violations)", violations.len());
        Err(CliError::Infeasible(format!("{} violations", violations.len())))
    }
}

fn cmd_bench(a: BenchArgs) -> Result<(), CliError> {
    let files = instance_files(&a.dir).map_err(|e| CliError::Parse(format!("{}: {e}", a.dir.display())))?;
    if a.methods.is_empty() {
        return Err(CliError::Usage("no methods given".into()));
    }
    let backend = a.solver.backend()?;
    let opts = RunOptions { time_limit: a.time_limit, nb_time_limit: a.nb_time_limit, backend: backend.as_ref(), with_bound: a.with_bound };
    let report = bench(&files, &a.methods, a.jobs, &opts);
    match &a.csv {
        Some(path) => {
            let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(file, &report.records, &report.aggregates).context("writing CSV")?;
        }
        None => write_csv(std::io::stdout(), &report.records, &report.aggregates).context("writing CSV")?,
    }
    for (path, why) in &report.failures {
        eprintln!("failed: {}: {why}", path.display());
    }
    let worse = descent_violations(&report.records);
    if !worse.is_empty() {
        return Err(CliError::Other(anyhow::anyhow!("self-check: ch+vnd above ch on {}", worse.join(", "))));
    }
    Ok(())
}

fn cmd_solve_lp(a: SolveLpArgs) -> Result<(), CliError> {
    let model = import_lp(&read(&a.model)?).map_err(|e| CliError::Parse(format!("{}: {e}", a.model.display())))?;
    let result = EmbeddedBackend.solve(&model, a.time_limit, None).map_err(|e| CliError::Other(e.into()))?;
    write_file(&a.solution, &write_solution_file(&model, &result))
}
