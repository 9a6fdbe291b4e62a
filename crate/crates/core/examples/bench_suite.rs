//! Benchmarks the heuristic and exact methods on a generated suite and
//! prints the CSV report.

use albhw::generator::{generate_suite, random_base, GeneratorConfig, RandomBaseConfig, PARAMETER_GRID};
use albhw::milp::EmbeddedBackend;
use albhw::report::{bench, write_csv, Method, RunOptions};

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let shape = RandomBaseConfig { tasks: 12, ..Default::default() };
    let bases: Vec<_> = (0..2).map(|k| (format!("rand12_{:02}", k + 1), random_base(&shape, 90 + k))).collect();
    let files = generate_suite(&bases, &PARAMETER_GRID, &GeneratorConfig { seed: 3, ..Default::default() }, dir.path())?;

    let opts = RunOptions { time_limit: 60.0, nb_time_limit: 5.0, backend: &EmbeddedBackend, with_bound: true };
    let report = bench(&files, &Method::ALL, 2, &opts);
    write_csv(std::io::stdout(), &report.records, &report.aggregates)?;
    for (path, why) in &report.failures {
        eprintln!("failed: {}: {why}", path.display());
    }
    Ok(())
}
