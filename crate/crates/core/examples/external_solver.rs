//! Solves the reference line through the external-solver adapter.
//!
//! The command template comes from `ALBHW_SOLVER_CMD`. Without it the
//! example uses the `albhw solve-lp` subcommand, which reads the LP file
//! and answers in the solution-file format like an external solver would
//! (build it first with `cargo build --bin albhw`).

use albhw::milp::{build_mcim, extract_solution, Backend, ExternalBackend};
use albhw::preprocess::{preprocess, KnownSolution};
use albhw::{evaluate, Instance};

fn main() -> anyhow::Result<()> {
    let backend = match ExternalBackend::from_env() {
        Ok(b) => b,
        Err(_) => {
            // target/<profile>/examples/external_solver -> target/<profile>/albhw
            let exe = std::env::current_exe()?;
            let bin = exe.parent().and_then(|p| p.parent()).map(|p| p.join("albhw")).filter(|p| p.exists());
            let Some(bin) = bin else {
                anyhow::bail!("set ALBHW_SOLVER_CMD or build the albhw binary first");
            };
            ExternalBackend::new(format!("'{}' solve-lp {{model}} {{solution}} --time-limit {{time_limit}}", bin.display()))
        }
    };
    println!("command: {}", backend.command);

    let instance = Instance::parse(include_str!("../data/golden13.albhw"))?;
    let info = preprocess(&instance, Some(KnownSolution { cost: 330, stations: 5 }))?;
    let model = build_mcim(&instance, &info);
    let r = backend.solve(&model, 120.0, None)?;
    println!("{} objective {:?} bound {} nodes {} in {:.2}s", r.status, r.objective, r.bound, r.nodes, r.seconds);
    if r.has_incumbent() {
        let line = extract_solution(&instance, &model, &r)?;
        print!("{}", line.to_text(evaluate(&instance, &line)?));
    }
    Ok(())
}
