//! Solves the 13-task reference line with both exact models.

use albhw::milp::{build_mcim, build_msy, extract_solution, solve};
use albhw::preprocess::{preprocess, KnownSolution};
use albhw::{evaluate, Instance};

fn main() -> anyhow::Result<()> {
    let instance = Instance::parse(include_str!("../data/golden13.albhw"))?;

    let msy = build_msy(&instance, instance.task_count());
    let r = solve(&msy, 120.0, None)?;
    println!("msy:  {} vars, {} rows, {} {:?} in {} nodes", msy.var_count(), msy.constraints().len(), r.status, r.objective, r.nodes);

    // the tightened model needs an upper bound; 400 is any feasible cost
    let info = preprocess(&instance, Some(KnownSolution { cost: 400, stations: 13 }))?;
    let mcim = build_mcim(&instance, &info);
    let r = solve(&mcim, 120.0, None)?;
    println!("mcim: {} vars, {} rows, {} {:?} in {} nodes", mcim.var_count(), mcim.constraints().len(), r.status, r.objective, r.nodes);

    let line = extract_solution(&instance, &mcim, &r)?;
    print!("{}", line.to_text(evaluate(&instance, &line)?));
    Ok(())
}
