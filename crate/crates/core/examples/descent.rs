//! Improves heuristic lines with the two-neighbourhood descent.

use albhw::heuristics::{constructive, TaskRule, WorkerRule};
use albhw::milp::EmbeddedBackend;
use albhw::vnd::{vnd_with, VndConfig};
use albhw::Instance;

fn main() -> anyhow::Result<()> {
    let instance = Instance::parse(include_str!("../data/golden13.albhw"))?;
    let config = VndConfig { k_max: 2, time_limit: 5.0 };
    for t in [TaskRule::T1, TaskRule::T4, TaskRule::T8] {
        let start = constructive(&instance, t, WorkerRule::W2);
        let r = vnd_with(&instance, &start, &config, &EmbeddedBackend);
        println!(
            "{t}/w2: {} -> {} ({} solves, {} improvements, {} nodes, {:.2}s)",
            r.initial_cost, r.cost, r.calls, r.improvements, r.nodes, r.seconds
        );
    }
    Ok(())
}
