//! Runs every task/worker rule pair of the constructive heuristic on the
//! reference line and reports the portfolio winner.

use albhw::heuristics::{constructive, run_portfolio, TaskRule, WorkerRule};
use albhw::{evaluate, Instance};

fn main() -> anyhow::Result<()> {
    let instance = Instance::parse(include_str!("../data/golden13.albhw"))?;
    print!("     ");
    for w in WorkerRule::ALL {
        print!("{:>6}", w.to_string());
    }
    println!();
    for t in TaskRule::ALL {
        print!("{:>5}", t.to_string());
        for w in WorkerRule::ALL {
            let line = constructive(&instance, t, w);
            print!("{:>6}", evaluate(&instance, &line)?);
        }
        println!();
    }
    let (best, t, w) = run_portfolio(&instance);
    println!("portfolio: {t}/{w} at cost {}", evaluate(&instance, &best)?);
    Ok(())
}
