//! Prints the preprocessing data for the reference line: pairwise station
//! gaps, station windows, per-type task caps and lifted times.

use albhw::preprocess::{preprocess, KnownSolution};
use albhw::Instance;

fn main() -> anyhow::Result<()> {
    let instance = Instance::parse(include_str!("../data/golden13.albhw"))?;
    let info = preprocess(&instance, Some(KnownSolution { cost: 319, stations: 4 }))?;

    println!("station gaps ({} pairs)", info.arc_bounds.len());
    print!("{}", info.arc_bounds.to_tsv());
    println!("\nstation windows (at most {} stations)", info.windows.m_ub);
    print!("{}", info.windows.to_tsv());

    let t = &info.tightenings;
    println!("\nmax tasks per type: {:?}", t.max_tasks);
    println!("type-1 workers needed: {}", t.z1_lb);
    println!("lifted times:");
    for (i, row) in t.lifted_times.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| v.map_or("-".into(), |v| v.to_string())).collect();
        println!("  task {:2}: {}", i + 1, cells.join(" "));
    }
    Ok(())
}
