//! Generates a small suite from random precedence graphs over the full
//! parameter grid and prints a summary of each file.
//!
//! Usage: `cargo run --example generate_suite [out_dir]`

use albhw::generator::{generate_suite, random_base, GeneratorConfig, RandomBaseConfig, PARAMETER_GRID};
use albhw::Instance;

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("albhw-suite"));
    let shape = RandomBaseConfig { tasks: 15, ..Default::default() };
    let bases: Vec<_> = (0..2).map(|k| (format!("rand15_{:02}", k + 1), random_base(&shape, 40 + k))).collect();
    let files = generate_suite(&bases, &PARAMETER_GRID, &GeneratorConfig { seed: 7, ..Default::default() }, &out)?;
    for path in files {
        let inst = Instance::parse(&std::fs::read_to_string(&path)?)?;
        let per_type: Vec<usize> = (0..inst.type_count()).map(|h| inst.task_types().iter().filter(|&&k| k == h).count()).collect();
        println!("{}: costs {:?}, tasks per type {:?}", path.file_name().unwrap().to_string_lossy(), inst.costs(), per_type);
    }
    Ok(())
}
