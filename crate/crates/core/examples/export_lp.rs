//! Writes the station-indexed model of the reference line in LP format,
//! reads it back and checks that nothing was lost.
//!
//! Usage: `cargo run --example export_lp [out.lp]`

use albhw::milp::{build_msy, export_lp, import_lp};
use albhw::Instance;

fn main() -> anyhow::Result<()> {
    let instance = Instance::parse(include_str!("../data/golden13.albhw"))?;
    let model = build_msy(&instance, 4);
    let text = export_lp(&model)?;
    assert!(import_lp(&text)?.same_program(&model));
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, &text)?;
            println!("{path}: {} variables, {} constraints", model.var_count(), model.constraints().len());
        }
        None => print!("{text}"),
    }
    Ok(())
}
