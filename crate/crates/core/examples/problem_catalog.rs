//! Tour of the built-in plant/model pairs.
//!
//! ```bash
//! cargo run --example problem_catalog
//! ```

use modadapt::problem::catalog;

fn main() -> modadapt::Result<()> {
    for entry in catalog() {
        let p = entry.build();
        let u = entry.start;
        println!("{} ({}), n = {}", entry.id, entry.alias, entry.dim);
        println!("  {}", entry.description);
        println!("  start            {:?}", u);
        println!("  plant value      {:.6}", p.evaluate_plant(u)?);
        println!("  model value      {:.6}", p.evaluate_model(u)?);
        println!("  plant gradient   {:?}", p.plant_gradient(u)?);
        println!("  model gradient   {:?}", p.model_gradient(u)?);
        if let Some(opt) = p.known_optimum() {
            println!("  known optimum    {:?}", &opt[..]);
        }
        println!();
    }
    Ok(())
}
