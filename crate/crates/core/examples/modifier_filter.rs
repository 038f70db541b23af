//! Gradient modifiers and their exponential filter.
//!
//! ```bash
//! cargo run --example modifier_filter
//! ```

use modadapt::{compute_modifiers, problem, Modifiers};

fn main() -> modadapt::Result<()> {
    let p = problem("P1")?;
    let u = [0.0, 0.0];
    let raw = compute_modifiers(&p.plant_gradient(&u)?, &p.model_gradient(&u)?)?;
    println!("raw modifier at {u:?}: {raw:?}");

    // the same raw difference fed repeatedly converges geometrically
    for alpha in [1.0, 0.5, 0.2] {
        let mut m = Modifiers::new(2, alpha)?;
        let series: Vec<String> = (0..6)
            .map(|_| m.update(&raw).map(|l| format!("{:.4}", l[0])))
            .collect::<Result<_, _>>()?;
        println!("alpha = {alpha}: {}", series.join("  "));
    }
    Ok(())
}
