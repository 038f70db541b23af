//! Measurement noise and modifier filtering.
//!
//! With noisy gradients the raw modifiers jitter; a filter gain below one
//! smooths them at the cost of the convergence guarantee.
//!
//! ```bash
//! cargo run --release --example noisy_plant
//! ```

use modadapt::config::RunConfig;
use modadapt::drivers::Algorithm;
use modadapt::report::{run_all, summarize};

fn main() -> modadapt::Result<()> {
    let configs: Vec<RunConfig> = [1.0, 0.5, 0.2]
        .into_iter()
        .map(|alpha| {
            let mut c = RunConfig::new("P1", Algorithm::MaTr, vec![0.0, 0.0]);
            c.alpha = alpha;
            c.noise_level = 1e-3;
            c.seed = 42;
            c.stopping.max_iterations = 60;
            c.stopping.tolerance = 5e-3;
            c
        })
        .collect();
    let traces = run_all(&configs).into_iter().collect::<modadapt::Result<Vec<_>>>()?;
    print!("{}", summarize(&traces).to_text());
    for (c, t) in configs.iter().zip(&traces) {
        let last = t.final_record().unwrap();
        println!("alpha = {}: final u* = {:?}, notes: {:?}", c.alpha, last.reference, t.notes);
    }
    Ok(())
}
