//! Basic modifier adaptation against its trust-region variant on every
//! catalog problem. On the wrong-curvature problem the corrected model is
//! unbounded below, so the basic scheme cannot even take a step.
//!
//! ```bash
//! cargo run --release --example basic_ma_vs_ma_tr
//! ```

use modadapt::config::RunConfig;
use modadapt::drivers::Algorithm;
use modadapt::problem::catalog;
use modadapt::report::{run_all, summarize};

fn main() -> modadapt::Result<()> {
    let configs: Vec<RunConfig> = catalog()
        .iter()
        .flat_map(|e| {
            [Algorithm::BasicMa, Algorithm::TrustRegion, Algorithm::MaTr]
                .map(|a| RunConfig::new(e.id, a, e.start.to_vec()))
        })
        .collect();
    let traces = run_all(&configs).into_iter().collect::<modadapt::Result<Vec<_>>>()?;
    print!("{}", summarize(&traces).to_text());
    for t in &traces {
        for note in &t.notes {
            println!("{} / {}: {note}", t.problem, t.algorithm);
        }
    }
    Ok(())
}
