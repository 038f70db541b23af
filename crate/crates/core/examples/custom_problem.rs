//! Supplying your own plant and model.
//!
//! The plant here is a tilted quartic bowl; the model only knows it is a bowl.
//!
//! ```bash
//! cargo run --example custom_problem
//! ```

use modadapt::drivers::{run_ma_tr, MaTrSettings, StoppingCriteria};
use modadapt::{ProblemPair, ScalarOracle};

fn main() -> modadapt::Result<()> {
    let plant = ScalarOracle::from_fns(
        2,
        |u| u[0].powi(4) + 0.5 * u[1] * u[1] - u[0] + 0.3 * u[0] * u[1],
        |u| vec![4.0 * u[0].powi(3) - 1.0 + 0.3 * u[1], u[1] + 0.3 * u[0]],
    );
    let model = ScalarOracle::from_fns(2, |u| u[0] * u[0] + u[1] * u[1], |u| vec![2.0 * u[0], 2.0 * u[1]]);
    let problem = ProblemPair::new("tilted-quartic", plant, model)?.with_description("quartic plant, quadratic model");

    let trace = run_ma_tr(&problem, &[2.0, -2.0], &MaTrSettings::default(), &StoppingCriteria::default())?;
    for r in trace.records.iter().take(8) {
        println!(
            "k = {:>2}  u* = [{:>9.6}, {:>9.6}]  plant = {:>10.6}  radius = {:<6}  accepted = {}",
            r.k,
            r.reference[0],
            r.reference[1],
            r.plant_value,
            r.radius.unwrap_or(f64::NAN),
            r.accepted
        );
    }
    let last = trace.final_record().unwrap();
    println!(
        "... {} after {} iterations, {} plant values, {} plant gradients; final u* = {:?}",
        trace.termination,
        trace.iterations(),
        trace.plant_value_evaluations,
        trace.plant_gradient_evaluations,
        last.reference
    );
    Ok(())
}
