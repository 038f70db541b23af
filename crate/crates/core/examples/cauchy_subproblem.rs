//! One trust-region subproblem on P1: Cauchy point, descent candidate and
//! the sufficient-decrease certificate.
//!
//! ```bash
//! cargo run --example cauchy_subproblem
//! ```

use modadapt::subproblem::{
    check_sufficient_decrease, estimate_beta, solve_subproblem, SubproblemOptions, SufficientDecreaseParams,
};
use modadapt::{problem, CorrectedModel};

fn main() -> modadapt::Result<()> {
    let p = problem("P1")?;
    let model = CorrectedModel::unshifted(p.model(), vec![-2.0, -2.0], vec![0.0, 0.0])?;
    let g = model.gradient(&[0.0, 0.0])?;
    let gnorm = g.iter().map(|c| c * c).sum::<f64>().sqrt();

    for radius in [0.5, 1.0, 10.0] {
        let r = solve_subproblem(&model, radius, &SubproblemOptions::default())?;
        let beta = estimate_beta(&model, radius)?;
        let params = SufficientDecreaseParams::new(0.1, beta)?;
        let ok = check_sufficient_decrease(0.0, -r.model_decrease, gnorm, radius, &params);
        println!("radius {radius}");
        println!("  cauchy point {:?} (t = {:.6})", r.cauchy_point, r.cauchy_step);
        println!("  candidate    {:?} after {} evaluations", r.candidate, r.descent_evaluations);
        println!("  decrease {:.6}, beta {beta:.4}, sufficient: {ok}", r.model_decrease);
    }
    Ok(())
}
