//! Checks analytic gradients against central differences and samples the
//! curvature and boundedness of each catalog problem.
//!
//! ```bash
//! cargo run --example gradient_check
//! ```

use modadapt::problem::{catalog, finite_difference_gradient, probe_assumptions, SearchBox};

fn main() -> modadapt::Result<()> {
    for entry in catalog() {
        let p = entry.build();
        let exact = p.plant_gradient(entry.start)?;
        let fd = finite_difference_gradient(p.plant(), entry.start, 1e-6)?;
        let gap = exact.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("{}: analytic {exact:?}\n    central  {fd:?}\n    max gap  {gap:.2e}", entry.id);

        let region = SearchBox::cube(p.dim(), -5.0, 5.0)?;
        let report = probe_assumptions(&p, &region, 200)?;
        println!(
            "    on [-5, 5]^{}: plant |H| <= {:.1}, model |H| <= {:.1}, min plant {:.3}, worst gradient gap {:.1e}\n",
            p.dim(),
            report.plant_hessian_bound,
            report.model_hessian_bound,
            report.min_plant_value,
            report.max_gradient_discrepancy,
        );
    }
    Ok(())
}
