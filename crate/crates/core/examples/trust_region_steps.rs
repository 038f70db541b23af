//! Acceptance ratio, acceptance and radius update in isolation.
//!
//! ```bash
//! cargo run --example trust_region_steps
//! ```

use modadapt::trust_region::{accept_candidate, compute_rho, update_radius, TrustRegionState};
use modadapt::TrustRegionConstants;

fn main() -> modadapt::Result<()> {
    let consts = TrustRegionConstants::default();
    let mut state = TrustRegionState::new(vec![0.0], 1.0, 1.0)?;

    // (plant at candidate, model at reference, model at candidate)
    let steps = [(0.0, 1.0, 0.5), (-0.2, 0.0, -0.5), (0.5, -0.2, -0.4), (-0.2, -0.2, -0.2)];
    for (i, (plant_cand, model_ref, model_cand)) in steps.into_iter().enumerate() {
        let rho = compute_rho(state.reference_value, plant_cand, model_ref, model_cand);
        let candidate = [i as f64 + 1.0];
        let accepted = accept_candidate(&mut state, &candidate, plant_cand, rho, &consts);
        let radius = update_radius(state.radius, rho, &consts);
        println!(
            "step {i}: rho = {rho:<10} accepted = {accepted:<5} radius {} -> {radius}  reference {:?}",
            state.radius, state.reference
        );
        state.radius = radius;
    }
    Ok(())
}
