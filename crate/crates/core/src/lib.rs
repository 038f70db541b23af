//! Modifier adaptation and its trust-region globalization for plant/model
//! optimization experiments.
//!
//! A simulated plant cost is minimized using only a mismatched model plus
//! plant value and gradient measurements. Three schemes are provided:
//!
//! * [`drivers::run_basic_ma`]: basic modifier adaptation, which re-solves the
//!   gradient-corrected model over the whole input space each iteration.
//! * [`drivers::run_trust_region`]: a basic trust-region method whose model
//!   matches the plant to first order at the reference point.
//! * [`drivers::run_ma_tr`]: modifier adaptation supplemented with a trust
//!   region, a reference point and a Cauchy-point safeguard, which converges
//!   to a first-order critical point of the plant from any start.
//!
//! Every run produces a [`drivers::RunTrace`] that can be exported with
//! [`report::export_trace`] and compared with [`report::summarize`].

pub mod config;
pub mod correction;
mod descent;
pub mod drivers;
pub mod error;
mod linalg;
pub mod problem;
pub mod report;
pub mod subproblem;
pub mod trust_region;

pub use correction::{compute_modifiers, filter_modifiers, CorrectedModel, ModelForm, Modifiers};
pub use error::{Error, Result};
pub use problem::{problem, InputVector, ProblemPair, ScalarOracle};
pub use trust_region::{Rho, TrustRegionConstants};
