//! Gradient checks and advisory probes of the smoothness assumptions.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, sub};

use super::{ProblemPair, ScalarOracle};

const HESSIAN_STEP: f64 = 1e-4;
const GRADIENT_CHECK_STEP: f64 = 1e-5;
const PROBE_SEED: u64 = 0x5eed;

/// Central-difference gradient estimate.
///
/// The divisor is the distance actually spanned by the two perturbed points
/// after rounding, which removes the representation error of `u ± step`.
pub fn finite_difference_gradient(oracle: &ScalarOracle, u: &[f64], step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("step", "must be positive and finite"));
    }
    let mut probe = u.to_vec();
    let mut grad = Vec::with_capacity(u.len());
    for i in 0..u.len() {
        let up = u[i] + step;
        let down = u[i] - step;
        probe[i] = up;
        let f_up = oracle.value(&probe)?;
        probe[i] = down;
        let f_down = oracle.value(&probe)?;
        probe[i] = u[i];
        grad.push((f_up - f_down) / (up - down));
    }
    Ok(grad)
}

/// Axis-aligned sampling box with positive volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::invalid("box", "must have at least one dimension"));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite()) {
                return Err(Error::invalid("box", "bounds must be finite"));
            }
            if l >= u {
                return Err(Error::invalid("box", "degenerate: lower must be below upper in every component"));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| rng.random_range(l..u))
            .collect()
    }
}

/// Sampled evidence about the plant and model. Finite samples can refute but
/// never establish global bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub samples: usize,
    pub plant_hessian_bound: f64,
    pub model_hessian_bound: f64,
    pub min_plant_value: f64,
    pub max_gradient_discrepancy: f64,
}

pub fn probe_assumptions(problem: &ProblemPair, region: &SearchBox, samples: usize) -> Result<AssumptionReport> {
    if samples == 0 {
        return Err(Error::invalid("samples", "must be positive"));
    }
    if region.dim() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            actual: region.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut report = AssumptionReport {
        samples,
        plant_hessian_bound: 0.0,
        model_hessian_bound: 0.0,
        min_plant_value: f64::INFINITY,
        max_gradient_discrepancy: 0.0,
    };
    for _ in 0..samples {
        let u = region.sample(&mut rng);
        report.plant_hessian_bound = report.plant_hessian_bound.max(hessian_norm(problem.plant(), &u)?);
        report.model_hessian_bound = report.model_hessian_bound.max(hessian_norm(problem.model(), &u)?);
        report.min_plant_value = report.min_plant_value.min(problem.plant().value(&u)?);
        for oracle in [problem.plant(), problem.model()] {
            let fd = finite_difference_gradient(oracle, &u, GRADIENT_CHECK_STEP)?;
            let exact = oracle.gradient(&u)?;
            report.max_gradient_discrepancy = report.max_gradient_discrepancy.max(norm_inf(&sub(&exact, &fd)));
        }
    }
    Ok(report)
}

/// Spectral norm of the central-difference Hessian at `u`.
fn hessian_norm(oracle: &ScalarOracle, u: &[f64]) -> Result<f64> {
    let n = u.len();
    let h = HESSIAN_STEP;
    let f0 = oracle.value(u)?;
    let mut x = u.to_vec();
    let mut hess = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        x[i] = u[i] + h;
        let fp = oracle.value(&x)?;
        x[i] = u[i] - h;
        let fm = oracle.value(&x)?;
        x[i] = u[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                x[i] = u[i] + si * h;
                x[j] = u[j] + sj * h;
                let v = oracle.value(&x);
                x[i] = u[i];
                x[j] = u[j];
                v
            };
            let hij = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)? + corner(-1.0, -1.0)?)
                / (4.0 * h * h);
            hess[(i, j)] = hij;
            hess[(j, i)] = hij;
        }
    }
    Ok(hess
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |m, e| m.max(e.abs())))
}
