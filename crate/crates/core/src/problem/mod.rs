//! Plant/model oracle pairs.
//!
//! A [`ProblemPair`] bundles the measured plant cost with the mismatched
//! closed-form model an optimizer is given. Every evaluation goes through a
//! [`ScalarOracle`], which validates inputs, rejects non-finite outputs and
//! counts calls so drivers can be audited for how many plant experiments
//! they spend.

mod catalog;
mod verify;

use std::fmt;
use std::ops::Deref;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use catalog::{catalog, problem, CatalogEntry};
pub use verify::{finite_difference_gradient, probe_assumptions, AssumptionReport, SearchBox};

/// A point in decision space with finite components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct InputVector(Vec<f64>);

impl InputVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("input", "must have at least one component"));
        }
        if let Some(index) = components.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        Ok(Self(components))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for InputVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for InputVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<InputVector> for Vec<f64> {
    fn from(v: InputVector) -> Self {
        v.0
    }
}

/// A differentiable scalar function of a fixed-length input.
pub trait Objective: Send + Sync {
    fn value(&self, u: &[f64]) -> f64;
    fn gradient(&self, u: &[f64]) -> Vec<f64>;
}

struct FnObjective<F, G> {
    value: F,
    gradient: G,
}

impl<F, G> Objective for FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn value(&self, u: &[f64]) -> f64 {
        (self.value)(u)
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        (self.gradient)(u)
    }
}

/// Counted, validating wrapper around an [`Objective`].
///
/// Counters are atomic so a noise-free oracle can be shared across threads.
pub struct ScalarOracle {
    dim: usize,
    objective: Arc<dyn Objective>,
    value_calls: AtomicU64,
    gradient_calls: AtomicU64,
}

impl ScalarOracle {
    pub fn new(dim: usize, objective: Arc<dyn Objective>) -> Self {
        assert!(dim >= 1, "oracle dimension must be at least 1");
        Self {
            dim,
            objective,
            value_calls: AtomicU64::new(0),
            gradient_calls: AtomicU64::new(0),
        }
    }

    /// Builds an oracle from a value closure and its analytic gradient.
    pub fn from_fns<F, G>(dim: usize, value: F, gradient: G) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::new(dim, Arc::new(FnObjective { value, gradient }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same underlying function, counters reset to zero.
    pub fn fresh(&self) -> Self {
        Self::new(self.dim, Arc::clone(&self.objective))
    }

    pub fn value_count(&self) -> u64 {
        self.value_calls.load(Ordering::Relaxed)
    }

    pub fn gradient_count(&self) -> u64 {
        self.gradient_calls.load(Ordering::Relaxed)
    }

    pub fn reset_counts(&self) {
        self.value_calls.store(0, Ordering::Relaxed);
        self.gradient_calls.store(0, Ordering::Relaxed);
    }

    pub fn value(&self, u: &[f64]) -> Result<f64> {
        self.check_input(u)?;
        self.value_calls.fetch_add(1, Ordering::Relaxed);
        let v = self.objective.value(u);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::OracleFailure(format!("non-finite value {v} at {u:?}")))
        }
    }

    pub fn gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_input(u)?;
        self.gradient_calls.fetch_add(1, Ordering::Relaxed);
        let g = self.objective.gradient(u);
        if g.len() != self.dim {
            return Err(Error::OracleFailure(format!(
                "gradient has length {}, expected {}",
                g.len(),
                self.dim
            )));
        }
        if g.iter().any(|c| !c.is_finite()) {
            return Err(Error::OracleFailure(format!("non-finite gradient at {u:?}")));
        }
        Ok(g)
    }

    fn check_input(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: u.len(),
            });
        }
        if let Some(index) = u.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        Ok(())
    }
}

impl fmt::Debug for ScalarOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarOracle")
            .field("dim", &self.dim)
            .field("value_calls", &self.value_count())
            .field("gradient_calls", &self.gradient_count())
            .finish()
    }
}

/// Seeded additive Gaussian perturbation of plant measurements.
#[derive(Debug)]
struct NoiseSource {
    level: f64,
    seed: u64,
    rng: Mutex<ChaCha8Rng>,
}

impl NoiseSource {
    fn new(level: f64, seed: u64) -> Self {
        Self {
            level,
            seed,
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    fn sample(&self) -> f64 {
        let normal = Normal::new(0.0, self.level).expect("noise level validated as finite and >= 0");
        let mut rng = self.rng.lock().expect("noise generator poisoned");
        normal.sample(&mut *rng)
    }
}

/// A plant oracle paired with the model the optimizer believes in.
#[derive(Debug)]
pub struct ProblemPair {
    id: String,
    description: String,
    plant: ScalarOracle,
    model: ScalarOracle,
    known_optimum: Option<InputVector>,
    noise: Option<NoiseSource>,
}

impl ProblemPair {
    pub fn new(
        id: impl Into<String>,
        plant: ScalarOracle,
        model: ScalarOracle,
    ) -> Result<Self> {
        if plant.dim() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: plant.dim(),
                actual: model.dim(),
            });
        }
        Ok(Self {
            id: id.into(),
            description: String::new(),
            plant,
            model,
            known_optimum: None,
            noise: None,
        })
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn with_known_optimum(mut self, optimum: InputVector) -> Result<Self> {
        if optimum.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: optimum.dim(),
            });
        }
        self.known_optimum = Some(optimum);
        Ok(self)
    }

    /// Perturbs plant values and gradients with `N(0, level²)` noise drawn
    /// from a generator seeded with `seed`. A level of zero disables noise.
    pub fn with_noise(mut self, level: f64, seed: u64) -> Result<Self> {
        if !(level.is_finite() && level >= 0.0) {
            return Err(Error::invalid("noise_level", "must be finite and nonnegative"));
        }
        self.noise = (level > 0.0).then(|| NoiseSource::new(level, seed));
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn dim(&self) -> usize {
        self.plant.dim()
    }

    pub fn known_optimum(&self) -> Option<&InputVector> {
        self.known_optimum.as_ref()
    }

    pub fn noise_level(&self) -> f64 {
        self.noise.as_ref().map_or(0.0, |n| n.level)
    }

    pub fn plant(&self) -> &ScalarOracle {
        &self.plant
    }

    pub fn model(&self) -> &ScalarOracle {
        &self.model
    }

    /// Independent copy with zeroed counters and a re-seeded noise stream.
    pub fn fresh(&self) -> Self {
        Self {
            id: self.id.clone(),
            description: self.description.clone(),
            plant: self.plant.fresh(),
            model: self.model.fresh(),
            known_optimum: self.known_optimum.clone(),
            noise: self.noise.as_ref().map(|n| NoiseSource::new(n.level, n.seed)),
        }
    }

    pub fn evaluate_plant(&self, u: &[f64]) -> Result<f64> {
        let v = self.plant.value(u)?;
        Ok(match &self.noise {
            Some(noise) => v + noise.sample(),
            None => v,
        })
    }

    pub fn plant_gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut g = self.plant.gradient(u)?;
        if let Some(noise) = &self.noise {
            for c in &mut g {
                *c += noise.sample();
            }
        }
        Ok(g)
    }

    pub fn evaluate_model(&self, u: &[f64]) -> Result<f64> {
        self.model.value(u)
    }

    pub fn model_gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.model.gradient(u)
    }
}
