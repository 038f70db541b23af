//! Algorithm loops and per-iteration traces.
//!
//! Each record `k` describes the state at the start of iteration `k` (the
//! reference point, its measured plant value and gradient norm, the radius
//! and the modifiers in force) together with the step taken from it. The
//! last record of a trace is the terminal state and carries no step.
//!
//! Plant accounting for the trust-region loops: one plant value per step
//! (at the candidate) and one plant gradient per accepted step, plus one of
//! each at the initial point.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correction::{compute_modifiers, validate_gain, CorrectedModel, ModelForm, Modifiers};
use crate::descent::{box_projection, projected_gradient};
use crate::error::{Error, Result};
use crate::linalg::{norm2, norm_inf, sub};
use crate::problem::{ProblemPair, SearchBox};
use crate::subproblem::{estimate_beta, solve_subproblem, SubproblemOptions};
use crate::trust_region::{
    accept_candidate, compute_rho_with_threshold, update_radius, Rho, TrustRegionConstants,
    TrustRegionState, DEFAULT_RHO_DEGENERACY,
};

pub const NO_GUARANTEE_NOTE: &str = "no convergence guarantee: filtered modifiers (alpha < 1)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    BasicMa,
    TrustRegion,
    MaTr,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::BasicMa => "basic-ma",
            Algorithm::TrustRegion => "trust-region",
            Algorithm::MaTr => "ma-tr",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationStatus {
    Converged,
    MaxIterations,
    UnboundedSubproblem,
    OracleFailure,
}

impl TerminationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminationStatus::Converged => "converged",
            TerminationStatus::MaxIterations => "max-iterations",
            TerminationStatus::UnboundedSubproblem => "unbounded-subproblem",
            TerminationStatus::OracleFailure => "oracle-failure",
        }
    }
}

impl fmt::Display for TerminationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Termination tests. The algorithms themselves have no stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoppingCriteria {
    /// On the plant gradient norm at the reference point.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_plant_evaluations: u64,
}

impl Default for StoppingCriteria {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iterations: 500,
            max_plant_evaluations: 10_000,
        }
    }
}

impl StoppingCriteria {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::invalid("tolerance", "must be positive and finite"));
        }
        if self.max_plant_evaluations == 0 {
            return Err(Error::invalid("max_plant_evaluations", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BasicMaSettings {
    pub alpha: f64,
    /// λ₋₁; zero when absent.
    pub initial_modifiers: Option<Vec<f64>>,
    /// Half-width of the box standing in for the whole input space.
    pub search_bound: f64,
    pub random_starts: usize,
    pub seed: u64,
    /// Model evaluations per descent start.
    pub inner_budget: usize,
}

impl Default for BasicMaSettings {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            initial_modifiers: None,
            search_bound: 1e6,
            random_starts: 8,
            seed: 0,
            inner_budget: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrustRegionSettings {
    pub delta0: f64,
    pub constants: TrustRegionConstants,
    pub subproblem: SubproblemOptions,
    /// κ used for the recorded sufficient-decrease diagnostic.
    pub kappa: f64,
    /// Predicted decreases at or below this make ρ degenerate.
    pub rho_degeneracy: f64,
}

impl Default for TrustRegionSettings {
    fn default() -> Self {
        Self {
            delta0: 1.0,
            constants: TrustRegionConstants::default(),
            subproblem: SubproblemOptions::default(),
            kappa: 0.1,
            rho_degeneracy: DEFAULT_RHO_DEGENERACY,
        }
    }
}

impl TrustRegionSettings {
    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        self.subproblem.validate()?;
        if !(self.delta0 > 0.0 && self.delta0.is_finite()) {
            return Err(Error::invalid("delta0", "must be positive and finite"));
        }
        if let Some(max) = self.constants.radius_max {
            if self.delta0 > max {
                return Err(Error::invalid("delta0", "exceeds radius_max"));
            }
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::invalid("kappa", "must lie in (0, 1)"));
        }
        if !(self.rho_degeneracy >= 0.0 && self.rho_degeneracy.is_finite()) {
            return Err(Error::invalid("rho_degeneracy", "must be finite and nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaTrSettings {
    pub trust_region: TrustRegionSettings,
    pub alpha: f64,
    pub initial_modifiers: Option<Vec<f64>>,
    pub model_form: ModelForm,
}

impl Default for MaTrSettings {
    fn default() -> Self {
        Self {
            trust_region: TrustRegionSettings::default(),
            alpha: 1.0,
            initial_modifiers: None,
            model_form: ModelForm::Unshifted,
        }
    }
}

/// Snapshot of the settings a trace was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriverSettings {
    BasicMa(BasicMaSettings),
    TrustRegion(TrustRegionSettings),
    MaTr(MaTrSettings),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Input applied to the plant during this step; `None` on the terminal record.
    pub applied_input: Option<Vec<f64>>,
    pub reference: Vec<f64>,
    pub plant_value: f64,
    pub grad_norm: f64,
    pub rho: Option<Rho>,
    pub radius: Option<f64>,
    pub accepted: bool,
    pub cauchy_override: bool,
    pub modifiers: Vec<f64>,
    /// `‖∇m(u*) − ∇φp(u*)‖∞`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_gradient_gap: Option<f64>,
    /// `|m(u*) − φp(u*)|`, for models carrying the value shift.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_value_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_gradient_norm: Option<f64>,
    /// `m(u*) − m(candidate)`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_decrease: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_plant_value: Option<f64>,
}

impl IterationRecord {
    fn at(k: usize, reference: &[f64], plant_value: f64, grad_norm: f64, modifiers: &[f64]) -> Self {
        Self {
            k,
            applied_input: None,
            reference: reference.to_vec(),
            plant_value,
            grad_norm,
            rho: None,
            radius: None,
            accepted: false,
            cauchy_override: false,
            modifiers: modifiers.to_vec(),
            model_gradient_gap: None,
            model_value_gap: None,
            model_gradient_norm: None,
            model_decrease: None,
            beta: None,
            candidate_plant_value: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub problem: String,
    pub algorithm: Algorithm,
    pub settings: DriverSettings,
    pub stopping: StoppingCriteria,
    pub noise_level: f64,
    pub records: Vec<IterationRecord>,
    pub termination: TerminationStatus,
    pub plant_value_evaluations: u64,
    pub plant_gradient_evaluations: u64,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl RunTrace {
    pub fn final_record(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// Number of steps taken (records minus the terminal one).
    pub fn iterations(&self) -> usize {
        self.records.iter().filter(|r| r.applied_input.is_some()).count()
    }

    /// Reference points in order, one per record.
    pub fn references(&self) -> impl Iterator<Item = &[f64]> {
        self.records.iter().map(|r| r.reference.as_slice())
    }
}

/// Whether the final reference is first-order critical to within `tolerance`.
pub fn check_convergence(trace: &RunTrace, tolerance: f64) -> bool {
    trace
        .final_record()
        .is_some_and(|r| r.grad_norm <= tolerance)
}

/// Plant counters at run start, so traces report per-run usage.
struct PlantBudget {
    values0: u64,
    gradients0: u64,
}

impl PlantBudget {
    fn start(problem: &ProblemPair) -> Self {
        Self {
            values0: problem.plant().value_count(),
            gradients0: problem.plant().gradient_count(),
        }
    }

    fn values(&self, problem: &ProblemPair) -> u64 {
        problem.plant().value_count() - self.values0
    }

    fn gradients(&self, problem: &ProblemPair) -> u64 {
        problem.plant().gradient_count() - self.gradients0
    }
}

struct TraceBuilder<'p> {
    problem: &'p ProblemPair,
    budget: PlantBudget,
    trace: RunTrace,
}

impl<'p> TraceBuilder<'p> {
    fn new(problem: &'p ProblemPair, algorithm: Algorithm, settings: DriverSettings, stopping: StoppingCriteria) -> Self {
        Self {
            problem,
            budget: PlantBudget::start(problem),
            trace: RunTrace {
                problem: problem.id().to_string(),
                algorithm,
                settings,
                stopping,
                noise_level: problem.noise_level(),
                records: Vec::new(),
                termination: TerminationStatus::MaxIterations,
                plant_value_evaluations: 0,
                plant_gradient_evaluations: 0,
                notes: Vec::new(),
            },
        }
    }

    fn eval_cap_reached(&self) -> bool {
        self.budget.values(self.problem) >= self.trace.stopping.max_plant_evaluations
    }

    fn note(&mut self, note: impl Into<String>) {
        self.trace.notes.push(note.into());
    }

    fn finish(mut self, outcome: Result<TerminationStatus>) -> RunTrace {
        self.trace.termination = match outcome {
            Ok(status) => status,
            Err(e) => {
                self.trace.notes.push(format!("run aborted: {e}"));
                TerminationStatus::OracleFailure
            }
        };
        self.trace.plant_value_evaluations = self.budget.values(self.problem);
        self.trace.plant_gradient_evaluations = self.budget.gradients(self.problem);
        self.trace
    }
}

fn check_start(problem: &ProblemPair, u0: &[f64]) -> Result<()> {
    if u0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            actual: u0.len(),
        });
    }
    if let Some(index) = u0.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFiniteInput { index });
    }
    Ok(())
}

fn initial_modifiers(problem: &ProblemPair, initial: &Option<Vec<f64>>, alpha: f64) -> Result<Modifiers> {
    match initial {
        Some(v) if v.len() != problem.dim() => Err(Error::DimensionMismatch {
            expected: problem.dim(),
            actual: v.len(),
        }),
        Some(v) => Modifiers::with_initial(v.clone(), alpha),
        None => Modifiers::new(problem.dim(), alpha),
    }
}

// ---------------------------------------------------------------------------
// basic modifier adaptation

/// Basic modifier adaptation: each iterate minimizes `φ̂(u) + λₖᵀu` over the
/// search box and becomes the next correction point unconditionally.
pub fn run_basic_ma(
    problem: &ProblemPair,
    u0: &[f64],
    settings: &BasicMaSettings,
    stop: &StoppingCriteria,
) -> Result<RunTrace> {
    check_start(problem, u0)?;
    stop.validate()?;
    validate_gain(settings.alpha)?;
    if !(settings.search_bound > 0.0 && settings.search_bound.is_finite()) {
        return Err(Error::invalid("search_bound", "must be positive and finite"));
    }
    if settings.inner_budget < 2 {
        return Err(Error::invalid("inner_budget", "must be at least 2"));
    }
    let mut modifiers = initial_modifiers(problem, &settings.initial_modifiers, settings.alpha)?;
    let mut builder = TraceBuilder::new(
        problem,
        Algorithm::BasicMa,
        DriverSettings::BasicMa(settings.clone()),
        *stop,
    );
    if settings.alpha < 1.0 {
        builder.note(NO_GUARANTEE_NOTE);
    }
    let outcome = basic_ma_loop(&mut builder, u0, settings, &mut modifiers);
    Ok(builder.finish(outcome))
}

fn basic_ma_loop(
    b: &mut TraceBuilder<'_>,
    u0: &[f64],
    settings: &BasicMaSettings,
    modifiers: &mut Modifiers,
) -> Result<TerminationStatus> {
    let problem = b.problem;
    let stop = b.trace.stopping;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let region = SearchBox::cube(problem.dim(), -settings.search_bound, settings.search_bound)?;
    let mut u = u0.to_vec();

    for k in 0.. {
        let plant_value = problem.evaluate_plant(&u)?;
        let plant_grad = problem.plant_gradient(&u)?;
        let grad_norm = norm2(&plant_grad);
        let raw = compute_modifiers(&plant_grad, &problem.model_gradient(&u)?)?;
        let lambda = modifiers.update(&raw)?.to_vec();
        let mut record = IterationRecord::at(k, &u, plant_value, grad_norm, &lambda);

        if grad_norm <= stop.tolerance {
            b.trace.records.push(record);
            return Ok(TerminationStatus::Converged);
        }
        if k >= stop.max_iterations || b.eval_cap_reached() {
            b.trace.records.push(record);
            return Ok(TerminationStatus::MaxIterations);
        }

        let model = CorrectedModel::unshifted(problem.model(), lambda, u.clone())?;
        match minimize_over_box(&model, &region, settings, &mut rng)? {
            BoxMinimum::Unbounded { point } => {
                b.note(format!(
                    "iteration {k}: corrected model decreases through the search box boundary at {point:?}"
                ));
                b.trace.records.push(record);
                return Ok(TerminationStatus::UnboundedSubproblem);
            }
            BoxMinimum::Bounded { point, critical } => {
                if !critical {
                    b.note(format!("iteration {k}: subproblem solution is not first-order critical"));
                }
                record.applied_input = Some(point.clone());
                record.accepted = true;
                b.trace.records.push(record);
                u = point;
            }
        }
    }
    unreachable!("loop exits through a termination test")
}

enum BoxMinimum {
    Bounded { point: Vec<f64>, critical: bool },
    Unbounded { point: Vec<f64> },
}

/// Multi-start projected-gradient minimization over the search box.
///
/// Starts: the current anchor, the origin, then `random_starts` uniform
/// samples. A later start replaces the incumbent only on a clear improvement,
/// so rounding-level ties keep the earliest solution.
fn minimize_over_box(
    model: &CorrectedModel<'_>,
    region: &SearchBox,
    settings: &BasicMaSettings,
    rng: &mut ChaCha8Rng,
) -> Result<BoxMinimum> {
    let bound = settings.search_bound;
    let mut starts = vec![model.anchor().to_vec(), vec![0.0; model.dim()]];
    starts.extend((0..settings.random_starts).map(|_| region.sample(rng)));

    let mut best: Option<(Vec<f64>, f64, Vec<f64>, bool)> = None;
    for start in &starts {
        let g0 = norm2(&model.gradient(start)?);
        let out = projected_gradient(
            |u| model.offset(u),
            |u| model.gradient(u),
            box_projection(-bound, bound),
            start,
            if g0 > 0.0 { 1.0 / g0.max(1.0) } else { 1.0 },
            settings.inner_budget,
            1e-12 * g0.max(1.0),
        )?;
        let improves = match &best {
            None => true,
            Some((_, v, _, _)) => out.value < v - 1e-12 * (1.0 + v.abs()),
        };
        if improves {
            best = Some((out.point, out.value, out.gradient, out.stationary));
        }
    }
    let (point, _, grad, stationary) = best.expect("at least two starts");

    let edge = bound * (1.0 - 1e-12);
    let escapes = point
        .iter()
        .zip(&grad)
        .any(|(&x, &g)| (x >= edge && g < 0.0) || (x <= -edge && g > 0.0));
    if escapes {
        return Ok(BoxMinimum::Unbounded { point });
    }
    let critical = stationary || norm_inf(&grad) <= 1e-8 * (1.0 + norm_inf(model.lambda()));
    Ok(BoxMinimum::Bounded { point, critical })
}

// ---------------------------------------------------------------------------
// trust-region loops

/// Basic trust-region method; the model is the value-and-gradient matched
/// corrected model.
pub fn run_trust_region(
    problem: &ProblemPair,
    u0: &[f64],
    settings: &TrustRegionSettings,
    stop: &StoppingCriteria,
) -> Result<RunTrace> {
    check_start(problem, u0)?;
    stop.validate()?;
    settings.validate()?;
    let mut builder = TraceBuilder::new(
        problem,
        Algorithm::TrustRegion,
        DriverSettings::TrustRegion(*settings),
        *stop,
    );
    let mut modifiers = Modifiers::new(problem.dim(), 1.0)?;
    let outcome = trust_region_loop(&mut builder, u0, settings, ModelForm::Shifted, &mut modifiers);
    Ok(builder.finish(outcome))
}

/// Trust-region supplemented modifier adaptation.
pub fn run_ma_tr(
    problem: &ProblemPair,
    u0: &[f64],
    settings: &MaTrSettings,
    stop: &StoppingCriteria,
) -> Result<RunTrace> {
    check_start(problem, u0)?;
    stop.validate()?;
    settings.trust_region.validate()?;
    validate_gain(settings.alpha)?;
    let mut modifiers = initial_modifiers(problem, &settings.initial_modifiers, settings.alpha)?;
    let mut builder = TraceBuilder::new(problem, Algorithm::MaTr, DriverSettings::MaTr(settings.clone()), *stop);
    if settings.alpha < 1.0 {
        builder.note(NO_GUARANTEE_NOTE);
    }
    let outcome = trust_region_loop(
        &mut builder,
        u0,
        &settings.trust_region,
        settings.model_form,
        &mut modifiers,
    );
    Ok(builder.finish(outcome))
}

fn trust_region_loop(
    b: &mut TraceBuilder<'_>,
    u0: &[f64],
    settings: &TrustRegionSettings,
    form: ModelForm,
    modifiers: &mut Modifiers,
) -> Result<TerminationStatus> {
    let problem = b.problem;
    let stop = b.trace.stopping;
    let constants = &settings.constants;

    let f0 = problem.evaluate_plant(u0)?;
    let mut plant_grad = problem.plant_gradient(u0)?;
    let mut state = TrustRegionState::new(u0.to_vec(), f0, settings.delta0)?;

    loop {
        let k = state.iteration;
        let grad_norm = norm2(&plant_grad);
        let model_grad_at_ref = problem.model_gradient(&state.reference)?;
        let raw = compute_modifiers(&plant_grad, &model_grad_at_ref)?;
        let lambda = modifiers.update(&raw)?.to_vec();
        let model = CorrectedModel::with_form(
            problem.model(),
            lambda.clone(),
            state.reference.clone(),
            form,
            Some(state.reference_value),
        )?;

        let mut record = IterationRecord::at(k, &state.reference, state.reference_value, grad_norm, &lambda);
        record.radius = Some(state.radius);
        let model_grad = model.gradient(&state.reference)?;
        record.model_gradient_gap = Some(norm_inf(&sub(&model_grad, &plant_grad)));
        record.model_gradient_norm = Some(norm2(&model_grad));
        if form == ModelForm::Shifted {
            record.model_value_gap = Some((model.value(&state.reference)? - state.reference_value).abs());
        }

        if grad_norm <= stop.tolerance {
            b.trace.records.push(record);
            return Ok(TerminationStatus::Converged);
        }
        if k >= stop.max_iterations || b.eval_cap_reached() {
            b.trace.records.push(record);
            return Ok(TerminationStatus::MaxIterations);
        }
        if state.radius < f64::MIN_POSITIVE {
            b.note(format!("iteration {k}: trust region collapsed to radius {:e}", state.radius));
            b.trace.records.push(record);
            return Ok(TerminationStatus::MaxIterations);
        }

        let sub_result = solve_subproblem(&model, state.radius, &settings.subproblem)?;
        let beta = estimate_beta(&model, state.radius)?;
        let candidate = sub_result.candidate;
        let candidate_value = problem.evaluate_plant(&candidate)?;
        let rho = compute_rho_with_threshold(
            state.reference_value,
            candidate_value,
            model.offset(&state.reference)?,
            -sub_result.model_decrease,
            settings.rho_degeneracy,
        );
        let accepted = accept_candidate(&mut state, &candidate, candidate_value, rho, constants);
        let next_radius = update_radius(state.radius, rho, constants);

        record.applied_input = Some(candidate);
        record.rho = Some(rho);
        record.accepted = accepted;
        record.cauchy_override = sub_result.cauchy_override;
        record.model_decrease = Some(sub_result.model_decrease);
        record.beta = Some(beta);
        record.candidate_plant_value = Some(candidate_value);
        b.trace.records.push(record);

        if accepted {
            plant_grad = problem.plant_gradient(&state.reference)?;
        }
        state.radius = next_radius;
        state.iteration += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::problem;

    #[test]
    fn basic_ma_solves_p1_in_one_step() {
        let p = problem("P1").unwrap();
        let t = run_basic_ma(&p, &[0.0, 0.0], &BasicMaSettings::default(), &StoppingCriteria::default()).unwrap();
        assert_eq!(t.termination, TerminationStatus::Converged);
        assert_eq!(t.records.len(), 2);
        assert_eq!(t.records[0].modifiers, vec![-2.0, -2.0]);
        assert_eq!(t.records[0].applied_input.as_deref(), Some(&[1.0, 1.0][..]));
        assert_eq!(t.records[1].k, 1);
    }

    #[test]
    fn basic_ma_detects_unbounded_subproblem_on_p2() {
        for u0 in [1.0, 3.0] {
            let p = problem("P2").unwrap();
            let t = run_basic_ma(&p, &[u0], &BasicMaSettings::default(), &StoppingCriteria::default()).unwrap();
            assert_eq!(t.termination, TerminationStatus::UnboundedSubproblem, "{t:?}");
        }
    }

    #[test]
    fn ma_tr_on_p1_takes_the_exact_step() {
        let p = problem("P1").unwrap();
        let settings = MaTrSettings {
            trust_region: TrustRegionSettings {
                delta0: 2.0,
                ..Default::default()
            },
            ..Default::default()
        };
        let t = run_ma_tr(&p, &[0.0, 0.0], &settings, &StoppingCriteria::default()).unwrap();
        assert_eq!(t.termination, TerminationStatus::Converged);
        assert_eq!(t.records.len(), 2);
        let first = &t.records[0];
        let cand = first.applied_input.as_ref().unwrap();
        assert!((cand[0] - 1.0).abs() < 1e-12 && (cand[1] - 1.0).abs() < 1e-12, "{cand:?}");
        assert!((first.rho.unwrap().ratio().unwrap() - 1.0).abs() < 1e-12);
        assert!(first.accepted);
    }

    #[test]
    fn ma_tr_converges_on_p2() {
        let p = problem("P2").unwrap();
        let t = run_ma_tr(&p, &[3.0], &MaTrSettings::default(), &StoppingCriteria::default()).unwrap();
        assert_eq!(t.termination, TerminationStatus::Converged);
        let last = t.final_record().unwrap();
        assert!(last.reference[0].abs() <= 1e-6 && last.grad_norm <= 1e-6);
    }

    #[test]
    fn start_at_optimum_converges_immediately() {
        let p = problem("P3").unwrap();
        let t = run_trust_region(&p, &[1.0, 1.0], &TrustRegionSettings::default(), &StoppingCriteria::default())
            .unwrap();
        assert_eq!(t.termination, TerminationStatus::Converged);
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.records[0].k, 0);
        assert_eq!(t.iterations(), 0);
    }

    #[test]
    fn trust_region_converges_on_p1() {
        let p = problem("P1").unwrap();
        let t = run_trust_region(&p, &[0.0, 0.0], &TrustRegionSettings::default(), &StoppingCriteria::default())
            .unwrap();
        assert_eq!(t.termination, TerminationStatus::Converged);
        assert!(t.final_record().unwrap().grad_norm <= 1e-6);
        for w in t.records.windows(2) {
            assert!(w[1].plant_value <= w[0].plant_value);
        }
    }

    #[test]
    fn filtered_runs_are_annotated() {
        let p = problem("P1").unwrap();
        let settings = MaTrSettings {
            alpha: 0.5,
            ..Default::default()
        };
        let t = run_ma_tr(&p, &[0.0, 0.0], &settings, &StoppingCriteria::default()).unwrap();
        assert!(t.notes.iter().any(|n| n == NO_GUARANTEE_NOTE));
    }

    #[test]
    fn oracle_failure_becomes_termination_status() {
        use crate::problem::ScalarOracle;
        let plant = ScalarOracle::from_fns(1, |u| if u[0] < 0.5 { f64::NAN } else { u[0] * u[0] }, |u| vec![2.0 * u[0]]);
        let model = ScalarOracle::from_fns(1, |u| u[0] * u[0], |u| vec![2.0 * u[0]]);
        let p = ProblemPair::new("nan-below-half", plant, model).unwrap();
        let t = run_ma_tr(&p, &[1.0], &MaTrSettings::default(), &StoppingCriteria::default()).unwrap();
        assert_eq!(t.termination, TerminationStatus::OracleFailure);
        assert!(t.notes.iter().any(|n| n.contains("oracle failure")));
    }

    #[test]
    fn invalid_inputs_rejected_up_front() {
        let p = problem("P1").unwrap();
        let stop = StoppingCriteria::default();
        assert!(run_ma_tr(&p, &[0.0], &MaTrSettings::default(), &stop).is_err());
        let bad = MaTrSettings {
            alpha: 0.0,
            ..Default::default()
        };
        assert!(run_ma_tr(&p, &[0.0, 0.0], &bad, &stop).is_err());
        let bad = TrustRegionSettings {
            delta0: -1.0,
            ..Default::default()
        };
        assert!(run_trust_region(&p, &[0.0, 0.0], &bad, &stop).is_err());
    }

    #[test]
    fn convergence_check_uses_final_gradient() {
        let p = problem("P1").unwrap();
        let mut t = run_ma_tr(&p, &[0.0, 0.0], &MaTrSettings::default(), &StoppingCriteria::default()).unwrap();
        t.records.last_mut().unwrap().grad_norm = 1e-9;
        assert!(check_convergence(&t, 1e-6));
        t.records.last_mut().unwrap().grad_norm = 0.3;
        assert!(!check_convergence(&t, 1e-6));
    }
}
