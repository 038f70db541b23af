//! Ball-constrained minimization of the corrected model.
//!
//! The candidate comes from projected-gradient descent inside the ball; the
//! Cauchy point (best point along the steepest-descent ray) is computed
//! alongside it and replaces the candidate whenever the candidate is worse.
//! That override is what certifies the sufficient-decrease bound checked by
//! [`check_sufficient_decrease`].
//!
//! All comparisons use `m(u) − m(anchor)` (see [`CorrectedModel::offset`]),
//! so the result does not depend on the constant carried by the model.

use serde::{Deserialize, Serialize};

use crate::correction::CorrectedModel;
use crate::descent::{ball_projection, projected_gradient};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2};

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const BETA_FLOOR_EPS: f64 = 1e-6;
const BETA_STEP: f64 = 1e-4;
const BETA_SAMPLES: usize = 4;
const REFINE_ITERS: usize = 40;

/// Controls for the Cauchy-point line search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CauchySearch {
    /// Uniform scan points on `[0, t_max]`, endpoints included.
    pub scan_points: usize,
    pub rel_tol: f64,
    /// Cap on model evaluations (values and gradients) for the whole search.
    pub max_evals: usize,
}

impl Default for CauchySearch {
    fn default() -> Self {
        Self {
            scan_points: 16,
            rel_tol: 1e-8,
            max_evals: 100,
        }
    }
}

/// Where the projected-gradient phase begins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DescentStart {
    #[default]
    CauchyPoint,
    Anchor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubproblemOptions {
    /// Model value evaluations allowed for the descent phase.
    pub budget: usize,
    pub cauchy: CauchySearch,
    pub descent_start: DescentStart,
}

impl Default for SubproblemOptions {
    fn default() -> Self {
        Self {
            budget: 200,
            cauchy: CauchySearch::default(),
            descent_start: DescentStart::default(),
        }
    }
}

impl SubproblemOptions {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::invalid("budget", "must be at least 1"));
        }
        if self.cauchy.scan_points < 2 {
            return Err(Error::invalid("scan_points", "must be at least 2"));
        }
        if !(self.cauchy.rel_tol > 0.0 && self.cauchy.rel_tol < 1.0) {
            return Err(Error::invalid("rel_tol", "must lie in (0, 1)"));
        }
        if self.cauchy.max_evals < self.cauchy.scan_points + 2 {
            return Err(Error::invalid("max_evals", "must cover the scan plus one golden step"));
        }
        Ok(())
    }
}

/// Minimizer of the model along the steepest-descent ray inside the ball.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyPoint {
    pub point: Vec<f64>,
    pub step: f64,
    /// `m(point) − m(anchor)`
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubproblemResult {
    pub candidate: Vec<f64>,
    pub cauchy_point: Vec<f64>,
    pub cauchy_step: f64,
    pub cauchy_override: bool,
    pub model_value_at_candidate: f64,
    /// `m(anchor) − m(candidate)`
    pub model_decrease: f64,
    /// `m(anchor) − m(cauchy_point)`
    pub cauchy_decrease: f64,
    pub descent_evaluations: usize,
}

/// The half-line `anchor − t·g` with an evaluation counter.
struct Ray<'m, 'a> {
    model: &'m CorrectedModel<'a>,
    g: Vec<f64>,
    evals: usize,
}

impl Ray<'_, '_> {
    fn point(&self, t: f64) -> Vec<f64> {
        axpy(self.model.anchor(), -t, &self.g)
    }

    fn value(&mut self, t: f64) -> Result<f64> {
        self.evals += 1;
        self.model.offset(&self.point(t))
    }

    fn slope(&mut self, t: f64) -> Result<f64> {
        self.evals += 1;
        Ok(-dot(&self.g, &self.model.gradient(&self.point(t))?))
    }
}

/// Best point along the steepest-descent ray within the ball.
///
/// A uniform scan brackets the best basin, golden-section search narrows it,
/// and a regula-falsi pass on the directional derivative polishes the
/// minimizer. The best sampled point is returned, so with a nonzero
/// gradient the result never does worse than the anchor.
pub fn cauchy_point(model: &CorrectedModel<'_>, radius: f64, search: &CauchySearch) -> Result<CauchyPoint> {
    check_radius(radius)?;
    let anchor = model.anchor().to_vec();
    let g = model.gradient(&anchor)?;
    let gnorm = norm2(&g);
    if gnorm == 0.0 {
        return Ok(CauchyPoint {
            point: anchor,
            step: 0.0,
            offset: 0.0,
        });
    }
    let t_max = radius / gnorm;
    let mut ray = Ray { model, g, evals: 0 };

    let n = search.scan_points.max(2);
    let ts: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { t_max } else { t_max * i as f64 / (n - 1) as f64 })
        .collect();
    // offset(anchor) is zero by construction
    let mut vals = vec![0.0];
    for &t in &ts[1..] {
        vals.push(ray.value(t)?);
    }
    let best_i = (1..n).fold(0, |b, i| if vals[i] < vals[b] { i } else { b });
    let (mut best_t, mut best_v) = (ts[best_i], vals[best_i]);

    let mut lo = ts[best_i.saturating_sub(1)];
    let mut hi = ts[(best_i + 1).min(n - 1)];
    let mut c = hi - GOLDEN * (hi - lo);
    let mut d = lo + GOLDEN * (hi - lo);
    let mut fc = ray.value(c)?;
    let mut fd = ray.value(d)?;
    loop {
        for (t, v) in [(c, fc), (d, fd)] {
            if v < best_v {
                best_t = t;
                best_v = v;
            }
        }
        if hi - lo <= search.rel_tol * 0.5 * (lo + hi) || ray.evals >= search.max_evals {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - GOLDEN * (hi - lo);
            fc = ray.value(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + GOLDEN * (hi - lo);
            fd = ray.value(d)?;
        }
    }

    if let Some((t, v)) = refine_stationary(&mut ray, lo.min(best_t), hi.max(best_t), search.max_evals)? {
        if v <= best_v {
            best_t = t;
            best_v = v;
        }
    }

    Ok(CauchyPoint {
        point: ray.point(best_t),
        step: best_t,
        offset: best_v,
    })
}

/// Illinois regula falsi on the directional derivative over `[lo, hi]`,
/// run only when the derivative changes sign from negative to positive.
fn refine_stationary(ray: &mut Ray<'_, '_>, mut lo: f64, mut hi: f64, max_evals: usize) -> Result<Option<(f64, f64)>> {
    if ray.evals + 3 > max_evals || hi.is_nan() || hi <= lo {
        return Ok(None);
    }
    let mut s_lo = ray.slope(lo)?;
    let mut s_hi = ray.slope(hi)?;
    if !(s_lo < 0.0 && s_hi > 0.0) {
        return Ok(None);
    }
    let mut side = 0i8;
    let mut t = lo;
    for _ in 0..REFINE_ITERS {
        if ray.evals + 2 > max_evals {
            break;
        }
        t = (lo * s_hi - hi * s_lo) / (s_hi - s_lo);
        if !(t > lo && t < hi) {
            t = 0.5 * (lo + hi);
        }
        let s = ray.slope(t)?;
        if s == 0.0 {
            break;
        }
        if s < 0.0 {
            lo = t;
            s_lo = s;
            if side == -1 {
                s_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = t;
            s_hi = s;
            if side == 1 {
                s_lo *= 0.5;
            }
            side = 1;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let v = ray.value(t)?;
    Ok(Some((t, v)))
}

/// Approximate minimizer of the corrected model over `B(anchor, radius)`.
pub fn solve_subproblem(
    model: &CorrectedModel<'_>,
    radius: f64,
    options: &SubproblemOptions,
) -> Result<SubproblemResult> {
    check_radius(radius)?;
    if options.budget == 0 {
        return Err(Error::invalid("budget", "must be at least 1"));
    }
    let cp = cauchy_point(model, radius, &options.cauchy)?;
    let anchor = model.anchor();
    let start = match options.descent_start {
        DescentStart::CauchyPoint => cp.point.clone(),
        DescentStart::Anchor => anchor.to_vec(),
    };
    let g_anchor = norm2(&model.gradient(anchor)?);
    let initial_step = if g_anchor > 0.0 { radius / g_anchor } else { 1.0 };
    let tolerance = 1e-12 * g_anchor.max(1.0);
    let descent = projected_gradient(
        |u| model.offset(u),
        |u| model.gradient(u),
        ball_projection(anchor, radius),
        &start,
        initial_step,
        options.budget,
        tolerance,
    )?;

    let cauchy_override = descent.value > cp.offset;
    let (candidate, offset) = if cauchy_override {
        (cp.point.clone(), cp.offset)
    } else {
        (descent.point, descent.value)
    };
    Ok(SubproblemResult {
        model_value_at_candidate: model.value(&candidate)?,
        candidate,
        cauchy_point: cp.point,
        cauchy_step: cp.step,
        cauchy_override,
        model_decrease: -offset,
        cauchy_decrease: -cp.offset,
        descent_evaluations: descent.evaluations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientDecreaseParams {
    pub kappa: f64,
    pub beta: f64,
}

impl SufficientDecreaseParams {
    pub fn new(kappa: f64, beta: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::invalid("kappa", "must lie in (0, 1)"));
        }
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::invalid("beta", "must be finite and > 1"));
        }
        Ok(Self { kappa, beta })
    }
}

/// `m_ref − m_cand ≥ κ‖g‖·min(‖g‖/β, Δ)`
pub fn check_sufficient_decrease(
    model_ref: f64,
    model_cand: f64,
    grad_norm: f64,
    radius: f64,
    params: &SufficientDecreaseParams,
) -> bool {
    let threshold = params.kappa * grad_norm * (grad_norm / params.beta).min(radius);
    model_ref - model_cand >= threshold
}

/// Curvature bound from second differences along the steepest-descent ray.
///
/// Floors at `1 + 1e-6` so the result is always admissible as β.
pub fn estimate_beta(model: &CorrectedModel<'_>, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    let floor = 1.0 + BETA_FLOOR_EPS;
    let anchor = model.anchor();
    let g = model.gradient(anchor)?;
    let gnorm = norm2(&g);
    if gnorm == 0.0 {
        return Ok(floor);
    }
    let dir: Vec<f64> = g.iter().map(|c| -c / gnorm).collect();
    let h = BETA_STEP.min(radius / BETA_SAMPLES as f64);
    let along = |s: f64| model.offset(&axpy(anchor, s, &dir));
    let mut bound = 0.0_f64;
    for j in 0..BETA_SAMPLES {
        let s = radius * j as f64 / BETA_SAMPLES as f64;
        let q = (along(s + h)? - 2.0 * along(s)? + along(s - h)?) / (h * h);
        bound = bound.max(q.abs());
    }
    Ok(bound.max(floor))
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("radius", "must be positive"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::distance;
    use crate::problem::{problem, ScalarOracle};

    fn sphere() -> ScalarOracle {
        ScalarOracle::from_fns(2, |u| u[0] * u[0] + u[1] * u[1], |u| vec![2.0 * u[0], 2.0 * u[1]])
    }

    fn square() -> ScalarOracle {
        ScalarOracle::from_fns(1, |u| u[0] * u[0], |u| vec![2.0 * u[0]])
    }

    #[test]
    fn cauchy_point_hits_boundary_on_sphere() {
        let o = sphere();
        let m = CorrectedModel::unshifted(&o, vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        let cp = cauchy_point(&m, 0.5, &CauchySearch::default()).unwrap();
        assert_eq!(cp.point, vec![0.5, 0.0]);
        assert_eq!(cp.step, 0.25);
    }

    #[test]
    fn cauchy_point_of_stationary_anchor_is_anchor() {
        let o = sphere();
        let m = CorrectedModel::unshifted(&o, vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        let cp = cauchy_point(&m, 1.0, &CauchySearch::default()).unwrap();
        assert_eq!(cp.point, vec![0.0, 0.0]);
        assert_eq!(cp.step, 0.0);
    }

    #[test]
    fn cauchy_point_of_linear_model() {
        let o = ScalarOracle::from_fns(2, |u| 3.0 * u[0] + 4.0 * u[1], |_| vec![3.0, 4.0]);
        let m = CorrectedModel::unshifted(&o, vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        let cp = cauchy_point(&m, 1.0, &CauchySearch::default()).unwrap();
        assert!((cp.point[0] + 0.6).abs() < 1e-12 && (cp.point[1] + 0.8).abs() < 1e-12, "{cp:?}");
        assert!((cp.step - 0.2).abs() < 1e-15);
    }

    #[test]
    fn cauchy_point_with_huge_radius_is_exact_ray_minimizer() {
        // (u − 3)² from anchor 0: ray minimizer at u = 3
        let o = ScalarOracle::from_fns(1, |u| (u[0] - 3.0).powi(2), |u| vec![2.0 * (u[0] - 3.0)]);
        let m = CorrectedModel::unshifted(&o, vec![0.0], vec![0.0]).unwrap();
        let cp = cauchy_point(&m, 1e6, &CauchySearch::default()).unwrap();
        assert!((cp.point[0] - 3.0).abs() <= 1e-8, "{cp:?}");
        assert!((cp.step - 0.5).abs() <= 1e-8);
    }

    #[test]
    fn cauchy_point_on_concave_ray_goes_to_boundary() {
        let p = problem("P2").unwrap();
        let m = CorrectedModel::unshifted(p.model(), vec![12.0], vec![3.0]).unwrap();
        let cp = cauchy_point(&m, 1.0, &CauchySearch::default()).unwrap();
        assert_eq!(cp.point, vec![2.0]);
        assert!(cp.offset < 0.0);
    }

    #[test]
    fn subproblem_interior_minimizer() {
        let p = problem("P1").unwrap();
        let m = CorrectedModel::unshifted(p.model(), vec![-2.0, -2.0], vec![0.0, 0.0]).unwrap();
        let r = solve_subproblem(&m, 10.0, &SubproblemOptions::default()).unwrap();
        assert!(distance(&r.candidate, &[1.0, 1.0]) < 1e-6, "{r:?}");
        assert!(!r.cauchy_override);
    }

    #[test]
    fn subproblem_boundary_minimizer() {
        let p = problem("P1").unwrap();
        let m = CorrectedModel::unshifted(p.model(), vec![-2.0, -2.0], vec![0.0, 0.0]).unwrap();
        let r = solve_subproblem(&m, 0.5, &SubproblemOptions::default()).unwrap();
        let e = 0.5 / 2f64.sqrt();
        assert!(distance(&r.candidate, &[e, e]) < 1e-6, "{r:?}");
        assert!(norm2(&r.candidate) <= 0.5 + 1e-12);
    }

    #[test]
    fn stuck_descent_triggers_cauchy_override() {
        let p = problem("P1").unwrap();
        let m = CorrectedModel::unshifted(p.model(), vec![-2.0, -2.0], vec![0.0, 0.0]).unwrap();
        let opts = SubproblemOptions {
            budget: 1,
            descent_start: DescentStart::Anchor,
            ..Default::default()
        };
        let r = solve_subproblem(&m, 0.5, &opts).unwrap();
        assert!(r.cauchy_override);
        assert_eq!(r.candidate, r.cauchy_point);
    }

    #[test]
    fn anisotropic_quadratic_interior_solution() {
        let o = ScalarOracle::from_fns(
            2,
            |u| u[0] * u[0] + 10.0 * u[1] * u[1],
            |u| vec![2.0 * u[0], 20.0 * u[1]],
        );
        let m = CorrectedModel::unshifted(&o, vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let r = solve_subproblem(&m, 2.0, &SubproblemOptions::default()).unwrap();
        assert!(norm2(&r.candidate) < 1e-6, "{r:?}");
        assert!(r.model_decrease >= r.cauchy_decrease);
    }

    #[test]
    fn sufficient_decrease_examples() {
        let params = SufficientDecreaseParams::new(0.5, 2.0).unwrap();
        // m = u², anchor 1, radius 0.5, Cauchy point 0.5
        assert!(check_sufficient_decrease(1.0, 0.25, 2.0, 0.5, &params));
        assert!(check_sufficient_decrease(1.0, 1.0, 0.0, 0.5, &params));
        // decrease 0.1 against threshold 0.5
        assert!(!check_sufficient_decrease(1.0, 0.9, 2.0, 0.5, &params));
    }

    #[test]
    fn sufficient_decrease_params_validated() {
        assert!(SufficientDecreaseParams::new(0.0, 2.0).is_err());
        assert!(SufficientDecreaseParams::new(1.0, 2.0).is_err());
        assert!(SufficientDecreaseParams::new(0.1, 1.0).is_err());
    }

    #[test]
    fn beta_estimates() {
        let o = square();
        let m = CorrectedModel::unshifted(&o, vec![0.0], vec![1.0]).unwrap();
        assert!((estimate_beta(&m, 0.5).unwrap() - 2.0).abs() < 1e-6);

        let lin = ScalarOracle::from_fns(1, |u| 5.0 * u[0], |_| vec![5.0]);
        let m = CorrectedModel::unshifted(&lin, vec![0.0], vec![1.0]).unwrap();
        assert_eq!(estimate_beta(&m, 0.5).unwrap(), 1.0 + 1e-6);

        let p = problem("P2").unwrap();
        let m = CorrectedModel::unshifted(p.model(), vec![4.0], vec![1.0]).unwrap();
        assert!((estimate_beta(&m, 1.0).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn nonpositive_radius_rejected() {
        let o = square();
        let m = CorrectedModel::unshifted(&o, vec![0.0], vec![1.0]).unwrap();
        assert!(cauchy_point(&m, 0.0, &CauchySearch::default()).is_err());
        assert!(solve_subproblem(&m, -1.0, &SubproblemOptions::default()).is_err());
    }
}
