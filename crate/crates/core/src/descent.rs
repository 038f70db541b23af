//! Projected-gradient descent with Armijo backtracking and spectral steps.

use crate::error::Result;
use crate::linalg::{axpy, dot, norm2, sub};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-30;
const MAX_STEP: f64 = 1e30;

#[derive(Debug, Clone)]
pub(crate) struct DescentOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Value evaluations spent, including the start point.
    pub evaluations: usize,
    pub stationary: bool,
}

/// Minimizes `value` over the set described by `project`.
///
/// Stops when the unit-step projected gradient has norm at most `tolerance`,
/// when `budget` value evaluations are used, or when backtracking stalls.
pub(crate) fn projected_gradient<V, G, P>(
    mut value: V,
    mut gradient: G,
    project: P,
    start: &[f64],
    initial_step: f64,
    budget: usize,
    tolerance: f64,
) -> Result<DescentOutcome>
where
    V: FnMut(&[f64]) -> Result<f64>,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
    P: Fn(&mut [f64]),
{
    let mut x = start.to_vec();
    project(&mut x);
    let mut fx = value(&x)?;
    let mut g = gradient(&x)?;
    let mut evaluations = 1;
    let mut step = initial_step.clamp(MIN_STEP, MAX_STEP);
    let mut stationary = false;

    loop {
        let mut probe = sub(&x, &g);
        project(&mut probe);
        if norm2(&sub(&probe, &x)) <= tolerance {
            stationary = true;
            break;
        }
        if evaluations >= budget || step < MIN_STEP {
            break;
        }
        let mut trial = axpy(&x, -step, &g);
        project(&mut trial);
        let d = sub(&trial, &x);
        if d.iter().all(|c| *c == 0.0) {
            step *= 0.5;
            continue;
        }
        let ft = value(&trial)?;
        evaluations += 1;
        if ft <= fx + ARMIJO * dot(&g, &d) {
            let gt = gradient(&trial)?;
            let y = sub(&gt, &g);
            let sy = dot(&d, &y);
            step = if sy > 0.0 { dot(&d, &d) / sy } else { 2.0 * step };
            step = step.clamp(MIN_STEP, MAX_STEP);
            x = trial;
            fx = ft;
            g = gt;
        } else {
            step *= 0.5;
        }
    }

    Ok(DescentOutcome {
        point: x,
        value: fx,
        gradient: g,
        evaluations,
        stationary,
    })
}

/// Projection onto the closed Euclidean ball.
pub(crate) fn ball_projection(centre: &[f64], radius: f64) -> impl Fn(&mut [f64]) + '_ {
    move |x: &mut [f64]| {
        let r = crate::linalg::distance(x, centre);
        if r > radius {
            let scale = radius / r;
            for (xi, ci) in x.iter_mut().zip(centre) {
                *xi = ci + (*xi - ci) * scale;
            }
        }
    }
}

/// Projection onto the box `[lo, hi]^n`.
pub(crate) fn box_projection(lo: f64, hi: f64) -> impl Fn(&mut [f64]) {
    move |x: &mut [f64]| {
        for xi in x.iter_mut() {
            *xi = xi.clamp(lo, hi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_anisotropic_quadratic() {
        let out = projected_gradient(
            |x| Ok(x[0] * x[0] + 10.0 * x[1] * x[1]),
            |x| Ok(vec![2.0 * x[0], 20.0 * x[1]]),
            |_: &mut [f64]| {},
            &[3.0, -2.0],
            0.1,
            500,
            1e-12,
        )
        .unwrap();
        assert!(out.stationary);
        assert!(norm2(&out.point) < 1e-10, "{:?}", out.point);
    }

    #[test]
    fn respects_ball() {
        let centre = [0.0, 0.0];
        let proj = ball_projection(&centre, 1.0);
        let out = projected_gradient(
            |x| Ok((x[0] - 3.0).powi(2) + (x[1] - 4.0).powi(2)),
            |x| Ok(vec![2.0 * (x[0] - 3.0), 2.0 * (x[1] - 4.0)]),
            proj,
            &[0.0, 0.0],
            1.0,
            200,
            1e-12,
        )
        .unwrap();
        assert!((out.point[0] - 0.6).abs() < 1e-9 && (out.point[1] - 0.8).abs() < 1e-9, "{:?}", out.point);
    }

    #[test]
    fn budget_of_one_does_not_move() {
        let out = projected_gradient(
            |x| Ok(x[0] * x[0]),
            |x| Ok(vec![2.0 * x[0]]),
            |_: &mut [f64]| {},
            &[1.0],
            0.25,
            1,
            0.0,
        )
        .unwrap();
        assert_eq!(out.point, vec![1.0]);
        assert_eq!(out.evaluations, 1);
    }

    #[test]
    fn box_projection_clamps() {
        let p = box_projection(-1.0, 1.0);
        let mut x = [2.0, -3.0, 0.5];
        p(&mut x);
        assert_eq!(x, [1.0, -1.0, 0.5]);
    }
}
