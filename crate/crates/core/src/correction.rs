//! First-order model correction.
//!
//! The corrected model adds a linear term to the nominal model so that its
//! gradient matches the measured plant gradient at an anchor point:
//!
//! ```text
//! unshifted:  m(u) = φ̂(u) + λᵀu
//! shifted:    m(u) = φ̂(u) + [φp(u*) − φ̂(u*)] + λᵀ(u − u*)
//! ```
//!
//! The two forms differ by a constant. Trust-region machinery only ever
//! consumes value differences, so [`CorrectedModel::offset`] evaluates
//! `m(u) − m(u*)` without forming that constant and the iterates do not
//! depend on the chosen form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add, dot, sub};
use crate::problem::ScalarOracle;

/// `λ = ∇φp − ∇φ̂`
pub fn compute_modifiers(plant_grad: &[f64], model_grad: &[f64]) -> Result<Vec<f64>> {
    if plant_grad.len() != model_grad.len() {
        return Err(Error::DimensionMismatch {
            expected: plant_grad.len(),
            actual: model_grad.len(),
        });
    }
    Ok(sub(plant_grad, model_grad))
}

/// Exponential filter `α·raw + (1 − α)·previous`.
pub fn filter_modifiers(raw_difference: &[f64], previous: &[f64], alpha: f64) -> Result<Vec<f64>> {
    validate_gain(alpha)?;
    if raw_difference.len() != previous.len() {
        return Err(Error::DimensionMismatch {
            expected: raw_difference.len(),
            actual: previous.len(),
        });
    }
    if alpha == 1.0 {
        return Ok(raw_difference.to_vec());
    }
    Ok(raw_difference
        .iter()
        .zip(previous)
        .map(|(r, p)| alpha * r + (1.0 - alpha) * p)
        .collect())
}

pub(crate) fn validate_gain(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("alpha", format!("filter gain {alpha} outside (0, 1]")))
    }
}

/// Filtered modifier state carried across iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Modifiers {
    lambda: Vec<f64>,
    gain: f64,
}

impl Modifiers {
    /// Starts from `λ₋₁ = 0`.
    pub fn new(dim: usize, gain: f64) -> Result<Self> {
        Self::with_initial(vec![0.0; dim], gain)
    }

    pub fn with_initial(initial: Vec<f64>, gain: f64) -> Result<Self> {
        validate_gain(gain)?;
        if initial.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("initial_modifiers", "must be finite"));
        }
        Ok(Self { lambda: initial, gain })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Most recent λ (λ₋₁ before the first update).
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Advances the filter with a fresh gradient difference and returns λₖ.
    pub fn update(&mut self, raw_difference: &[f64]) -> Result<&[f64]> {
        self.lambda = filter_modifiers(raw_difference, &self.lambda, self.gain)?;
        Ok(&self.lambda)
    }
}

/// Which constant the corrected model carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelForm {
    #[default]
    Unshifted,
    Shifted,
}

/// Nominal model plus linear correction, anchored at the reference point.
#[derive(Debug)]
pub struct CorrectedModel<'a> {
    base: &'a ScalarOracle,
    lambda: Vec<f64>,
    anchor: Vec<f64>,
    base_at_anchor: f64,
    form: ModelForm,
    plant_value_at_anchor: Option<f64>,
}

impl<'a> CorrectedModel<'a> {
    /// `φ̂(u) + λᵀu`
    pub fn unshifted(base: &'a ScalarOracle, lambda: Vec<f64>, anchor: Vec<f64>) -> Result<Self> {
        Self::with_form(base, lambda, anchor, ModelForm::Unshifted, None)
    }

    /// Form that also matches the plant value at the anchor.
    pub fn shifted(
        base: &'a ScalarOracle,
        lambda: Vec<f64>,
        anchor: Vec<f64>,
        plant_value_at_anchor: f64,
    ) -> Result<Self> {
        Self::with_form(base, lambda, anchor, ModelForm::Shifted, Some(plant_value_at_anchor))
    }

    pub fn with_form(
        base: &'a ScalarOracle,
        lambda: Vec<f64>,
        anchor: Vec<f64>,
        form: ModelForm,
        plant_value_at_anchor: Option<f64>,
    ) -> Result<Self> {
        for v in [&lambda, &anchor] {
            if v.len() != base.dim() {
                return Err(Error::DimensionMismatch {
                    expected: base.dim(),
                    actual: v.len(),
                });
            }
        }
        if lambda.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("modifiers", "must be finite"));
        }
        if form == ModelForm::Shifted && plant_value_at_anchor.is_none() {
            return Err(Error::invalid(
                "plant_value_at_anchor",
                "required by the shifted model form",
            ));
        }
        let base_at_anchor = base.value(&anchor)?;
        Ok(Self {
            base,
            lambda,
            anchor,
            base_at_anchor,
            form,
            plant_value_at_anchor,
        })
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn form(&self) -> ModelForm {
        self.form
    }

    pub fn value(&self, u: &[f64]) -> Result<f64> {
        match (self.form, self.plant_value_at_anchor) {
            (ModelForm::Shifted, Some(plant_ref)) => Ok(plant_ref + self.offset(u)?),
            _ => Ok(self.base.value(u)? + dot(&self.lambda, u)),
        }
    }

    /// `m(u) − m(u*)`, identical under both forms.
    pub fn offset(&self, u: &[f64]) -> Result<f64> {
        let base = self.base.value(u)?;
        let step = sub(u, &self.anchor);
        Ok((base - self.base_at_anchor) + dot(&self.lambda, &step))
    }

    pub fn gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(add(&self.base.gradient(u)?, &self.lambda))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::problem;

    #[test]
    fn perfect_model_needs_no_correction() {
        assert_eq!(compute_modifiers(&[5.0, -3.0], &[5.0, -3.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn p1_modifiers_at_origin() {
        let p = problem("P1").unwrap();
        let lambda = compute_modifiers(
            &p.plant_gradient(&[0.0, 0.0]).unwrap(),
            &p.model_gradient(&[0.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(lambda, vec![-2.0, -2.0]);
    }

    #[test]
    fn shifted_parabola_modifier() {
        // plant u², model (u − 1)², at u = 0: 0 − (−2)
        assert_eq!(compute_modifiers(&[0.0], &[-2.0]).unwrap(), vec![2.0]);
        assert!(compute_modifiers(&[0.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn filter_unit_gain_is_identity() {
        assert_eq!(filter_modifiers(&[1.5, -2.0], &[9.0, 9.0], 1.0).unwrap(), vec![1.5, -2.0]);
        assert_eq!(filter_modifiers(&[2.0], &[0.0], 0.5).unwrap(), vec![1.0]);
    }

    #[test]
    fn filter_gain_outside_range_rejected() {
        for alpha in [0.0, -0.1, 1.0000001, f64::NAN] {
            assert!(filter_modifiers(&[1.0], &[0.0], alpha).is_err(), "{alpha}");
        }
    }

    #[test]
    fn filtered_modifier_follows_geometric_series() {
        let (alpha, c) = (0.5, 2.0);
        let mut m = Modifiers::new(1, alpha).unwrap();
        for _ in 0..=3 {
            m.update(&[c]).unwrap();
        }
        // c·(1 − (1 − α)^{k+1}) with k = 3
        assert_eq!(m.lambda(), &[1.875]);
    }

    #[test]
    fn corrected_values_on_p1() {
        let p = problem("P1").unwrap();
        let unshifted = CorrectedModel::unshifted(p.model(), vec![-2.0, -2.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(unshifted.value(&[1.0, 1.0]).unwrap(), -2.0);
        let shifted = CorrectedModel::shifted(p.model(), vec![-2.0, -2.0], vec![0.0, 0.0], 2.0).unwrap();
        assert_eq!(shifted.value(&[0.0, 0.0]).unwrap(), 2.0);

        let (a, b) = ([1.0, 1.0], [0.0, 0.0]);
        let du = unshifted.value(&a).unwrap() - unshifted.value(&b).unwrap();
        let ds = shifted.value(&a).unwrap() - shifted.value(&b).unwrap();
        assert_eq!(du, -2.0);
        assert_eq!(ds, du);
    }

    #[test]
    fn shifted_form_requires_plant_value() {
        let p = problem("P1").unwrap();
        let r = CorrectedModel::with_form(p.model(), vec![0.0; 2], vec![0.0; 2], ModelForm::Shifted, None);
        assert!(matches!(r, Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn corrected_gradient_matches_plant_at_anchor() {
        let p = problem("P1").unwrap();
        let cm = CorrectedModel::unshifted(p.model(), vec![-2.0, -2.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(cm.gradient(&[0.0, 0.0]).unwrap(), vec![-2.0, -2.0]);

        let zero = CorrectedModel::unshifted(p.model(), vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        for u in [[0.3, -1.0], [4.0, 2.0]] {
            assert_eq!(zero.gradient(&u).unwrap(), p.model_gradient(&u).unwrap());
        }

        let p2 = problem("P2").unwrap();
        let lambda = compute_modifiers(
            &p2.plant_gradient(&[1.0]).unwrap(),
            &p2.model_gradient(&[1.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(lambda, vec![4.0]);
        let cm = CorrectedModel::unshifted(p2.model(), lambda, vec![1.0]).unwrap();
        assert_eq!(cm.gradient(&[1.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn dimension_checked_on_construction() {
        let p = problem("P1").unwrap();
        assert!(CorrectedModel::unshifted(p.model(), vec![0.0], vec![0.0, 0.0]).is_err());
        assert!(CorrectedModel::unshifted(p.model(), vec![0.0; 2], vec![0.0; 3]).is_err());
    }
}
