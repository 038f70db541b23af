//! Acceptance ratio, candidate acceptance and radius update.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model decreases at or below this are treated as no predicted decrease.
pub const DEFAULT_RHO_DEGENERACY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrustRegionConstants {
    pub eta1: f64,
    pub eta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Growth factor applied on very successful steps, > 1.
    pub expansion: f64,
    /// Contraction factor applied on failed steps, within `[gamma1, gamma2]`.
    pub shrink: f64,
    /// `None` leaves the radius unbounded.
    pub radius_max: Option<f64>,
}

impl Default for TrustRegionConstants {
    fn default() -> Self {
        Self {
            eta1: 0.1,
            eta2: 0.9,
            gamma1: 0.5,
            gamma2: 0.5,
            expansion: 2.0,
            shrink: 0.5,
            radius_max: None,
        }
    }
}

impl TrustRegionConstants {
    pub fn validate(&self) -> Result<()> {
        let eta_msg = || format!("require 0 < eta1 <= eta2 < 1, got eta1 = {}, eta2 = {}", self.eta1, self.eta2);
        if !(self.eta1 > 0.0 && self.eta1 <= self.eta2) {
            return Err(Error::invalid("eta1", eta_msg()));
        }
        if self.eta2 >= 1.0 {
            return Err(Error::invalid("eta2", eta_msg()));
        }
        let gamma_msg = || {
            format!(
                "require 0 < gamma1 <= gamma2 < 1, got gamma1 = {}, gamma2 = {}",
                self.gamma1, self.gamma2
            )
        };
        if !(self.gamma1 > 0.0 && self.gamma1 <= self.gamma2) {
            return Err(Error::invalid("gamma1", gamma_msg()));
        }
        if self.gamma2 >= 1.0 {
            return Err(Error::invalid("gamma2", gamma_msg()));
        }
        if !(self.expansion > 1.0 && self.expansion.is_finite()) {
            return Err(Error::invalid("expansion", "must be a finite value > 1"));
        }
        if !(self.gamma1 <= self.shrink && self.shrink <= self.gamma2) {
            return Err(Error::invalid("shrink", "must lie within [gamma1, gamma2]"));
        }
        if let Some(max) = self.radius_max {
            if max.is_nan() || max <= 0.0 {
                return Err(Error::invalid("radius_max", "must be positive"));
            }
        }
        Ok(())
    }
}

/// Achieved-over-predicted decrease ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho {
    Ratio(f64),
    /// The model predicted no decrease; counts as a failed step.
    Degenerate,
}

impl Rho {
    pub fn ratio(self) -> Option<f64> {
        match self {
            Rho::Ratio(r) => Some(r),
            Rho::Degenerate => None,
        }
    }

    fn at_least(self, threshold: f64) -> bool {
        matches!(self, Rho::Ratio(r) if r >= threshold)
    }
}

impl fmt::Display for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rho::Ratio(r) => write!(f, "{r}"),
            Rho::Degenerate => f.write_str("degenerate"),
        }
    }
}

impl Serialize for Rho {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rho::Ratio(r) => s.serialize_f64(*r),
            Rho::Degenerate => s.serialize_str("degenerate"),
        }
    }
}

impl<'de> Deserialize<'de> for Rho {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct RhoVisitor;

        impl Visitor<'_> for RhoVisitor {
            type Value = Rho;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"degenerate\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rho, E> {
                Ok(Rho::Ratio(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rho, E> {
                Ok(Rho::Ratio(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rho, E> {
                Ok(Rho::Ratio(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rho, E> {
                match v {
                    "degenerate" => Ok(Rho::Degenerate),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(RhoVisitor)
    }
}

pub fn compute_rho(plant_ref: f64, plant_cand: f64, model_ref: f64, model_cand: f64) -> Rho {
    compute_rho_with_threshold(plant_ref, plant_cand, model_ref, model_cand, DEFAULT_RHO_DEGENERACY)
}

pub fn compute_rho_with_threshold(
    plant_ref: f64,
    plant_cand: f64,
    model_ref: f64,
    model_cand: f64,
    threshold: f64,
) -> Rho {
    let predicted = model_ref - model_cand;
    if predicted.is_nan() || predicted <= threshold {
        return Rho::Degenerate;
    }
    Rho::Ratio((plant_ref - plant_cand) / predicted)
}

/// Reference iterate, its measured plant value and the current radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustRegionState {
    pub reference: Vec<f64>,
    pub reference_value: f64,
    pub radius: f64,
    pub iteration: usize,
}

impl TrustRegionState {
    pub fn new(reference: Vec<f64>, reference_value: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("delta0", "initial radius must be positive and finite"));
        }
        Ok(Self {
            reference,
            reference_value,
            radius,
            iteration: 0,
        })
    }
}

/// Moves the reference to `candidate` iff `rho >= eta1`. Returns whether it moved.
pub fn accept_candidate(
    state: &mut TrustRegionState,
    candidate: &[f64],
    candidate_value: f64,
    rho: Rho,
    constants: &TrustRegionConstants,
) -> bool {
    let accepted = rho.at_least(constants.eta1);
    if accepted {
        state.reference.clear();
        state.reference.extend_from_slice(candidate);
        state.reference_value = candidate_value;
    }
    accepted
}

pub fn update_radius(radius: f64, rho: Rho, constants: &TrustRegionConstants) -> f64 {
    if rho.at_least(constants.eta2) {
        let grown = constants.expansion * radius;
        match constants.radius_max {
            Some(max) => grown.min(max).max(radius),
            None => grown,
        }
    } else if rho.at_least(constants.eta1) {
        radius
    } else {
        constants.shrink * radius
    }
}
