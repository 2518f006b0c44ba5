//! Neck detection, the standard bend-and-cap surgery on a profile, and the surgically
//! modified flow.

mod detect;
mod run;
mod standard;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;

pub use detect::{detect_necks, NeckCandidate};
pub use run::{surgically_modified_run, Component, Event, Fate, SurgeryRun};
pub use standard::{
    standard_surgery, CapPoint, Classification, ComponentSummary, MatchedPoint, SurgeryOutcome,
    SurgeryReport, SurgeryVerdicts,
};

/// Neck-coordinate offset of the bent region, as in the classical construction.
pub const LAMBDA: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgeryParams {
    /// Bending exponent in `u(z) = r0 exp(-B / (z - Lambda))`.
    pub b: f64,
    pub tau0: f64,
    /// Surgery scale `G_*`.
    pub g_star: f64,
    /// Neck closeness: `|r - r0| <= epsilon0 r0` and `|r'| <= epsilon0`.
    pub epsilon0: f64,
    /// Minimal normalized neck length (arc length over `r0`).
    pub l0: f64,
    /// Neck points need `lambda_1 / G <= eta0`.
    pub eta0: f64,
    /// `delta` values of the pinching verdicts.
    pub delta_grid: Vec<f64>,
    pub sigma: f64,
}

impl Default for SurgeryParams {
    fn default() -> Self {
        Self {
            b: 50.0,
            tau0: 0.05,
            g_star: 1.0,
            epsilon0: 0.02,
            l0: 10.0,
            eta0: 0.1,
            delta_grid: vec![0.0, 0.1, 1.0],
            sigma: 0.1,
        }
    }
}

impl SurgeryParams {
    pub fn validate(&self) -> Result<(), SurgeryError> {
        let bad = |m: &'static str| Err(SurgeryError::InvalidParams(m));
        if !(self.b > 0.0) {
            return bad("B must be positive");
        }
        if !(self.tau0 >= 0.0 && self.tau0 < 1.0) {
            return bad("tau0 must lie in [0, 1)");
        }
        if !(self.g_star > 0.0) {
            return bad("G_star must be positive");
        }
        if !(self.epsilon0 > 0.0 && self.l0 > 0.0 && self.eta0 > 0.0) {
            return bad("epsilon0, L0 and eta0 must be positive");
        }
        if self.delta_grid.iter().any(|d| !(*d >= 0.0)) {
            return bad("delta values must be non-negative");
        }
        if !(self.sigma > 0.0 && self.sigma < 0.5) {
            return bad("sigma must lie in (0, 1/2)");
        }
        Ok(())
    }

    /// The bend profile `u(z)` in neck coordinates, for a neck of radius `r0`.
    pub fn u(&self, r0: f64, z: f64) -> f64 {
        let w = z - LAMBDA;
        if w <= 0.0 {
            0.0
        } else {
            r0 * (-self.b / w).exp()
        }
    }

    /// `du/dz` and `d^2u/dz^2` in neck coordinates.
    pub fn u_derivatives(&self, r0: f64, z: f64) -> (f64, f64) {
        let w = z - LAMBDA;
        if w <= 0.0 {
            return (0.0, 0.0);
        }
        let e = r0 * (-self.b / w).exp();
        let b = self.b;
        (e * b / (w * w), e * b * (b - 2.0 * w) / w.powi(4))
    }
}

#[derive(Debug, Error)]
pub enum SurgeryError {
    #[error("invalid surgery parameters: {0}")]
    InvalidParams(&'static str),
    #[error("neck of normalized length {length:.3} is too short for the bend and cap")]
    NeckTooShort { length: f64 },
    #[error("surgery verdicts failed: {0}")]
    MonotonicityViolated(String, Box<SurgeryOutcome>),
    #[error("curvature threshold hit at t = {t} without a neck to cut")]
    NoNeckAtThreshold { t: f64 },
    #[error("surgery produced an invalid component: {0}")]
    InvalidComponent(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Flow(#[from] crate::flow::FlowError),
}
