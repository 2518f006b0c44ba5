//! Exact evaluation of the speed `G_kappa`, its first and second variations, and the
//! algebraic inequalities it satisfies on the two-convex cone.

mod pinching;
pub mod sampling;
mod spectrum;
mod speed;
mod structure;
mod variation;
pub mod verify;

pub use pinching::{
    check_pinching_inequality, cylindrical_constant, cylindrical_quantities, sphere_ratio,
    CylindricalQuantities, PinchingCheck,
};
pub use spectrum::PrincipalSpectrum;
pub use speed::{
    eval_derivatives, eval_speed, SpeedDerivatives, GRADIENT_ENTRY_BOUND, GRADIENT_TRACE_BOUND,
};
pub use structure::{
    check_structure_conditions, ConditionResult, StructureReport, MONOTONICITY_CONSTANT,
};
pub use variation::{
    eval_second_variation, second_variation_in_eigenbasis, EigenFrame, ShapeOperator,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("spectrum left the two-convex cone (lambda_1 + lambda_2 - 2 kappa = {margin})")]
    TwoConvexityViolated { margin: f64 },
    #[error("dimension {0} is below 3")]
    DimensionTooSmall(usize),
    #[error("kappa must be nonnegative, got {0}")]
    NegativeKappa(f64),
    #[error("non-finite curvature value")]
    NonFinite,
    #[error("matrix is not square ({0} x {1})")]
    NotSquare(usize, usize),
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("{0}")]
    ParameterOutOfRange(&'static str),
}
