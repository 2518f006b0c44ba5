//! Numerical laboratory for the two-convex curvature flow with speed
//! `G_kappa = (sum_{i<j} 1/(lambda_i + lambda_j - 2 kappa))^{-1}` on rotationally
//! symmetric hypersurfaces of `R^{n+1}`, with monitors for its a-priori estimates and a
//! neck-surgery procedure.
//!
//! The curvature algebra is generic over [`Scalar`]; the aliases below fix the common
//! instantiations.

pub mod algebra;
pub mod flow;
pub mod geometry;
pub mod monitors;
pub mod scalar;
pub mod surgery;

pub use scalar::Scalar;

/// Double-precision spectrum used by the geometry and flow code.
pub type Spectrum = algebra::PrincipalSpectrum<f64>;
/// Single-precision spectrum.
pub type Spectrum32 = algebra::PrincipalSpectrum<f32>;
/// Exact rational spectrum for identity checks.
pub type ExactSpectrum = algebra::PrincipalSpectrum<num_rational::BigRational>;
/// Exact rational scalar.
pub type Exact = num_rational::BigRational;
