//! Cylindrical pinching quantities and the algebraic inequality linking
//! `lambda_1` to the excess `c_n G - H`.

use num_traits::Float;

use crate::algebra::{eval_speed, AlgebraError, PrincipalSpectrum};
use crate::scalar::Scalar;

/// `c_n = (n-1)^2 (n+2) / 4`, the ratio `H / G` on a round cylinder.
pub fn cylindrical_constant<T: Scalar>(n: usize) -> T {
    let n = n as i64;
    T::from_int((n - 1) * (n - 1) * (n + 2)) / T::from_int(4)
}

/// `H / G` on a round sphere, `n^2 (n-1) / 4`.
pub fn sphere_ratio<T: Scalar>(n: usize) -> T {
    let n = n as i64;
    T::from_int(n * n * (n - 1)) / T::from_int(4)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylindricalQuantities<T> {
    pub mean_curvature: T,
    pub speed: T,
    /// `G^{sigma-1} (H - c_n (1 + delta) G)`.
    pub f_sigma: T,
    /// `max(f_sigma, 0)`.
    pub f_sigma_plus: T,
}

/// `H`, `G_kappa`, and the pinching quantity `f_sigma` at one spectrum.
pub fn cylindrical_quantities<T: Scalar + Float>(
    s: &PrincipalSpectrum<T>,
    sigma: T,
    delta: T,
) -> Result<CylindricalQuantities<T>, AlgebraError> {
    if !(sigma > T::zero() && sigma < T::from_f64(0.5).unwrap()) {
        return Err(AlgebraError::ParameterOutOfRange(
            "sigma must lie in (0, 1/2)",
        ));
    }
    if !(delta >= T::zero()) {
        return Err(AlgebraError::ParameterOutOfRange(
            "delta must be nonnegative",
        ));
    }
    let g = eval_speed(s)?;
    let h = s.mean_curvature();
    let excess = if delta.is_infinite() {
        T::neg_infinity()
    } else {
        h - cylindrical_constant::<T>(s.dim()) * (T::one() + delta) * g
    };
    let f = g.powf(sigma - T::one()) * excess;
    Ok(CylindricalQuantities {
        mean_curvature: h,
        speed: g,
        f_sigma: f,
        f_sigma_plus: f.max(T::zero()),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PinchingCheck<T> {
    /// `3(n-2)/(n+2) lambda_1`.
    pub lhs: T,
    /// `c_n G - H + (n-1)(n+6)/(n+2) kappa`.
    pub rhs: T,
    pub holds: bool,
}

/// Checks `3(n-2)/(n+2) lambda_1 >= c_n G - H + (n-1)(n+6)/(n+2) kappa`.
pub fn check_pinching_inequality<T: Scalar>(
    s: &PrincipalSpectrum<T>,
) -> Result<PinchingCheck<T>, AlgebraError> {
    let g = eval_speed(s)?;
    let n = s.dim() as i64;
    let lhs = T::from_int(3 * (n - 2)) / T::from_int(n + 2) * s.smallest().clone();
    let rhs = cylindrical_constant::<T>(s.dim()) * g - s.mean_curvature()
        + T::from_int((n - 1) * (n + 6)) / T::from_int(n + 2) * s.kappa().clone();
    let scale = T::max_of(T::max_of(T::one(), lhs.abs()), rhs.abs());
    let holds = lhs >= rhs.clone() - T::comparison_slack(&scale);
    Ok(PinchingCheck { lhs, rhs, holds })
}
