use crate::algebra::{AlgebraError, PrincipalSpectrum};
use crate::scalar::Scalar;

/// Value and first derivatives of the speed at one spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeedDerivatives<T> {
    /// `G_kappa`.
    pub value: T,
    /// `dG/dh_ij`, row-major `n x n`, in the frame the input was given in.
    pub gradient: Vec<T>,
    /// `gamma_i = dG/dlambda_i`.
    pub eigen_gradient: Vec<T>,
}

impl<T: Scalar> SpeedDerivatives<T> {
    pub fn dim(&self) -> usize {
        self.eigen_gradient.len()
    }

    /// Entry `(i, j)` of the matrix gradient.
    pub fn gradient_at(&self, i: usize, j: usize) -> &T {
        &self.gradient[i * self.dim() + j]
    }

    /// `sum_i gamma_i`, the trace of the linearized operator.
    pub fn trace(&self) -> T {
        self.eigen_gradient
            .iter()
            .fold(T::zero(), |acc, g| acc + g.clone())
    }
}

/// `sum_{i<j} 1 / (lambda_i + lambda_j - 2 kappa)` without the admissibility check.
pub(crate) fn inverse_pair_sum<T: Scalar>(s: &PrincipalSpectrum<T>) -> T {
    let n = s.dim();
    let mut sum = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            sum += T::one() / s.pair_gap(i, j);
        }
    }
    sum
}

/// `G_kappa = (sum_{i<j} 1/(lambda_i + lambda_j - 2 kappa))^{-1}`.
pub fn eval_speed<T: Scalar>(s: &PrincipalSpectrum<T>) -> Result<T, AlgebraError> {
    s.require_two_convex()?;
    Ok(T::one() / inverse_pair_sum(s))
}

/// Speed and its gradient. In the eigenbasis the gradient is diagonal with entries
/// `gamma_i = G^2 sum_{j != i} (lambda_i + lambda_j - 2 kappa)^{-2}`.
pub fn eval_derivatives<T: Scalar>(
    s: &PrincipalSpectrum<T>,
) -> Result<SpeedDerivatives<T>, AlgebraError> {
    let g = eval_speed(s)?;
    let n = s.dim();
    let g2 = g.clone() * g.clone();
    let eigen_gradient: Vec<T> = (0..n)
        .map(|i| {
            let mut acc = T::zero();
            for j in (0..n).filter(|&j| j != i) {
                let p = s.pair_gap(i, j);
                acc += T::one() / (p.clone() * p);
            }
            g2.clone() * acc
        })
        .collect();
    let mut gradient = vec![T::zero(); n * n];
    for (i, gamma) in eigen_gradient.iter().enumerate() {
        gradient[i * n + i] = gamma.clone();
    }
    Ok(SpeedDerivatives {
        value: g,
        gradient,
        eigen_gradient,
    })
}

/// Bound on `gamma_i` for a spectrum in the cone: each `gamma_i <= 1`, because
/// `G <= p` for every pair gap `p`, so `G^2 sum_j p_ij^{-2} <= G^2 (sum_j p_ij^{-1})^2 <= 1`.
pub const GRADIENT_ENTRY_BOUND: f64 = 1.0;

/// Bound on `sum_i gamma_i = 2 G^2 sum_{i<j} p_ij^{-2} <= 2 G^2 (sum_{i<j} p_ij^{-1})^2 = 2`.
pub const GRADIENT_TRACE_BOUND: f64 = 2.0;
