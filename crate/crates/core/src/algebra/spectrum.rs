use crate::algebra::AlgebraError;
use crate::scalar::Scalar;

/// Sorted principal curvatures together with the offset `kappa`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalSpectrum<T> {
    kappa: T,
    lambdas: Vec<T>,
}

impl<T: Scalar> PrincipalSpectrum<T> {
    /// Sorts `lambdas` ascending. Requires `n >= 3` and `kappa >= 0`.
    pub fn new(kappa: T, mut lambdas: Vec<T>) -> Result<Self, AlgebraError> {
        if lambdas.len() < 3 {
            return Err(AlgebraError::DimensionTooSmall(lambdas.len()));
        }
        if kappa < T::zero() {
            return Err(AlgebraError::NegativeKappa(kappa.to_f64_lossy()));
        }
        if lambdas.iter().any(|l| l.partial_cmp(l).is_none()) {
            return Err(AlgebraError::NonFinite);
        }
        lambdas.sort_by(|a, b| a.partial_cmp(b).expect("checked above"));
        Ok(Self { kappa, lambdas })
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn kappa(&self) -> &T {
        &self.kappa
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn smallest(&self) -> &T {
        &self.lambdas[0]
    }

    pub fn largest(&self) -> &T {
        &self.lambdas[self.dim() - 1]
    }

    /// `lambda_i + lambda_j - 2 kappa`.
    pub fn pair_gap(&self, i: usize, j: usize) -> T {
        let two_kappa = self.kappa.clone() + self.kappa.clone();
        self.lambdas[i].clone() + self.lambdas[j].clone() - two_kappa
    }

    /// Distance of the spectrum from the boundary of the two-convex cone.
    pub fn two_convex_margin(&self) -> T {
        self.pair_gap(0, 1)
    }

    /// `lambda_1 + lambda_2 > 2 kappa`, with the slack of the scalar type.
    pub fn is_two_convex(&self) -> bool {
        let largest = self.largest().clone();
        self.two_convex_margin() > T::admissibility_slack(&largest)
    }

    pub(crate) fn require_two_convex(&self) -> Result<(), AlgebraError> {
        if self.is_two_convex() {
            Ok(())
        } else {
            Err(AlgebraError::TwoConvexityViolated {
                margin: self.two_convex_margin().to_f64_lossy(),
            })
        }
    }

    /// `H = sum lambda_i`.
    pub fn mean_curvature(&self) -> T {
        self.lambdas
            .iter()
            .fold(T::zero(), |acc, l| acc + l.clone())
    }

    /// The spectrum `kappa + c (lambda - kappa)`.
    pub fn shifted_scale(&self, c: T) -> Self {
        let lambdas = self
            .lambdas
            .iter()
            .map(|l| self.kappa.clone() + c.clone() * (l.clone() - self.kappa.clone()))
            .collect();
        Self::new(self.kappa.clone(), lambdas).expect("scaling preserves the invariants")
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PrincipalSpectrum<U> {
        PrincipalSpectrum::new(f(&self.kappa), self.lambdas.iter().map(f).collect())
            .expect("mapped spectrum stays valid")
    }
}

impl PrincipalSpectrum<f64> {
    /// Cylinder-type spectrum `(lambda_1, lambda_rot, ..., lambda_rot)` of a surface of
    /// revolution in `R^{n+1}`.
    pub fn rotational(
        n: usize,
        kappa: f64,
        lambda_profile: f64,
        lambda_rot: f64,
    ) -> Result<Self, AlgebraError> {
        let mut lambdas = vec![lambda_rot; n];
        lambdas[0] = lambda_profile;
        Self::new(kappa, lambdas)
    }
}
