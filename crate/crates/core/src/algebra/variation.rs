use nalgebra::{DMatrix, SymmetricEigen};

use crate::algebra::speed::inverse_pair_sum;
use crate::algebra::{eval_derivatives, AlgebraError, PrincipalSpectrum, SpeedDerivatives};
use crate::scalar::Scalar;

/// Second fundamental form in an orthonormal frame (`g = identity`).
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeOperator {
    h: DMatrix<f64>,
}

/// Eigen-decomposition of a [`ShapeOperator`], eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigenFrame {
    pub spectrum: PrincipalSpectrum<f64>,
    /// Columns are the eigenvectors, ordered like the spectrum.
    pub basis: DMatrix<f64>,
}

const SYMMETRY_TOL: f64 = 1e-12;

pub(crate) fn check_symmetric(m: &DMatrix<f64>) -> Result<(), AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NotSquare(m.nrows(), m.ncols()));
    }
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(AlgebraError::NotSymmetric { row: i, col: j });
            }
        }
    }
    Ok(())
}

impl ShapeOperator {
    pub fn new(h: DMatrix<f64>) -> Result<Self, AlgebraError> {
        check_symmetric(&h)?;
        if h.nrows() < 3 {
            return Err(AlgebraError::DimensionTooSmall(h.nrows()));
        }
        Ok(Self { h })
    }

    pub fn from_spectrum(s: &PrincipalSpectrum<f64>) -> Self {
        Self {
            h: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(s.lambdas())),
        }
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn eigen(&self, kappa: f64) -> Result<EigenFrame, AlgebraError> {
        let eig = SymmetricEigen::new(self.h.clone());
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lambdas = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let basis = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(EigenFrame {
            spectrum: PrincipalSpectrum::new(kappa, lambdas)?,
            basis,
        })
    }

    /// `G_kappa(h)`.
    pub fn speed(&self, kappa: f64) -> Result<f64, AlgebraError> {
        crate::algebra::eval_speed(&self.eigen(kappa)?.spectrum)
    }

    /// Derivatives with the matrix gradient rotated back into this frame.
    pub fn derivatives(&self, kappa: f64) -> Result<SpeedDerivatives<f64>, AlgebraError> {
        let frame = self.eigen(kappa)?;
        let mut d = eval_derivatives(&frame.spectrum)?;
        let n = self.dim();
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&d.eigen_gradient));
        let grad = &frame.basis * diag * frame.basis.transpose();
        d.gradient = (0..n * n).map(|k| grad[(k / n, k % n)]).collect();
        Ok(d)
    }
}

/// `d^2/ds^2 G_kappa(h + sA)` at `s = 0`, with `A` already expressed in the eigenbasis
/// of `h` (row-major `n x n`).
///
/// The off-diagonal coefficients only involve the pair gaps, never differences of
/// eigenvalues, so repeated eigenvalues need no special handling.
pub fn second_variation_in_eigenbasis<T: Scalar>(
    s: &PrincipalSpectrum<T>,
    a: &[T],
) -> Result<T, AlgebraError> {
    s.require_two_convex()?;
    let n = s.dim();
    if a.len() != n * n {
        return Err(AlgebraError::NotSquare(a.len(), n));
    }
    let at = |i: usize, j: usize| a[i * n + j].clone();
    let g = T::one() / inverse_pair_sum(s);
    let g2 = g.clone() * g.clone();
    let g3 = g2.clone() * g.clone();
    let two = T::from_int(2);

    let mut off_diagonal = T::zero();
    for i in 0..n {
        for l in (0..n).filter(|&l| l != i) {
            let a_il = at(i, l);
            if a_il.is_zero() {
                continue;
            }
            let mut coeff = T::zero();
            for j in (0..n).filter(|&j| j != i && j != l) {
                let pij = s.pair_gap(i, j);
                let plj = s.pair_gap(l, j);
                coeff += (T::one() / pij.clone() + T::one() / plj.clone()) / (pij * plj);
            }
            off_diagonal += coeff * a_il.clone() * a_il;
        }
    }

    let mut cubic = T::zero();
    let mut linear = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let p = s.pair_gap(i, j);
            let d = at(i, i) + at(j, j);
            let p2 = p.clone() * p.clone();
            cubic += d.clone() * d.clone() / (p2.clone() * p);
            linear += d / p2;
        }
    }

    Ok(
        -(g2.clone() * off_diagonal) - two.clone() * g2 * cubic
            + two * g3 * linear.clone() * linear,
    )
}

/// `d^2/ds^2 G_kappa(h + sA)` at `s = 0` for symmetric `h`, `A` in a common frame.
pub fn eval_second_variation(
    h: &ShapeOperator,
    a: &DMatrix<f64>,
    kappa: f64,
) -> Result<f64, AlgebraError> {
    check_symmetric(a)?;
    if a.nrows() != h.dim() {
        return Err(AlgebraError::NotSquare(a.nrows(), h.dim()));
    }
    let frame = h.eigen(kappa)?;
    let rotated = frame.basis.transpose() * a * &frame.basis;
    let n = h.dim();
    let flat: Vec<f64> = (0..n * n).map(|k| rotated[(k / n, k % n)]).collect();
    second_variation_in_eigenbasis(&frame.spectrum, &flat)
}
