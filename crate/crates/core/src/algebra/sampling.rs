use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::PrincipalSpectrum;

/// Seeded source of random admissible spectra and symmetric directions.
///
/// Eigenvalues are drawn uniformly from `[-1, 3]`, sorted, and rejected until the
/// spectrum lies in the two-convex cone.
pub struct SpectrumSampler {
    rng: ChaCha8Rng,
}

pub const SAMPLE_LOW: f64 = -1.0;
pub const SAMPLE_HIGH: f64 = 3.0;

impl SpectrumSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn spectrum(&mut self, n: usize, kappa: f64) -> PrincipalSpectrum<f64> {
        loop {
            let lambdas: Vec<f64> = (0..n)
                .map(|_| self.rng.random_range(SAMPLE_LOW..SAMPLE_HIGH))
                .collect();
            let s = PrincipalSpectrum::new(kappa, lambdas).expect("n >= 3");
            if s.is_two_convex() {
                return s;
            }
        }
    }

    /// Symmetric matrix with entries uniform in `[-1, 1]`.
    pub fn symmetric(&mut self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = self.rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Random orthogonal matrix (QR of a Gaussian-like matrix).
    pub fn orthogonal(&mut self, n: usize) -> DMatrix<f64> {
        let m = DMatrix::from_fn(n, n, |_, _| self.rng.random_range(-1.0..1.0));
        m.qr().q()
    }

    /// Random shape operator `Q diag(lambda) Q^T` with an admissible spectrum.
    pub fn shape_operator(&mut self, n: usize, kappa: f64) -> DMatrix<f64> {
        let s = self.spectrum(n, kappa);
        let q = self.orthogonal(n);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(s.lambdas()));
        let h = &q * d * q.transpose();
        (&h + h.transpose()) * 0.5
    }

    /// Two-nonnegative direction: PSD part plus a diagonal shift that keeps the
    /// two smallest eigenvalues summing to a nonnegative number.
    pub fn two_nonnegative(&mut self, n: usize) -> DMatrix<f64> {
        let b = DMatrix::from_fn(n, n, |_, _| self.rng.random_range(-1.0..1.0));
        let psd = &b * b.transpose();
        let q = self.orthogonal(n);
        let mut eig: Vec<f64> = (0..n).map(|_| self.rng.random_range(0.0..1.0)).collect();
        // one negative eigenvalue compensated by the next one
        let second = eig[1..].iter().cloned().fold(f64::INFINITY, f64::min);
        eig[0] = -0.5 * second;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eig));
        let a = psd * 0.1 + &q * d * q.transpose();
        (&a + a.transpose()) * 0.5
    }
}
