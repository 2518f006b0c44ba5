//! Randomized verification of the speed's algebraic properties, replayable by seed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::sampling::SpectrumSampler;
use crate::algebra::{
    check_pinching_inequality, check_structure_conditions, eval_derivatives, eval_speed,
    PrincipalSpectrum, GRADIENT_ENTRY_BOUND, GRADIENT_TRACE_BOUND,
};

pub const SUITES: [&str; 4] = ["concavity", "gradient", "homogeneity", "pinching"];

/// Directions tried per sample by the structure checks.
const TRIALS: usize = 4;
/// Relative agreement of the analytic gradient with central differences.
const GRADIENT_FD_TOL: f64 = 1e-5;

/// One failed property, with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailingSample {
    pub suite: String,
    pub condition: String,
    pub index: usize,
    /// Seed of the per-sample structure checks.
    pub sample_seed: u64,
    pub n: usize,
    pub kappa: f64,
    pub lambdas: Vec<f64>,
    pub worst: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub checks: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub samples: usize,
    pub seed: u64,
    pub suites: Vec<SuiteSummary>,
    pub failures: Vec<FailingSample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every suite on `samples` random admissible spectra with `n` in `3..=6`
/// and `kappa` in `[0, 1/2)`.
pub fn verify_algebra(samples: usize, seed: u64) -> VerifyReport {
    let mut sampler = SpectrumSampler::new(seed);
    let mut suites: Vec<SuiteSummary> = SUITES
        .iter()
        .map(|s| SuiteSummary {
            suite: s.to_string(),
            checks: 0,
            failures: 0,
        })
        .collect();
    let mut failures = Vec::new();
    for index in 0..samples {
        let n = sampler.rng().random_range(3..=6);
        let kappa = sampler.rng().random_range(0.0..0.5);
        let sample_seed: u64 = sampler.rng().random();
        let s = sampler.spectrum(n, kappa);
        for (suite, condition, passed, worst) in check_sample(&s, sample_seed) {
            let k = SUITES
                .iter()
                .position(|x| *x == suite)
                .expect("known suite");
            suites[k].checks += 1;
            if !passed {
                suites[k].failures += 1;
                failures.push(FailingSample {
                    suite: suite.to_string(),
                    condition,
                    index,
                    sample_seed,
                    n,
                    kappa,
                    lambdas: s.lambdas().to_vec(),
                    worst,
                });
            }
        }
    }
    VerifyReport {
        samples,
        seed,
        suites,
        failures,
    }
}

/// `(suite, condition, passed, worst)` for every check on one spectrum.
pub fn check_sample(
    s: &PrincipalSpectrum<f64>,
    sample_seed: u64,
) -> Vec<(&'static str, String, bool, f64)> {
    let mut out = Vec::new();
    let structure = check_structure_conditions(s, TRIALS, sample_seed);
    for c in &structure.conditions {
        let suite = match c.name.as_str() {
            "concavity" => "concavity",
            "homogeneity" | "boundary_vanishing" | "positivity" => "homogeneity",
            _ => "gradient",
        };
        out.push((suite, c.name.clone(), c.passed, c.worst));
    }

    match eval_derivatives(s) {
        Ok(d) => {
            let worst_entry = d.eigen_gradient.iter().cloned().fold(0.0, f64::max);
            let bounded = d
                .eigen_gradient
                .iter()
                .all(|g| *g >= 0.0 && *g <= GRADIENT_ENTRY_BOUND)
                && d.trace() <= GRADIENT_TRACE_BOUND;
            out.push(("gradient", "bounds".into(), bounded, worst_entry));
            let fd = fd_gradient_error(s, &d.eigen_gradient);
            out.push((
                "gradient",
                "finite_difference".into(),
                fd <= GRADIENT_FD_TOL,
                fd,
            ));
        }
        Err(_) => out.push(("gradient", "evaluation".into(), false, f64::NAN)),
    }

    match check_pinching_inequality(s) {
        Ok(p) => out.push(("pinching", "inequality".into(), p.holds, p.lhs - p.rhs)),
        Err(_) => out.push(("pinching", "evaluation".into(), false, f64::NAN)),
    }
    out
}

/// Largest relative deviation of `gamma` from central differences of the speed.
fn fd_gradient_error(s: &PrincipalSpectrum<f64>, gamma: &[f64]) -> f64 {
    let kappa = *s.kappa();
    let scale = s.lambdas().iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let h = 1e-5 * s.two_convex_margin().min(scale);
    let speed = |l: Vec<f64>| {
        PrincipalSpectrum::new(kappa, l)
            .ok()
            .and_then(|p| eval_speed(&p).ok())
            .unwrap_or(f64::NAN)
    };
    (0..s.dim())
        .map(|i| {
            let mut up = s.lambdas().to_vec();
            let mut down = up.clone();
            up[i] += h;
            down[i] -= h;
            let fd = (speed(up) - speed(down)) / (2.0 * h);
            (fd - gamma[i]).abs() / gamma[i].abs().max(1e-3)
        })
        .fold(
            0.0,
            |m, e| if e.is_nan() { f64::INFINITY } else { m.max(e) },
        )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_and_replay() {
        let a = verify_algebra(200, 11);
        assert!(a.passed(), "{:?}", a.failures);
        assert!(a.suites.iter().all(|s| s.checks >= 200));
        assert_eq!(a, verify_algebra(200, 11));
    }

    #[test]
    fn inadmissible_spectrum_fails() {
        let s = PrincipalSpectrum::new(0.0, vec![-2.0, 1.0, 1.0]).unwrap();
        let checks = check_sample(&s, 0);
        assert!(checks.iter().any(|c| !c.2));
    }
}
