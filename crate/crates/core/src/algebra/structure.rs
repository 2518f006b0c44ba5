use serde::{Deserialize, Serialize};

use crate::algebra::sampling::SpectrumSampler;
use crate::algebra::speed::GRADIENT_ENTRY_BOUND;
use crate::algebra::{
    eval_derivatives, eval_speed, second_variation_in_eigenbasis, PrincipalSpectrum,
};

/// Constant certified for `0 <= dG(A) <= C tr(A)` on two-nonnegative `A`.
///
/// At most one diagonal entry of such an `A` is negative and it is dominated by every
/// other one, so `sum_i gamma_i A_ii <= max_i gamma_i * 2 tr(A)`.
pub const MONOTONICITY_CONSTANT: f64 = 2.0 * GRADIENT_ENTRY_BOUND;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub passed: bool,
    /// Worst value seen for the condition's test statistic.
    pub worst: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub conditions: Vec<ConditionResult>,
    /// Largest observed `dG(A) / tr(A)` over the sampled two-nonnegative directions.
    pub observed_monotonicity_constant: f64,
}

impl StructureReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

fn directional_derivative(gamma: &[f64], a: &nalgebra::DMatrix<f64>) -> f64 {
    gamma.iter().enumerate().map(|(i, g)| g * a[(i, i)]).sum()
}

/// Samples the structure conditions of the speed at `s`: positivity, vanishing at the
/// cone boundary, homogeneity in `lambda - kappa`, monotonicity, and concavity.
pub fn check_structure_conditions(
    s: &PrincipalSpectrum<f64>,
    trials: usize,
    seed: u64,
) -> StructureReport {
    let mut out = Vec::new();
    let n = s.dim();
    let kappa = *s.kappa();

    let g0 = eval_speed(s);
    let positive = matches!(g0, Ok(g) if g > 0.0);
    out.push(ConditionResult {
        name: "positivity".into(),
        passed: positive,
        worst: g0.clone().unwrap_or(f64::NAN),
    });
    let Ok(g0) = g0 else {
        return StructureReport {
            conditions: out,
            observed_monotonicity_constant: f64::NAN,
        };
    };

    // drive lambda_1 down until lambda_1 + lambda_2 - 2 kappa -> 0+
    let margin0 = s.two_convex_margin();
    let mut last = g0;
    let mut monotone = true;
    let floor = 1e-9 * s.largest().abs().max(1.0);
    for k in (1..=12).take_while(|&k| margin0 * 10f64.powi(-k) > floor) {
        let mut l = s.lambdas().to_vec();
        l[0] -= margin0 * (1.0 - 10f64.powi(-k));
        let g = PrincipalSpectrum::new(kappa, l)
            .ok()
            .and_then(|p| eval_speed(&p).ok())
            .unwrap_or(f64::NAN);
        monotone &= g < last;
        last = g;
    }
    out.push(ConditionResult {
        name: "boundary_vanishing".into(),
        passed: monotone && last < 1e-6,
        worst: last,
    });

    let mut worst_hom = 0.0f64;
    for c in [0.5, 2.0, 10.0] {
        let g = eval_speed(&s.shifted_scale(c)).unwrap_or(f64::NAN);
        worst_hom = worst_hom.max(((g - c * g0) / (c * g0)).abs());
    }
    out.push(ConditionResult {
        name: "homogeneity".into(),
        passed: worst_hom <= 1e-10,
        worst: worst_hom,
    });

    let d = eval_derivatives(s).expect("admissible");
    let mut sampler = SpectrumSampler::new(seed);
    let identity = nalgebra::DMatrix::<f64>::identity(n, n);
    let mut observed_c = directional_derivative(&d.eigen_gradient, &identity) / n as f64;
    let mut mono_ok = directional_derivative(&d.eigen_gradient, &identity) > 0.0;
    let mut worst_mono = f64::INFINITY;
    for _ in 0..trials {
        let a = sampler.two_nonnegative(n);
        let dg = directional_derivative(&d.eigen_gradient, &a);
        let tr = a.trace();
        let ratio = dg / tr;
        observed_c = observed_c.max(ratio);
        worst_mono = worst_mono.min(dg);
        mono_ok &= dg >= -1e-14 && dg <= MONOTONICITY_CONSTANT * tr + 1e-14;
    }
    out.push(ConditionResult {
        name: "monotonicity".into(),
        passed: mono_ok,
        worst: worst_mono,
    });

    let mut worst_concave = f64::NEG_INFINITY;
    for _ in 0..trials {
        let a = sampler.symmetric(n);
        let flat: Vec<f64> = (0..n * n).map(|k| a[(k / n, k % n)]).collect();
        let v = second_variation_in_eigenbasis(s, &flat).expect("admissible");
        worst_concave = worst_concave.max(v);
    }
    if trials == 0 {
        worst_concave = 0.0;
    }
    out.push(ConditionResult {
        name: "concavity".into(),
        passed: worst_concave <= 1e-10,
        worst: worst_concave,
    });

    StructureReport {
        conditions: out,
        observed_monotonicity_constant: observed_c,
    }
}
