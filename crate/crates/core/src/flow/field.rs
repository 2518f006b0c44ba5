use crate::algebra::eval_derivatives;
use crate::flow::FlowFailure;
use crate::geometry::{curvatures, field_derivatives, PointGeometry, ProfileCurve};

/// Speed and its linearization at every profile point.
#[derive(Clone, Debug)]
pub struct SpeedField {
    pub geometry: Vec<PointGeometry>,
    pub speed: Vec<f64>,
    /// `dG/d lambda` for the meridian curvature.
    pub gamma_profile: Vec<f64>,
    /// `dG/d lambda` for each of the `n - 1` rotation curvatures.
    pub gamma_rot: Vec<f64>,
}

impl SpeedField {
    pub fn evaluate(c: &ProfileCurve, kappa: f64) -> Result<Self, FlowFailure> {
        let geometry = curvatures(c, kappa).map_err(|e| FlowFailure::Degenerate(e.to_string()))?;
        let n = c.dim();
        let mut speed = Vec::with_capacity(c.len());
        let mut gamma_profile = Vec::with_capacity(c.len());
        let mut gamma_rot = Vec::with_capacity(c.len());
        for g in &geometry {
            if !g.is_admissible() {
                return Err(FlowFailure::AdmissibilityLost { index: g.index });
            }
            let d = eval_derivatives(g.spectrum())
                .map_err(|_| FlowFailure::AdmissibilityLost { index: g.index })?;
            // the sorted spectrum puts the meridian curvature first or last
            let (p, r) = if g.lambda_profile <= g.lambda_rot {
                (0, n - 1)
            } else {
                (n - 1, 0)
            };
            speed.push(d.value);
            gamma_profile.push(d.eigen_gradient[p]);
            gamma_rot.push(d.eigen_gradient[r]);
        }
        Ok(Self {
            geometry,
            speed,
            gamma_profile,
            gamma_rot,
        })
    }

    pub fn len(&self) -> usize {
        self.speed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speed.is_empty()
    }

    /// Trace of the linearization, `sum_i gamma_i`.
    pub fn gamma_sum(&self, i: usize, n: usize) -> f64 {
        self.gamma_profile[i] + (n - 1) as f64 * self.gamma_rot[i]
    }

    pub fn max_speed(&self) -> (usize, f64) {
        self.speed
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
    }

    /// Right-hand side of the evolution equation of the speed in flat space,
    /// `gamma^{ij} (D_i D_j G + h_ik h_kj G)`, in the rotationally symmetric reduction:
    /// `gamma_1 G_ss + (n-1) gamma_rot (r_s / r) G_s + G sum_i gamma_i lambda_i^2`.
    pub fn pde_rhs(&self, c: &ProfileCurve) -> Vec<f64> {
        let n = c.dim();
        let s = c.chord_parameter();
        let last = c.len() - 1;
        (0..c.len())
            .map(|i| {
                let g = &self.geometry[i];
                let (gs, gss) = field_derivatives(c, &s, &self.speed, i);
                let pole = c.is_closed() && (i == 0 || i == last);
                // on the axis G_s / r -> G_ss
                let rot_hessian = if pole {
                    gss
                } else {
                    g.tangent.1 / c.points()[i].r * gs
                };
                let reaction = self.gamma_profile[i] * g.lambda_profile.powi(2)
                    + (n - 1) as f64 * self.gamma_rot[i] * g.lambda_rot.powi(2);
                self.gamma_profile[i] * gss
                    + (n - 1) as f64 * self.gamma_rot[i] * rot_hessian
                    + self.speed[i] * reaction
            })
            .collect()
    }
}
