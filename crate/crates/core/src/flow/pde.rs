use crate::flow::{interior_points, FlowError, FlowState, SpeedField, StepControl};

/// Length of the probe window as a fraction of `sqrt(h) / max G`.
pub const PROBE_FRACTION: f64 = 0.05;

/// Largest residual `|d_t G - rhs| / max(G^2, 1)` over resolved points.
///
/// The time derivative comes from a short probe: two windows of pure normal motion
/// (no reparametrization, so every point keeps its identity) and the one-sided
/// second-order difference `(-3 G_0 + 4 G_1 - G_2) / (2 Delta)`. The window scales
/// like `sqrt(h)`: rounding in `G` grows like `1 / h^2`, so a window proportional to
/// `h` lets the difference quotient drown in noise on fine grids, while `sqrt(h)` keeps
/// the time-difference error `O(Delta^2) = O(h)` and the noise well below it.
pub fn pde_consistency_check(s: &FlowState, ctl: &StepControl) -> Result<f64, FlowError> {
    if !s.is_running() {
        return Err(FlowError::NotRunning(s.status.clone()));
    }
    let c = &s.curve;
    if interior_points(c).next().is_none() {
        return Err(FlowError::InsufficientHistory);
    }
    let field =
        SpeedField::evaluate(c, ctl.kappa).map_err(|_| FlowError::NotRunning(s.status.clone()))?;
    let rhs = field.pde_rhs(c);
    let n = c.dim();
    let h = c
        .segment_lengths()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let gmax = field.max_speed().1;
    let window = PROBE_FRACTION * h.sqrt() / gmax;
    let max_gamma = (0..field.len())
        .map(|i| field.gamma_sum(i, n))
        .fold(0.0, f64::max);
    // headroom: the stable step shrinks slightly as the probe moves
    let dt_stable = 0.5 * ctl.cfl * h * h / max_gamma;
    let substeps = (window / dt_stable).ceil().max(1.0) as usize;
    let dt = window / substeps as f64;

    let probe_ctl = StepControl {
        reparam_interval: usize::MAX,
        g_stop: None,
        ..ctl.clone()
    };
    let mut probe = FlowState::new(c.clone());
    let mut speeds = vec![field.speed.clone()];
    for _ in 0..2 {
        for _ in 0..substeps {
            probe = advance_exact(&probe, &probe_ctl, dt)?;
        }
        let f = SpeedField::evaluate(&probe.curve, ctl.kappa)
            .map_err(|_| FlowError::InsufficientHistory)?;
        speeds.push(f.speed);
    }
    Ok(interior_points(c)
        .map(|i| {
            let dg = (-3.0 * speeds[0][i] + 4.0 * speeds[1][i] - speeds[2][i]) / (2.0 * window);
            (dg - rhs[i]).abs() / field.speed[i].powi(2).max(1.0)
        })
        .fold(0.0, f64::max))
}

/// One Euler step of exactly `dt`.
fn advance_exact(s: &FlowState, ctl: &StepControl, dt: f64) -> Result<FlowState, FlowError> {
    let next = crate::flow::step_capped(s, ctl, dt);
    if !next.is_running() || (next.dt_last - dt).abs() > 1e-12 * dt {
        return Err(FlowError::InsufficientHistory);
    }
    Ok(next)
}
