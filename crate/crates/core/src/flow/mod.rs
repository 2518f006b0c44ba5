//! Explicit time stepping of a profile under inward normal velocity `G_kappa`.

mod checkpoint;
mod field;
mod pde;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{embedding, reparametrize, ProfileCurve};
use crate::monitors::{record, MonitorReport, MonitorSettings};

pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointHeader};
pub use field::SpeedField;
pub use pde::{pde_consistency_check, PROBE_FRACTION};

/// Smallest admissible time step.
pub const MIN_DT: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlowFailure {
    #[error("lambda_1 + lambda_2 <= 2 kappa at index {index}")]
    AdmissibilityLost { index: usize },
    #[error("profile intersects itself between segments {a} and {b}")]
    SelfIntersection { a: usize, b: usize },
    #[error("time step {dt:e} below the floor")]
    StepUnderflow { dt: f64 },
    #[error("degenerate profile: {0}")]
    Degenerate(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlowStatus {
    Running,
    CurvatureThresholdHit { index: usize },
    Extinct,
    Failed { reason: FlowFailure },
}

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("initial profile is not admissible: {0}")]
    InadmissibleInitial(FlowFailure),
    #[error("not enough resolved history for the consistency check")]
    InsufficientHistory,
    #[error("flow is not running (status {0:?})")]
    NotRunning(FlowStatus),
    #[error("invalid step control: {0}")]
    InvalidControl(&'static str),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("checkpoint header: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepControl {
    pub kappa: f64,
    pub cfl: f64,
    /// Reparametrize every this many accepted steps.
    pub reparam_interval: usize,
    /// Stop with `CurvatureThresholdHit` once `max G` reaches this value.
    pub g_stop: Option<f64>,
    /// Record a monitor row every this many accepted steps.
    pub monitor_interval: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            kappa: 0.0,
            cfl: 0.2,
            reparam_interval: 10,
            g_stop: None,
            monitor_interval: 10,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(FlowError::InvalidControl("cfl must lie in (0, 1]"));
        }
        if !(self.kappa >= 0.0) {
            return Err(FlowError::InvalidControl("kappa must be non-negative"));
        }
        if self.reparam_interval == 0 || self.monitor_interval == 0 {
            return Err(FlowError::InvalidControl("intervals must be positive"));
        }
        if matches!(self.g_stop, Some(g) if !(g > 0.0)) {
            return Err(FlowError::InvalidControl("g_stop must be positive"));
        }
        Ok(())
    }
}

/// Speeds and evolution right-hand side at one accepted step, kept for the
/// two-step residual.
#[derive(Clone, Debug)]
struct History {
    t: f64,
    reparam_epoch: usize,
    speed: Vec<f64>,
    rhs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct FlowState {
    pub curve: ProfileCurve,
    pub t: f64,
    pub dt_last: f64,
    pub step_count: usize,
    pub status: FlowStatus,
    /// Two-step estimate of the evolution-equation residual, when available.
    pub last_residual: Option<f64>,
    reparam_epoch: usize,
    history: Option<History>,
}

impl FlowState {
    pub fn new(curve: ProfileCurve) -> Self {
        Self::resume(curve, 0.0, 0, FlowStatus::Running)
    }

    pub fn resume(curve: ProfileCurve, t: f64, step_count: usize, status: FlowStatus) -> Self {
        Self {
            curve,
            t,
            dt_last: 0.0,
            step_count,
            status,
            last_residual: None,
            reparam_epoch: 0,
            history: None,
        }
    }

    pub fn is_running(&self) -> bool {
        self.status == FlowStatus::Running
    }

    fn fail(mut self, reason: FlowFailure) -> Self {
        self.status = FlowStatus::Failed { reason };
        self
    }
}

/// Whether the profile has shrunk below the resolution of its spacing.
pub fn is_extinct(c: &ProfileCurve) -> bool {
    let h = c.target_spacing();
    c.max_radius() < 5.0 * h || c.enclosed_volume() < (10.0 * h).powi(c.dim() as i32 + 1)
}

/// One explicit Euler step `x <- x - dt G nu`.
pub fn step(s: &FlowState, ctl: &StepControl) -> FlowState {
    step_capped(s, ctl, f64::INFINITY)
}

/// As [`step`], with the time step additionally capped by `dt_cap`.
pub fn step_capped(s: &FlowState, ctl: &StepControl, dt_cap: f64) -> FlowState {
    let mut next = s.clone();
    if !s.is_running() {
        return next;
    }
    let field = match SpeedField::evaluate(&s.curve, ctl.kappa) {
        Ok(f) => f,
        Err(e) => return next.fail(e),
    };
    let rhs = field.pde_rhs(&s.curve);
    next.last_residual = s.history.as_ref().and_then(|h| {
        (h.reparam_epoch == s.reparam_epoch && h.speed.len() == field.len() && s.t > h.t)
            .then(|| two_step_residual(&s.curve, h, s.t, &field.speed, &rhs))
            .flatten()
    });
    next.history = Some(History {
        t: s.t,
        reparam_epoch: s.reparam_epoch,
        speed: field.speed.clone(),
        rhs,
    });

    let (imax, gmax) = field.max_speed();
    if matches!(ctl.g_stop, Some(g) if gmax >= g) {
        next.status = FlowStatus::CurvatureThresholdHit { index: imax };
        return next;
    }

    let n = s.curve.dim();
    let h = s
        .curve
        .segment_lengths()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let max_gamma = (0..field.len())
        .map(|i| field.gamma_sum(i, n))
        .fold(0.0, f64::max);
    let dt_stable = ctl.cfl * h * h / max_gamma;
    if !(dt_stable >= MIN_DT) {
        return next.fail(FlowFailure::StepUnderflow { dt: dt_stable });
    }
    let dt = dt_stable.min(dt_cap);
    for (p, (g, v)) in next
        .curve
        .points_mut()
        .iter_mut()
        .zip(field.geometry.iter().zip(&field.speed))
    {
        p.z -= dt * v * g.normal.0;
        p.r -= dt * v * g.normal.1;
    }
    next.t += dt;
    next.dt_last = dt;
    next.step_count += 1;

    if next.step_count % ctl.reparam_interval == 0 {
        match reparametrize(&next.curve) {
            Ok(c) => next.curve = c,
            Err(e) => return next.fail(FlowFailure::Degenerate(e.to_string())),
        }
        next.reparam_epoch += 1;
    }
    if let Some((a, b)) = embedding::first_intersection(&next.curve) {
        return next.fail(FlowFailure::SelfIntersection { a, b });
    }
    if is_extinct(&next.curve) {
        next.status = FlowStatus::Extinct;
    }
    next
}

fn two_step_residual(
    c: &ProfileCurve,
    h: &History,
    t: f64,
    speed: &[f64],
    rhs: &[f64],
) -> Option<f64> {
    let dt = t - h.t;
    interior_points(c)
        .map(|i| {
            let dg = (speed[i] - h.speed[i]) / dt;
            let mid = 0.5 * (rhs[i] + h.rhs[i]);
            (dg - mid).abs() / speed[i].powi(2).max(1.0)
        })
        .reduce(f64::max)
}

/// Points resolved well enough for the consistency check: on closed profiles, those at
/// least ten target spacings away from the axis.
pub(crate) fn interior_points(c: &ProfileCurve) -> impl Iterator<Item = usize> + '_ {
    let floor = if c.is_closed() {
        10.0 * c.target_spacing()
    } else {
        0.0
    };
    (0..c.len()).filter(move |&i| c.points()[i].r >= floor)
}

/// Advance until extinction, the curvature threshold, failure, or `t_max`, recording a
/// monitor row every `ctl.monitor_interval` accepted steps and at the final step. An
/// extinct profile is below resolution and gets no row.
pub fn run(
    initial: ProfileCurve,
    ctl: &StepControl,
    t_max: f64,
    settings: &MonitorSettings,
) -> Result<(FlowState, MonitorReport), FlowError> {
    SpeedField::evaluate(&initial, ctl.kappa).map_err(FlowError::InadmissibleInitial)?;
    let mut report = MonitorReport::new(initial.dim(), ctl.kappa, settings.clone());
    let state = run_from(FlowState::new(initial), ctl, t_max, &mut report)?;
    Ok((state, report))
}

/// [`run`] from an existing state, appending monitor rows to `report`.
pub fn run_from(
    mut state: FlowState,
    ctl: &StepControl,
    t_max: f64,
    report: &mut MonitorReport,
) -> Result<FlowState, FlowError> {
    ctl.validate()?;
    let settings = report.settings.clone();
    while state.is_running() && state.t < t_max {
        let next = step_capped(&state, ctl, t_max - state.t);
        let accepted = next.step_count > state.step_count;
        let finished = !next.is_running() || next.t >= t_max;
        state = next;
        let resolved = state.status != FlowStatus::Extinct;
        if accepted && resolved && (state.step_count % ctl.monitor_interval == 0 || finished) {
            if let Ok(row) = record(&state, ctl.kappa, &settings) {
                report.push(row);
            }
        }
    }
    Ok(state)
}
