use serde::{Deserialize, Serialize};

use crate::flow::SpeedField;
use crate::geometry::{ProfileCurve, ProfilePoint};
use crate::surgery::{SurgeryError, SurgeryParams};

/// A maximal run of profile points that is `epsilon0`-close to a round cylinder.
///
/// `start..=end` are stored indices in increasing-`z` order; on a periodic profile `end`
/// may exceed the last index, in which case the run wraps into the next period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeckCandidate {
    pub start: usize,
    pub end: usize,
    /// Mean radius over the run.
    pub r0: f64,
    pub z_start: f64,
    pub z_end: f64,
    /// Observed closeness `max(|r - r0| / r0, |r'|)`.
    pub epsilon: f64,
    /// Axial length over `r0`.
    pub normalized_length: f64,
    pub mean_g: f64,
}

impl NeckCandidate {
    pub fn centre(&self) -> f64 {
        0.5 * (self.z_start + self.z_end)
    }

    pub fn physical_length(&self) -> f64 {
        self.z_end - self.z_start
    }
}

/// Unrolled point `i` (periodic profiles continue by translation).
pub(crate) fn unrolled(c: &ProfileCurve, i: usize) -> ProfilePoint {
    let m = c.len();
    let p = c.points()[i % m];
    let shift = (i / m) as f64 * c.period().unwrap_or(0.0);
    ProfilePoint::new(p.z + shift, p.r)
}

/// Necks of the profile in increasing index order.
///
/// A point qualifies when `G >= G_star / 2`, `lambda_1 <= eta0 G`, the profile runs
/// towards increasing `z` and `|r'| <= epsilon0`. Runs of qualifying points are grown
/// greedily while every radius stays within `epsilon0` of the running mean; runs shorter
/// than `L0` (in units of `r0`) and runs whose solid tube meets other parts of the
/// profile are dropped.
pub fn detect_necks(
    c: &ProfileCurve,
    p: &SurgeryParams,
    kappa: f64,
) -> Result<Vec<NeckCandidate>, SurgeryError> {
    p.validate()?;
    let field = SpeedField::evaluate(c, kappa)
        .map_err(|e| SurgeryError::InvalidComponent(e.to_string()))?;
    let m = c.len();
    let ok: Vec<bool> = (0..m)
        .map(|i| {
            let g = &field.geometry[i];
            let speed = field.speed[i];
            speed >= 0.5 * p.g_star
                && *g.spectrum().smallest() <= p.eta0 * speed
                && g.tangent.0 > 0.0
                && g.tangent.1.abs() <= p.epsilon0
        })
        .collect();
    let periodic = c.period().is_some();
    let (first, span) = if periodic {
        match ok.iter().position(|&q| !q) {
            Some(k) => (k + 1, m),
            // the whole period qualifies
            None => (0, m),
        }
    } else {
        (0, m)
    };
    let all = periodic && ok.iter().all(|&q| q);
    let mut out = Vec::new();
    let mut k = 0;
    while k < span {
        let i = first + k;
        if !ok[i % m] {
            k += 1;
            continue;
        }
        let limit = if all { span } else { span - k };
        let (mut sum, mut lo, mut hi) = (0.0, f64::INFINITY, 0.0f64);
        let mut len = 0;
        while len < limit && ok[(i + len) % m] {
            let r = c.points()[(i + len) % m].r;
            let (s2, lo2, hi2) = (sum + r, lo.min(r), hi.max(r));
            let mean = s2 / (len + 1) as f64;
            if hi2 > (1.0 + p.epsilon0) * mean || lo2 < (1.0 - p.epsilon0) * mean {
                break;
            }
            (sum, lo, hi) = (s2, lo2, hi2);
            len += 1;
        }
        let end = i + len - 1;
        let r0 = sum / len as f64;
        let (a, b) = (unrolled(c, i), unrolled(c, end));
        let normalized_length = (b.z - a.z) / r0;
        if normalized_length >= p.l0 && tube_is_clear(c, i, end, hi) {
            let epsilon = (i..=end)
                .map(|j| {
                    let q = j % m;
                    ((c.points()[q].r - r0).abs() / r0).max(field.geometry[q].tangent.1.abs())
                })
                .fold(0.0, f64::max);
            let mean_g = (i..=end).map(|j| field.speed[j % m]).sum::<f64>() / len as f64;
            let (start, end) = if i >= m { (i - m, end - m) } else { (i, end) };
            out.push(NeckCandidate {
                start,
                end,
                r0,
                z_start: a.z,
                z_end: b.z,
                epsilon,
                normalized_length,
                mean_g,
            });
        }
        k += len.max(1);
    }
    out.sort_by_key(|n| n.start);
    Ok(out)
}

/// No profile point outside the run lies inside the solid tube `z in [z_a, z_b], r <= r_max`.
fn tube_is_clear(c: &ProfileCurve, start: usize, end: usize, r_max: f64) -> bool {
    let m = c.len();
    if end - start + 1 >= m {
        return true;
    }
    let (za, zb) = (unrolled(c, start).z, unrolled(c, end).z);
    let period = c.period();
    (end + 1..start + m).all(|j| {
        let p = unrolled(c, j);
        let shifts: &[f64] = if period.is_some() {
            &[-1.0, 0.0, 1.0]
        } else {
            &[0.0]
        };
        shifts.iter().all(|k| {
            let z = p.z + k * period.unwrap_or(0.0);
            !(z > za && z < zb && p.r <= r_max)
        })
    })
}
