//! Canned profiles used by tests, the acceptance suite and the CLI.

use std::f64::consts::PI;

use crate::geometry::{resample, Closure, GeometryError, ProfileCurve, ProfilePoint, MIN_POINTS};

/// Round sphere of radius `radius` centred at `(z0, 0)`, sampled uniformly in arc length
/// with `points` points from the south pole to the north pole.
pub fn sphere(
    n: usize,
    radius: f64,
    points: usize,
    z0: f64,
) -> Result<ProfileCurve, GeometryError> {
    if points < 2 {
        return Err(GeometryError::DegenerateProfile("too few points".into()));
    }
    let m = points - 1;
    let pts = (0..points)
        .map(|k| {
            let theta = PI * k as f64 / m as f64;
            let r = if k == 0 || k == m {
                0.0
            } else {
                radius * theta.sin()
            };
            ProfilePoint::new(z0 - radius * theta.cos(), r)
        })
        .collect();
    let chord = 2.0 * radius * (PI / (2.0 * m as f64)).sin();
    ProfileCurve::new(n, pts, Closure::ClosedCaps, chord)
}

/// One period of the round cylinder `r = radius`.
pub fn cylinder(
    n: usize,
    radius: f64,
    period: f64,
    points: usize,
) -> Result<ProfileCurve, GeometryError> {
    let pts = (0..points)
        .map(|k| ProfilePoint::new(period * k as f64 / points as f64, radius))
        .collect();
    ProfileCurve::new(
        n,
        pts,
        Closure::PeriodicInZ { period },
        period / points as f64,
    )
}

/// Periodic profile `r = radius (1 - amplitude cos(2 pi z / period))`, resampled to
/// `points` points uniform in arc length.
pub fn periodic_wave(
    n: usize,
    radius: f64,
    amplitude: f64,
    period: f64,
    points: usize,
) -> Result<ProfileCurve, GeometryError> {
    graph_profile(n, period, points, |z| {
        radius * (1.0 - amplitude * (2.0 * PI * z / period).cos())
    })
}

/// Periodic graph `r = f(z)` over one period, resampled uniformly in arc length.
pub fn graph_profile(
    n: usize,
    period: f64,
    points: usize,
    f: impl Fn(f64) -> f64,
) -> Result<ProfileCurve, GeometryError> {
    let dense = 16 * points;
    let pts: Vec<ProfilePoint> = (0..dense)
        .map(|k| {
            let z = period * k as f64 / dense as f64;
            ProfilePoint::new(z, f(z))
        })
        .collect();
    let raw = ProfileCurve::new_unchecked(n, pts, Closure::PeriodicInZ { period }, 1.0);
    let mean = raw.length() / dense as f64;
    let raw = ProfileCurve::new(n, raw.points().to_vec(), raw.closure(), mean)?;
    resample(&raw, points)
}

/// Smooth step: 0 for `x <= -1`, 1 for `x >= 1`, `H(x) + H(-x) = 1`, all derivatives continuous.
fn smooth_step(x: f64) -> f64 {
    let g = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
    let (a, b) = (g(1.0 + x), g(1.0 - x));
    a / (a + b)
}

/// Ratio of fillet radius to bulb radius of [`dumbbell`]; above one keeps the fillet
/// two-convex.
pub const DUMBBELL_FILLET: f64 = 2.0;

/// Two round bulbs of radius `bulb_r` centred at `z = +-separation / 2`, joined by a
/// straight neck of radius close to `neck_r`.
///
/// The curvature of the meridian is that of bulbs, concave fillets of radius
/// `DUMBBELL_FILLET * bulb_r` and the neck, with the jumps smoothed over a fraction of
/// the fillet arc so total turning is preserved; the curve is integrated from the poles,
/// which stay exact. The design radius is corrected until the neck has radius `neck_r`.
pub fn dumbbell(
    n: usize,
    bulb_r: f64,
    neck_r: f64,
    separation: f64,
    points: usize,
) -> Result<ProfileCurve, GeometryError> {
    let mut design = neck_r;
    for _ in 0..6 {
        let (_, actual) = dumbbell_with(n, bulb_r, design, separation, points)?;
        design -= actual - neck_r;
    }
    Ok(dumbbell_with(n, bulb_r, design, separation, points)?.0)
}

/// The dumbbell for a design neck radius, with the radius the neck actually gets.
fn dumbbell_with(
    n: usize,
    bulb_r: f64,
    neck_r: f64,
    separation: f64,
    points: usize,
) -> Result<(ProfileCurve, f64), GeometryError> {
    let (big_r, a, c) = (bulb_r, neck_r, 0.5 * separation);
    let f = DUMBBELL_FILLET * big_r;
    let reach = ((big_r + f).powi(2) - (a + f).powi(2)).max(0.0).sqrt();
    if !(a > 0.0 && a < big_r && c > reach) || points < MIN_POINTS {
        return Err(GeometryError::DegenerateProfile(
            "dumbbell needs 0 < neck_r < bulb_r and room for the fillets".into(),
        ));
    }
    // unit normal of the bulb at the fillet junction, and the tangent angle there
    let (vz, vr) = (-reach / (big_r + f), (a + f) / (big_r + f));
    let psi_j = (-vz).atan2(vr);
    let neck_len = c - reach;
    let fillet_len = f * psi_j;
    let bulb_len = big_r * (psi_j + 0.5 * PI);
    let half = neck_len + fillet_len + bulb_len;
    let width = 0.25 * fillet_len.min(neck_len).min(bulb_len);
    let (s1, s2) = (neck_len, neck_len + fillet_len);
    // meridian curvature against arc length from the neck middle
    let kappa = |s: f64| {
        -1.0 / f * (smooth_step((s - s1) / width) - smooth_step((s - s2) / width))
            + smooth_step((s - s2) / width) / big_r
    };
    // integrate the tangent angle and the position from the pole towards the neck middle
    let steps = 64 * points;
    let ds = half / steps as f64;
    let mut psi = vec![0.0; steps + 1];
    psi[steps] = -0.5 * PI;
    for k in (0..steps).rev() {
        let (s0, s1) = (k as f64 * ds, (k + 1) as f64 * ds);
        let mid = 0.5 * (s0 + s1);
        // Simpson on one step; psi' = -kappa
        let turn = ds / 6.0 * (kappa(s0) + 4.0 * kappa(mid) + kappa(s1));
        psi[k] = psi[k + 1] + turn;
    }
    let mut z = vec![0.0; steps + 1];
    let mut r = vec![0.0; steps + 1];
    z[steps] = c + big_r;
    for k in (0..steps).rev() {
        // Simpson on the unit tangent, with the mean angle at the midpoint
        let pm = 0.5 * (psi[k] + psi[k + 1]);
        let ends = |g: fn(f64) -> f64| (g(psi[k]) + 4.0 * g(pm) + g(psi[k + 1])) / 6.0;
        z[k] = z[k + 1] - ds * ends(f64::cos);
        r[k] = r[k + 1] - ds * ends(f64::sin);
    }
    let shift = z[0];
    let at = |s: f64| {
        // cubic Hermite between the dense samples, with unit tangents as slopes
        let x = (s / ds).clamp(0.0, steps as f64);
        let k = (x.floor() as usize).min(steps - 1);
        let t = x - k as f64;
        let (h00, h10, h01, h11) = (
            2.0 * t * t * t - 3.0 * t * t + 1.0,
            t * t * t - 2.0 * t * t + t,
            -2.0 * t * t * t + 3.0 * t * t,
            t * t * t - t * t,
        );
        let zz =
            h00 * z[k] + h10 * ds * psi[k].cos() + h01 * z[k + 1] + h11 * ds * psi[k + 1].cos();
        let rr =
            h00 * r[k] + h10 * ds * psi[k].sin() + h01 * r[k + 1] + h11 * ds * psi[k + 1].sin();
        ProfilePoint::new(zz - shift, rr)
    };
    let segments = points - 1;
    let total = 2.0 * half;
    let pts = (0..points)
        .map(|k| {
            let s = total * k as f64 / segments as f64;
            if k == 0 {
                return ProfilePoint::new(-(c + big_r - shift), 0.0);
            }
            if k == segments {
                return ProfilePoint::new(c + big_r - shift, 0.0);
            }
            if s < half {
                let q = at(half - s);
                ProfilePoint::new(-q.z, q.r)
            } else {
                at(s - half)
            }
        })
        .collect();
    let chord = {
        let tmp = ProfileCurve::new_unchecked(n, pts, Closure::ClosedCaps, 1.0);
        let mean = tmp.length() / segments as f64;
        (tmp, mean)
    };
    let curve = ProfileCurve::new(n, chord.0.points().to_vec(), Closure::ClosedCaps, chord.1)?;
    Ok((curve, r[0]))
}
#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curvatures;

    #[test]
    fn dumbbell_is_two_convex_and_symmetric() {
        let c = dumbbell(3, 1.0, 0.3, 10.0, 701).unwrap();
        let g = curvatures(&c, 0.0).unwrap();
        assert!(g.iter().all(|p| p.spectrum().two_convex_margin() > 0.5));
        let pts = c.points();
        let mid = pts[350];
        assert!((mid.r - 0.3).abs() < 1e-9 && mid.z.abs() < 1e-9, "{mid:?}");
        for k in 0..=350 {
            let (a, b) = (pts[k], pts[700 - k]);
            assert!((a.z + b.z).abs() < 1e-12 && (a.r - b.r).abs() < 1e-12);
        }
        // bulbs keep their radius, fillets their concavity
        let lp: Vec<f64> = g.iter().map(|p| p.lambda_profile).collect();
        assert!((lp[5] - 1.0).abs() < 1e-6);
        assert!(lp.iter().cloned().fold(f64::INFINITY, f64::min) > -0.5 - 1e-4);
    }
}
