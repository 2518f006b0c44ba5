use crate::geometry::curvature::{check_geometry_preconditions, derivatives_at};
use crate::geometry::{GeometryError, ProfileCurve, ProfilePoint, MIN_POINTS};

/// Redistribute the points to uniform chord length, keeping `target_spacing` unless the
/// curve has become too short to carry [`MIN_POINTS`] points at that spacing.
///
/// Interpolation is cubic Hermite in the chord parameter, with node slopes from the
/// seven-point curvature stencil; poles of closed profiles stay fixed.
pub fn reparametrize(c: &ProfileCurve) -> Result<ProfileCurve, GeometryError> {
    let min_segments = if c.is_closed() {
        MIN_POINTS - 1
    } else {
        MIN_POINTS
    };
    let ideal = (c.length() / c.target_spacing()).round() as usize;
    let segments = ideal.max(min_segments);
    let points = if c.is_closed() {
        segments + 1
    } else {
        segments
    };
    let mut out = resample(c, points)?;
    if segments > ideal {
        out.target_spacing_mut(c.length() / segments as f64);
    } else {
        out.target_spacing_mut(c.target_spacing());
    }
    out.validate()?;
    Ok(out)
}

/// Resample `c` to exactly `points` points evenly spaced in its chord parameter. The
/// result has target spacing equal to the new mean spacing.
pub fn resample(c: &ProfileCurve, points: usize) -> Result<ProfileCurve, GeometryError> {
    check_geometry_preconditions(c)?;
    if points < MIN_POINTS {
        return Err(GeometryError::DegenerateProfile(format!(
            "{points} points, need at least {MIN_POINTS}"
        )));
    }
    let s = c.chord_parameter();
    let total = *s.last().expect("non-empty");
    let slopes: Vec<[f64; 4]> = (0..c.len()).map(|i| derivatives_at(c, &s, i)).collect();
    let segments = if c.is_closed() { points - 1 } else { points };
    let last_seg = c.segment_count() - 1;
    let mut out = Vec::with_capacity(points);
    for k in 0..points {
        let target = total * k as f64 / segments as f64;
        let j = (s.partition_point(|&x| x <= target).max(1) - 1).min(last_seg);
        let (a, b) = c.segment(j);
        let jb = (j + 1) % c.len();
        let h = s[j + 1] - s[j];
        let t = (target - s[j]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        let z = h00 * a.z + h10 * h * slopes[j][0] + h01 * b.z + h11 * h * slopes[jb][0];
        let r = h00 * a.r + h10 * h * slopes[j][1] + h01 * b.r + h11 * h * slopes[jb][1];
        out.push(ProfilePoint::new(z, r));
    }
    if c.is_closed() {
        out[0] = c.points()[0];
        out[points - 1] = *c.points().last().expect("non-empty");
    }
    let mut curve = ProfileCurve::new_unchecked(c.dim(), out, c.closure(), 1.0);
    let mean = curve.length() / segments as f64;
    curve.target_spacing_mut(mean);
    curve.validate()?;
    Ok(curve)
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}
