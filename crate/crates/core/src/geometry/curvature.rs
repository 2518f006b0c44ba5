use serde::{Deserialize, Serialize};

use crate::algebra::PrincipalSpectrum;
use crate::geometry::stencil::{apply, weights7, HALF_WIDTH, WIDTH};
use crate::geometry::{GeometryError, ProfileCurve};

/// Local differential geometry at one profile point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointGeometry {
    pub index: usize,
    /// Unit tangent `(z', r')` in the direction of increasing index.
    pub tangent: (f64, f64),
    /// Outward unit normal `(-r', z')`.
    pub normal: (f64, f64),
    /// Curvature of the meridian, `r' z'' - z' r''` in arc length.
    pub lambda_profile: f64,
    /// Curvature of the rotation orbits, `z' / r`, with multiplicity `n - 1`.
    pub lambda_rot: f64,
    #[serde(skip)]
    spectrum: Option<PrincipalSpectrum<f64>>,
}

impl PointGeometry {
    pub fn spectrum(&self) -> &PrincipalSpectrum<f64> {
        self.spectrum.as_ref().expect("set by curvatures()")
    }

    pub fn is_admissible(&self) -> bool {
        self.spectrum().is_two_convex()
    }
}

/// Raw chord-parameter derivatives `(z', r', z'', r'')` at point `i`. Differences to
/// the centre point are differentiated, so flat directions come out exactly zero.
pub(crate) fn derivatives_at(c: &ProfileCurve, s: &[f64], i: usize) -> [f64; 4] {
    let mut nodes = [0.0; WIDTH];
    let mut zs = [0.0; WIDTH];
    let mut rs = [0.0; WIDTH];
    let centre = c.points()[i];
    for (k, off) in (-(HALF_WIDTH as isize)..=HALF_WIDTH as isize).enumerate() {
        let (p, sp) = c.extended(s, i as isize + off);
        nodes[k] = sp;
        zs[k] = p.z - centre.z;
        rs[k] = p.r - centre.r;
    }
    let (w1, w2) = weights7(s[i], &nodes);
    [
        apply(&w1, &zs),
        apply(&w1, &rs),
        apply(&w2, &zs),
        apply(&w2, &rs),
    ]
}

/// Arc-length derivatives `(f_s, f_ss)` at point `i` of a field given per point. The field
/// is continued evenly across the poles of a closed profile and periodically otherwise.
pub(crate) fn field_derivatives(
    c: &ProfileCurve,
    s: &[f64],
    values: &[f64],
    i: usize,
) -> (f64, f64) {
    let mut nodes = [0.0; WIDTH];
    let mut vs = [0.0; WIDTH];
    let mut zs = [0.0; WIDTH];
    let mut rs = [0.0; WIDTH];
    let centre = c.points()[i];
    for (k, off) in (-(HALF_WIDTH as isize)..=HALF_WIDTH as isize).enumerate() {
        let (j, sp, _) = c.extended_index(s, i as isize + off);
        let (p, _) = c.extended(s, i as isize + off);
        nodes[k] = sp;
        vs[k] = values[j] - values[i];
        zs[k] = p.z - centre.z;
        rs[k] = p.r - centre.r;
    }
    let (w1, w2) = weights7(s[i], &nodes);
    let (f1, f2) = (apply(&w1, &vs), apply(&w2, &vs));
    let (z1, z2, r1, r2) = (
        apply(&w1, &zs),
        apply(&w2, &zs),
        apply(&w1, &rs),
        apply(&w2, &rs),
    );
    // convert from the chord parameter to arc length
    let speed2 = z1 * z1 + r1 * r1;
    let speed = speed2.sqrt();
    let fs = f1 / speed;
    let fss = (f2 - f1 * (z1 * z2 + r1 * r2) / speed2) / speed2;
    (fs, fss)
}

/// Principal curvatures at every point of the profile.
///
/// Derivatives use a seven-point stencil on the chord-length parameter. Closed profiles
/// are continued across the axis by reflection, so the poles get central stencils;
/// there `lambda_rot` is the umbilic limit `lambda_profile`.
pub fn curvatures(c: &ProfileCurve, kappa: f64) -> Result<Vec<PointGeometry>, GeometryError> {
    check_geometry_preconditions(c)?;
    let s = c.chord_parameter();
    let last = c.len() - 1;
    (0..c.len())
        .map(|i| {
            let [z1, r1, z2, r2] = derivatives_at(c, &s, i);
            let speed = z1.hypot(r1);
            if !(speed > 0.0) {
                return Err(GeometryError::DegenerateProfile(format!(
                    "zero tangent at index {i}"
                )));
            }
            let (tz, tr) = (z1 / speed, r1 / speed);
            let lambda_profile = (r1 * z2 - z1 * r2) / speed.powi(3);
            let is_pole = c.is_closed() && (i == 0 || i == last);
            let lambda_rot = if is_pole {
                lambda_profile
            } else {
                tz / c.points()[i].r
            };
            let normal = if is_pole {
                (if i == 0 { -1.0 } else { 1.0 }, 0.0)
            } else {
                (-tr, tz)
            };
            let spectrum =
                PrincipalSpectrum::rotational(c.dim(), kappa, lambda_profile, lambda_rot)
                    .map_err(|e| GeometryError::DegenerateProfile(e.to_string()))?;
            Ok(PointGeometry {
                index: i,
                tangent: (tz, tr),
                normal,
                lambda_profile,
                lambda_rot,
                spectrum: Some(spectrum),
            })
        })
        .collect()
}

pub(crate) fn check_geometry_preconditions(c: &ProfileCurve) -> Result<(), GeometryError> {
    if c.len() < crate::geometry::MIN_POINTS {
        return Err(GeometryError::DegenerateProfile(format!(
            "{} points, need at least {}",
            c.len(),
            crate::geometry::MIN_POINTS
        )));
    }
    let last = c.len() - 1;
    let interior = |i: usize| !c.is_closed() || (i != 0 && i != last);
    if let Some(i) = (0..c.len()).find(|&i| interior(i) && !(c.points()[i].r > 0.0)) {
        return Err(GeometryError::DegenerateProfile(format!(
            "r <= 0 at interior index {i}"
        )));
    }
    let h = c.target_spacing();
    if let Some(k) = c
        .segment_lengths()
        .iter()
        .position(|&l| !(l >= 0.5 * h && l <= 2.0 * h))
    {
        return Err(GeometryError::DegenerateProfile(format!(
            "segment {k} violates the spacing bounds"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures;

    #[test]
    fn unit_sphere_is_umbilic() {
        let c = fixtures::sphere(3, 1.0, 400, 0.0).unwrap();
        let g = curvatures(&c, 0.0).unwrap();
        for p in &g {
            for l in p.spectrum().lambdas() {
                assert!((l - 1.0).abs() < 5e-5, "index {}: {l}", p.index);
            }
        }
        let h: f64 = g[200].spectrum().mean_curvature();
        assert!((h - 3.0).abs() < 1e-9);
    }

    #[test]
    fn cylinder_is_flat_along_the_axis() {
        let c = fixtures::cylinder(3, 2.0, 1.0, 32).unwrap();
        for p in curvatures(&c, 0.0).unwrap() {
            assert_eq!(p.spectrum().lambdas(), &[0.0, 0.5, 0.5]);
        }
    }

    #[test]
    fn sphere_error_bound_scales_with_resolution() {
        for n in [200, 400, 800] {
            for radius in [0.5, 2.0] {
                let c = fixtures::sphere(3, radius, n, 0.0).unwrap();
                let worst = curvatures(&c, 0.0)
                    .unwrap()
                    .iter()
                    .flat_map(|p| p.spectrum().lambdas().to_vec())
                    .map(|l| (l - 1.0 / radius).abs())
                    .fold(0.0, f64::max);
                assert!(worst <= 10.0 / (n * n) as f64, "n {n}: {worst}");
            }
        }
    }

    #[test]
    fn field_derivatives_in_arc_length() {
        // f = z on the unit sphere: f_s = sin(theta), f_ss = cos(theta) in arc length theta
        let c = fixtures::sphere(3, 1.0, 201, 0.0).unwrap();
        let s = c.chord_parameter();
        let f: Vec<f64> = c.points().iter().map(|p| p.z).collect();
        for i in [0, 1, 37, 100, 200] {
            let theta = std::f64::consts::PI * i as f64 / 200.0;
            let (fs, fss) = field_derivatives(&c, &s, &f, i);
            assert!((fs - theta.sin()).abs() < 1e-9, "{i}: {fs}");
            assert!((fss - theta.cos()).abs() < 1e-7, "{i}: {fss}");
        }
    }

    #[test]
    fn inadmissible_points_are_flagged() {
        // periodic unduloid-like profile with a deep waist: strongly negative
        // meridian curvature at the waist
        let c = fixtures::periodic_wave(3, 1.0, 0.6, 2.0, 128).unwrap();
        let g = curvatures(&c, 0.0).unwrap();
        assert!(g.iter().any(|p| !p.is_admissible()));
        assert!(g.iter().any(|p| p.is_admissible()));
    }
}
