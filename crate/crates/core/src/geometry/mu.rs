use crate::geometry::{curvatures, GeometryError, ProfileCurve};

/// Largest number of period translates scanned for a periodic profile.
const MAX_SHIFTS: i64 = 1000;

/// Two-point function `mu(x) = sup_y 2<x - y, nu(x)> / |x - y|^2` over the revolved
/// hypersurface, one value per profile point.
///
/// For fixed meridian points `x` and `y`, rotating `y` by an angle `phi` changes the
/// ratio through `cos(phi)` alone and the dependence is linear-fractional, so the
/// supremum over rotations sits at `phi = 0` or `phi = pi`. The supremum also includes
/// the limits `y -> x`, which are the principal curvatures at `x`.
pub fn mu_two_point(c: &ProfileCurve) -> Result<Vec<f64>, GeometryError> {
    let geo = curvatures(c, 0.0)?;
    let pts = c.points();
    let period = c.period();
    Ok(geo
        .iter()
        .map(|g| {
            let x = pts[g.index];
            let (nz, nr) = g.normal;
            let mut best = g.lambda_profile.max(g.lambda_rot);
            let mut shift = 0i64;
            loop {
                let shifts: &[i64] = if shift == 0 { &[0] } else { &[shift, -shift] };
                for &k in shifts {
                    let dz0 = k as f64 * period.unwrap_or(0.0);
                    for (j, y) in pts.iter().enumerate() {
                        if k == 0 && j == g.index {
                            continue;
                        }
                        let dz = y.z + dz0 - x.z;
                        for cos in [1.0, -1.0] {
                            let den = dz * dz + y.r * y.r + x.r * x.r - 2.0 * x.r * y.r * cos;
                            if den > 0.0 {
                                let num = -2.0 * (dz * nz + nr * (y.r * cos - x.r));
                                best = best.max(num / den);
                            }
                        }
                    }
                }
                let Some(p) = period else { break };
                shift += 1;
                // beyond this distance no chord can beat 2 / |x - y|
                if shift > MAX_SHIFTS || best > 0.0 && (shift - 1) as f64 * p >= 2.0 / best {
                    break;
                }
            }
            best
        })
        .collect())
}

/// Inscribed-radius estimate `1 / mu` at every profile point.
pub fn inscribed_radii(c: &ProfileCurve) -> Result<Vec<f64>, GeometryError> {
    Ok(mu_two_point(c)?.into_iter().map(|m| 1.0 / m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures;

    #[test]
    fn unit_sphere_chords_are_exact() {
        let c = fixtures::sphere(3, 1.0, 400, 0.0).unwrap();
        for m in mu_two_point(&c).unwrap() {
            assert!((m - 1.0).abs() <= 1e-9, "{m}");
        }
    }

    #[test]
    fn cylinder_uses_the_antipodal_chord() {
        for r in [0.5, 1.0, 3.0] {
            let c = fixtures::cylinder(3, r, 1.0, 64).unwrap();
            for m in mu_two_point(&c).unwrap() {
                assert!((m - 1.0 / r).abs() <= 1e-6, "{m}");
            }
        }
    }

    #[test]
    fn mu_dominates_the_largest_curvature() {
        for c in [
            fixtures::sphere(3, 0.7, 300, 1.0).unwrap(),
            fixtures::periodic_wave(3, 1.0, 0.3, 3.0, 200).unwrap(),
            fixtures::periodic_wave(4, 1.0, 0.6, 2.0, 128).unwrap(),
        ] {
            let geo = curvatures(&c, 0.0).unwrap();
            for (g, m) in geo.iter().zip(mu_two_point(&c).unwrap()) {
                assert!(m >= g.spectrum().largest() - 1e-8);
            }
        }
    }

    #[test]
    fn inscribed_ball_fits_inside_a_convex_body() {
        let c = fixtures::sphere(3, 2.0, 200, 0.0).unwrap();
        for (p, rho) in c.points().iter().zip(inscribed_radii(&c).unwrap()) {
            assert!(rho >= p.r - 1e-9);
        }
        // the largest ball inside a wavy tube never exceeds the waist radius
        let c = fixtures::periodic_wave(3, 1.0, 0.2, 6.0, 200).unwrap();
        let waist = c.points().iter().map(|p| p.r).fold(f64::INFINITY, f64::min);
        for rho in inscribed_radii(&c).unwrap() {
            assert!(rho <= 1.2 + 1e-9 && rho > 0.5 * waist);
        }
    }
}
