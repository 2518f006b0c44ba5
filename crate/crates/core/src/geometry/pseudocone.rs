//! Pseudo-cones: solids of revolution around the segment from an apex `x` to a base
//! point `p`, with radius `phi(s) d` at the fraction `s` of the way from `x` to `p`.
//!
//! Apex and base live in a meridian plane of the profile, given as `(z, y)` with `y`
//! the signed distance to the axis. Points of the ambient space are reduced to
//! `(z, y, w)`, where `w` collects the directions orthogonal to that plane.

use serde::{Deserialize, Serialize};

use crate::geometry::{GeometryError, ProfileCurve, ProfilePoint};

/// Half-aperture at the apex, in radians.
pub const APERTURE: f64 = 0.01;
/// Relative tolerance (times `d`) of the containment classification.
pub const CONTAINMENT_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_AXIAL_SAMPLES: usize = 200;
pub const DEFAULT_ANGULAR_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoCone {
    pub apex: (f64, f64),
    pub base: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Containment {
    Inside,
    /// First contact with the hypersurface, as a point of the meridian half-plane.
    Touches(ProfilePoint),
    Exits,
}

impl PseudoCone {
    pub fn new(apex: (f64, f64), base: (f64, f64)) -> Result<Self, GeometryError> {
        let pc = Self { apex, base };
        if !(pc.d() > 0.0) || !pc.d().is_finite() {
            return Err(GeometryError::DegenerateProfile(
                "apex and base must be distinct finite points".into(),
            ));
        }
        Ok(pc)
    }

    pub fn d(&self) -> f64 {
        (self.base.0 - self.apex.0).hypot(self.base.1 - self.apex.1)
    }

    pub fn phi(s: f64) -> f64 {
        APERTURE.tan() * (s + s * s)
    }

    pub fn phi_prime(s: f64) -> f64 {
        APERTURE.tan() * (1.0 + 2.0 * s)
    }

    pub fn phi_second(_s: f64) -> f64 {
        2.0 * APERTURE.tan()
    }

    /// Point `x + s (p - x) + v` with `|v| = rho_frac * phi(s) d` at angle `psi`
    /// from the meridian plane, as `(z, y, w)`.
    pub fn point(&self, s: f64, rho_frac: f64, psi: f64) -> [f64; 3] {
        let d = self.d();
        let (az, ay) = (
            (self.base.0 - self.apex.0) / d,
            (self.base.1 - self.apex.1) / d,
        );
        // in-plane unit normal to the axis of the cone
        let (nz, ny) = (-ay, az);
        let rho = rho_frac * Self::phi(s) * d;
        let (c, sn) = (psi.cos(), psi.sin());
        [
            self.apex.0 + s * d * az + rho * c * nz,
            self.apex.1 + s * d * ay + rho * c * ny,
            rho * sn,
        ]
    }

    /// Samples of the boundary: the lateral surface, the apex and the base disk.
    /// Angles cover `[0, pi]`; the other half follows by reflection `w -> -w`.
    pub fn boundary_samples(&self, axial: usize, angular: usize) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity((axial + 2) * (angular + 1) + 1);
        out.push(self.point(0.0, 0.0, 0.0));
        for a in 0..=angular {
            let psi = std::f64::consts::PI * a as f64 / angular as f64;
            for k in 1..=axial {
                out.push(self.point(k as f64 / axial as f64, 1.0, psi));
            }
            for k in 0..axial.min(8) {
                out.push(self.point(1.0, k as f64 / 8.0, psi));
            }
        }
        out
    }
}

/// Meridional principal curvature of the lateral surface at parameter `s`, with
/// respect to the outward normal of the pseudo-cone.
pub fn pseudo_cone_radial_curvature(pc: &PseudoCone, s: f64) -> f64 {
    let p1 = PseudoCone::phi_prime(s);
    -PseudoCone::phi_second(s) * (1.0 + p1 * p1).powf(-1.5) / pc.d()
}

/// The same quantity with the normalizing factor `(1 + phi')^{-3/2}`.
pub fn pseudo_cone_radial_curvature_unsquared(pc: &PseudoCone, s: f64) -> f64 {
    -PseudoCone::phi_second(s) * (1.0 + PseudoCone::phi_prime(s)).powf(-1.5) / pc.d()
}

/// Reduce a point `(z, y, w)` to the meridian half-plane.
pub fn to_half_plane(q: [f64; 3]) -> ProfilePoint {
    ProfilePoint::new(q[0], q[1].hypot(q[2]))
}

/// Whether `q` (in the half-plane) lies in the region bounded by the revolved profile.
pub fn is_enclosed(c: &ProfileCurve, q: ProfilePoint) -> bool {
    let mut crossings = 0usize;
    for_each_segment(c, q.z, |a, b| {
        if (a.z <= q.z) != (b.z <= q.z) {
            let r = a.r + (q.z - a.z) / (b.z - a.z) * (b.r - a.r);
            if r > q.r {
                crossings += 1;
            }
        }
    });
    crossings % 2 == 1
}

/// Distance from `q` to the profile (the axis closing a capped profile is not part of
/// the hypersurface), positive inside the enclosed region.
pub fn signed_distance(c: &ProfileCurve, q: ProfilePoint) -> f64 {
    let mut best = f64::INFINITY;
    for_each_segment(c, q.z, |a, b| {
        best = best.min(point_segment_distance(q, a, b))
    });
    if is_enclosed(c, q) {
        best
    } else {
        -best
    }
}

fn for_each_segment(c: &ProfileCurve, z: f64, mut f: impl FnMut(ProfilePoint, ProfilePoint)) {
    let shifts: Vec<f64> = match c.period() {
        None => vec![0.0],
        Some(p) => {
            // translate so that z lies within one period of the stored points
            let z0 = c.points()[0].z;
            let k = ((z - z0) / p).floor();
            vec![(k - 1.0) * p, k * p, (k + 1.0) * p]
        }
    };
    for dz in shifts {
        for k in 0..c.segment_count() {
            let (mut a, mut b) = c.segment(k);
            a.z += dz;
            b.z += dz;
            f(a, b);
        }
    }
}

fn point_segment_distance(q: ProfilePoint, a: ProfilePoint, b: ProfilePoint) -> f64 {
    let (ez, er) = (b.z - a.z, b.r - a.r);
    let len2 = ez * ez + er * er;
    let t = if len2 > 0.0 {
        (((q.z - a.z) * ez + (q.r - a.r) * er) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (q.z - a.z - t * ez).hypot(q.r - a.r - t * er)
}

/// Smallest signed distance over the boundary samples, with the sample attaining it.
pub fn containment_margin(
    pc: &PseudoCone,
    c: &ProfileCurve,
    axial: usize,
    angular: usize,
) -> (f64, ProfilePoint) {
    pc.boundary_samples(axial, angular)
        .into_iter()
        .map(|q| {
            let q = to_half_plane(q);
            (signed_distance(c, q), q)
        })
        .fold((f64::INFINITY, ProfilePoint::new(0.0, 0.0)), |acc, x| {
            if x.0 < acc.0 {
                x
            } else {
                acc
            }
        })
}

/// Classify the pseudo-cone against the region bounded by the revolved profile.
pub fn cone_containment(pc: &PseudoCone, c: &ProfileCurve) -> Result<Containment, GeometryError> {
    let tol = CONTAINMENT_TOLERANCE * pc.d();
    let apex = to_half_plane(pc.point(0.0, 0.0, 0.0));
    if signed_distance(c, apex) < -tol {
        return Err(GeometryError::ApexOutside);
    }
    let (margin, at) = containment_margin(pc, c, DEFAULT_AXIAL_SAMPLES, DEFAULT_ANGULAR_SAMPLES);
    Ok(if margin > tol {
        Containment::Inside
    } else if margin >= -tol {
        Containment::Touches(at)
    } else {
        Containment::Exits
    })
}

/// Slide the apex along the ray from `base` in direction `dir` until the pseudo-cone
/// touches the hypersurface. `inside` must give a contained cone and `outside` an exiting
/// one; returns the touching cone.
pub fn touching_apex(
    c: &ProfileCurve,
    base: (f64, f64),
    dir: (f64, f64),
    mut inside: f64,
    mut outside: f64,
) -> Result<PseudoCone, GeometryError> {
    let cone = |t: f64| PseudoCone::new((base.0 + t * dir.0, base.1 + t * dir.1), base);
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        let pc = cone(mid)?;
        match cone_containment(&pc, c) {
            Ok(Containment::Touches(_)) => return Ok(pc),
            Ok(Containment::Inside) => inside = mid,
            Ok(Containment::Exits) | Err(GeometryError::ApexOutside) => outside = mid,
            Err(e) => return Err(e),
        }
    }
    Err(GeometryError::DegenerateProfile(
        "bisection did not reach a touching position".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures;

    #[test]
    fn radial_curvature_closed_forms() {
        let pc = PseudoCone::new((0.0, 0.0), (1.0, 0.0)).unwrap();
        let t = 0.01f64.tan();
        assert!(
            (pseudo_cone_radial_curvature(&pc, 0.0) + 2.0 * t * (1.0 + t * t).powf(-1.5)).abs()
                < 1e-15
        );
        // -2 tan(1/100) up to the (1 + tan^2)^{-3/2} factor
        assert!((pseudo_cone_radial_curvature(&pc, 0.0) + 0.0200007).abs() < 1e-5);
        let at1 = -2.0 * t * (1.0 + 9.0 * t * t).powf(-1.5);
        assert!((pseudo_cone_radial_curvature(&pc, 1.0) - at1).abs() < 1e-15);
        let pc2 = PseudoCone::new((0.0, 0.0), (2.0, 0.0)).unwrap();
        let ratio =
            pseudo_cone_radial_curvature(&pc2, 0.4) / pseudo_cone_radial_curvature(&pc, 0.4);
        assert!((ratio - 0.5).abs() < 1e-15);
    }

    #[test]
    fn aperture_at_the_apex() {
        assert!((PseudoCone::phi_prime(0.0).atan() - APERTURE).abs() < 1e-15);
    }

    #[test]
    fn boundary_decomposition() {
        let pc = PseudoCone::new((0.1, 0.2), (0.5, -0.1)).unwrap();
        let d = pc.d();
        let base = [pc.base.0, pc.base.1, 0.0];
        for q in pc.boundary_samples(50, 8) {
            let to_base =
                ((q[0] - base[0]).powi(2) + (q[1] - base[1]).powi(2) + q[2].powi(2)).sqrt();
            let to_apex = (q[0] - pc.apex.0).hypot(q[1] - pc.apex.1).hypot(q[2]);
            // lateral points satisfy |v| = phi(s) d for their axial fraction s
            let (az, ay) = ((pc.base.0 - pc.apex.0) / d, (pc.base.1 - pc.apex.1) / d);
            let s = ((q[0] - pc.apex.0) * az + (q[1] - pc.apex.1) * ay) / d;
            let v = (to_apex * to_apex - (s * d).powi(2)).max(0.0).sqrt();
            let on_lateral = s > 0.0 && s < 1.0 && (v - PseudoCone::phi(s) * d).abs() <= 1e-9;
            assert!(on_lateral || to_apex <= 1e-9 || to_base <= 0.25 * d + 1e-9);
        }
    }

    #[test]
    fn sphere_contains_a_short_cone() {
        let c = fixtures::sphere(3, 1.0, 400, 0.0).unwrap();
        let pc = PseudoCone::new((0.3, 0.0), (0.0, 0.0)).unwrap();
        assert_eq!(cone_containment(&pc, &c).unwrap(), Containment::Inside);
        let pc = PseudoCone::new((0.0, 0.3), (0.0, 0.0)).unwrap();
        assert_eq!(cone_containment(&pc, &c).unwrap(), Containment::Inside);
    }

    #[test]
    fn long_cone_exits_a_cylinder() {
        let c = fixtures::cylinder(3, 0.5, 1.0, 64).unwrap();
        // radius at the base is 2 tan(0.01) d > 0.5 once d > 25
        let pc = PseudoCone::new((0.0, 0.0), (40.0, 0.0)).unwrap();
        assert_eq!(cone_containment(&pc, &c).unwrap(), Containment::Exits);
        let pc = PseudoCone::new((0.0, 0.0), (10.0, 0.0)).unwrap();
        assert_eq!(cone_containment(&pc, &c).unwrap(), Containment::Inside);
    }

    #[test]
    fn apex_outside_is_an_error() {
        let c = fixtures::sphere(3, 1.0, 200, 0.0).unwrap();
        let pc = PseudoCone::new((0.0, 1.5), (0.0, 0.0)).unwrap();
        assert_eq!(cone_containment(&pc, &c), Err(GeometryError::ApexOutside));
    }

    #[test]
    fn bisection_finds_contact() {
        let c = fixtures::sphere(3, 1.0, 200, 0.0).unwrap();
        let pc = touching_apex(&c, (0.0, 0.0), (1.0, 0.0), 0.5, 1.5).unwrap();
        match cone_containment(&pc, &c).unwrap() {
            Containment::Touches(q) => assert!((q.z.hypot(q.r) - 1.0).abs() < 1e-3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn region_test_on_a_periodic_profile() {
        let c = fixtures::cylinder(3, 1.0, 2.0, 32).unwrap();
        assert!(is_enclosed(&c, ProfilePoint::new(17.3, 0.5)));
        assert!(!is_enclosed(&c, ProfilePoint::new(-5.1, 1.5)));
        assert!((signed_distance(&c, ProfilePoint::new(3.0, 0.25)) - 0.75).abs() < 1e-12);
    }
}
