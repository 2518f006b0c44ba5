use serde::{Deserialize, Serialize};

use crate::geometry::GeometryError;

/// A point `(z, r)` of the generating curve: `z` along the axis, `r >= 0` the distance to it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub z: f64,
    pub r: f64,
}

impl ProfilePoint {
    pub fn new(z: f64, r: f64) -> Self {
        Self { z, r }
    }

    pub fn dist(&self, other: &ProfilePoint) -> f64 {
        (self.z - other.z).hypot(self.r - other.r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Closure {
    /// Runs from a pole at the lower end to a pole at the upper end; `r = 0` at both.
    ClosedCaps,
    /// One period of a curve invariant under `z -> z + period`.
    PeriodicInZ { period: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Extension {
    Stored,
    Reflected,
    Translated(f64),
}

/// Smallest number of points a profile may carry.
pub const MIN_POINTS: usize = 16;

/// Largest angle between the first chord at a pole and the radial direction.
const POLE_CHORD_SLOPE: f64 = 0.5;

/// Arc-length discretized generating curve of a rotationally symmetric hypersurface in
/// `R^{n+1}`. The outward normal is `(-r', z')`, which makes spheres positively curved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    n: usize,
    points: Vec<ProfilePoint>,
    closure: Closure,
    target_spacing: f64,
}

impl ProfileCurve {
    /// Validates every invariant, including embeddedness.
    pub fn new(
        n: usize,
        points: Vec<ProfilePoint>,
        closure: Closure,
        target_spacing: f64,
    ) -> Result<Self, GeometryError> {
        let c = Self::new_unchecked(n, points, closure, target_spacing);
        c.validate()?;
        Ok(c)
    }

    /// Skips validation; callers are expected to run [`ProfileCurve::validate`].
    pub fn new_unchecked(
        n: usize,
        points: Vec<ProfilePoint>,
        closure: Closure,
        target_spacing: f64,
    ) -> Self {
        Self {
            n,
            points,
            closure,
            target_spacing,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[ProfilePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn target_spacing(&self) -> f64 {
        self.target_spacing
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.closure, Closure::ClosedCaps)
    }

    pub fn period(&self) -> Option<f64> {
        match self.closure {
            Closure::PeriodicInZ { period } => Some(period),
            Closure::ClosedCaps => None,
        }
    }

    pub(crate) fn points_mut(&mut self) -> &mut [ProfilePoint] {
        &mut self.points
    }

    pub(crate) fn target_spacing_mut(&mut self, h: f64) {
        self.target_spacing = h;
    }

    /// Number of segments, including the wrap-around segment of a periodic curve.
    pub fn segment_count(&self) -> usize {
        if self.is_closed() {
            self.len() - 1
        } else {
            self.len()
        }
    }

    /// Endpoints of segment `k`; the periodic wrap segment ends at the shifted first point.
    pub fn segment(&self, k: usize) -> (ProfilePoint, ProfilePoint) {
        let a = self.points[k];
        let b = if k + 1 < self.len() {
            self.points[k + 1]
        } else {
            let p = self.points[0];
            ProfilePoint::new(p.z + self.period().unwrap_or(0.0), p.r)
        };
        (a, b)
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        (0..self.segment_count())
            .map(|k| {
                let (a, b) = self.segment(k);
                a.dist(&b)
            })
            .collect()
    }

    /// Total chord length of the profile (one period when periodic).
    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Point at index `i`, extended past the ends by reflection across the axis
    /// (closed caps) or by translation (periodic). Also returns the chord-length
    /// parameter of that point given the parameters `s` of the stored points.
    pub(crate) fn extended(&self, s: &[f64], i: isize) -> (ProfilePoint, f64) {
        let (j, sp, shift) = self.extended_index(s, i);
        let p = self.points[j];
        match shift {
            Extension::Stored => (p, sp),
            Extension::Reflected => (ProfilePoint::new(p.z, -p.r), sp),
            Extension::Translated(dz) => (ProfilePoint::new(p.z + dz, p.r), sp),
        }
    }

    /// Stored index behind the extended index `i`, its chord parameter, and how the
    /// stored point is mapped.
    pub(crate) fn extended_index(&self, s: &[f64], i: isize) -> (usize, f64, Extension) {
        let m = self.len() as isize;
        match self.closure {
            Closure::ClosedCaps => {
                let last = m - 1;
                if i < 0 {
                    let j = (-i) as usize;
                    (j, -s[j], Extension::Reflected)
                } else if i > last {
                    let j = (2 * last - i) as usize;
                    (j, 2.0 * s[last as usize] - s[j], Extension::Reflected)
                } else {
                    (i as usize, s[i as usize], Extension::Stored)
                }
            }
            Closure::PeriodicInZ { period } => {
                let total = s[m as usize];
                let k = i.div_euclid(m);
                let j = i.rem_euclid(m) as usize;
                if k == 0 {
                    (j, s[j], Extension::Stored)
                } else {
                    (
                        j,
                        s[j] + k as f64 * total,
                        Extension::Translated(k as f64 * period),
                    )
                }
            }
        }
    }

    /// Cumulative chord length at each stored point; periodic curves get one extra
    /// entry holding the full period length.
    pub fn chord_parameter(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.len() + 1);
        s.push(0.0);
        let mut acc = 0.0;
        for len in self.segment_lengths() {
            acc += len;
            s.push(acc);
        }
        s
    }

    pub fn max_radius(&self) -> f64 {
        self.points.iter().map(|p| p.r).fold(0.0, f64::max)
    }

    /// Volume of the enclosed region (per period when periodic), `omega_n sum r^n dz`.
    pub fn enclosed_volume(&self) -> f64 {
        let n = self.n as i32;
        let mut acc = 0.0;
        for k in 0..self.segment_count() {
            let (a, b) = self.segment(k);
            acc += 0.5 * (a.r.powi(n) + b.r.powi(n)) * (b.z - a.z);
        }
        unit_ball_volume(self.n) * acc
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.n < 3 {
            return Err(GeometryError::DegenerateProfile(format!(
                "dimension {} is below 3",
                self.n
            )));
        }
        if self.len() < MIN_POINTS {
            return Err(GeometryError::DegenerateProfile(format!(
                "{} points, need at least {MIN_POINTS}",
                self.len()
            )));
        }
        if !(self.target_spacing > 0.0) {
            return Err(GeometryError::DegenerateProfile(
                "target spacing must be positive".into(),
            ));
        }
        if self
            .points
            .iter()
            .any(|p| !p.z.is_finite() || !p.r.is_finite())
        {
            return Err(GeometryError::DegenerateProfile("non-finite point".into()));
        }
        let last = self.len() - 1;
        match self.closure {
            Closure::ClosedCaps => {
                if self.points[0].r != 0.0 || self.points[last].r != 0.0 {
                    return Err(GeometryError::DegenerateProfile(
                        "closed profile must start and end on the axis".into(),
                    ));
                }
                for (pole, next) in [(0, 1), (last, last - 1)] {
                    let (a, b) = (self.points[pole], self.points[next]);
                    if (b.z - a.z).abs() > POLE_CHORD_SLOPE * a.dist(&b) {
                        return Err(GeometryError::DegenerateProfile(format!(
                            "profile does not meet the axis at a right angle at index {pole}"
                        )));
                    }
                }
                if let Some(i) = (1..last).find(|&i| !(self.points[i].r > 0.0)) {
                    return Err(GeometryError::DegenerateProfile(format!(
                        "r <= 0 at interior index {i}"
                    )));
                }
            }
            Closure::PeriodicInZ { period } => {
                if !(period > 0.0) {
                    return Err(GeometryError::DegenerateProfile(
                        "period must be positive".into(),
                    ));
                }
                if let Some(i) = (0..self.len()).find(|&i| !(self.points[i].r > 0.0)) {
                    return Err(GeometryError::DegenerateProfile(format!(
                        "r <= 0 at index {i}"
                    )));
                }
            }
        }
        let h = self.target_spacing;
        if let Some((k, len)) = self
            .segment_lengths()
            .into_iter()
            .enumerate()
            .find(|&(_, len)| !(len >= 0.5 * h && len <= 2.0 * h))
        {
            return Err(GeometryError::DegenerateProfile(format!(
                "segment {k} has length {len}, outside [0.5, 2] x {h}"
            )));
        }
        if let Some((a, b)) = crate::geometry::embedding::first_intersection(self) {
            return Err(GeometryError::SelfIntersection(a, b));
        }
        Ok(())
    }
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures;

    #[test]
    fn sphere_volume_and_length() {
        let c = fixtures::sphere(3, 1.0, 400, 0.0).unwrap();
        // |B^4| = pi^2 / 2
        let v = c.enclosed_volume();
        assert!((v - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-3, "{v}");
        assert!((c.length() - std::f64::consts::PI).abs() < 1e-4);
    }

    #[test]
    fn cylinder_volume_per_period() {
        let c = fixtures::cylinder(3, 2.0, 1.5, 32).unwrap();
        let expected = unit_ball_volume(3) * 8.0 * 1.5;
        assert!((c.enclosed_volume() - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_profiles() {
        let c = fixtures::sphere(3, 1.0, 40, 0.0).unwrap();
        let mut pts = c.points().to_vec();
        pts[5].r = -0.1;
        assert!(ProfileCurve::new(3, pts, Closure::ClosedCaps, c.target_spacing()).is_err());
        let pts = c.points()[..10].to_vec();
        assert!(ProfileCurve::new(3, pts, Closure::ClosedCaps, c.target_spacing()).is_err());
        let pts = c.points().to_vec();
        assert!(ProfileCurve::new(3, pts, Closure::ClosedCaps, 10.0).is_err());
    }

    #[test]
    fn extended_points_reflect_and_wrap() {
        let c = fixtures::sphere(3, 1.0, 40, 0.0).unwrap();
        let s = c.chord_parameter();
        let (p, sp) = c.extended(&s, -2);
        assert_eq!(p.r, -c.points()[2].r);
        assert_eq!(sp, -s[2]);
        let last = c.len() as isize - 1;
        let (p, _) = c.extended(&s, last + 1);
        assert_eq!(p.r, -c.points()[last as usize - 1].r);

        let c = fixtures::cylinder(3, 1.0, 2.0, 20).unwrap();
        let s = c.chord_parameter();
        let (p, sp) = c.extended(&s, 21);
        assert!((p.z - (c.points()[1].z + 2.0)).abs() < 1e-15);
        assert!((sp - (s[1] + s[20])).abs() < 1e-15);
    }
}
