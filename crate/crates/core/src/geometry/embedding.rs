//! Sweep-line test for self-intersections of a profile in the `(z, r)` half-plane.

use crate::geometry::{ProfileCurve, ProfilePoint};

#[derive(Clone, Copy)]
struct Seg {
    id: usize,
    a: ProfilePoint,
    b: ProfilePoint,
    zmin: f64,
    zmax: f64,
}

fn orient(a: ProfilePoint, b: ProfilePoint, c: ProfilePoint) -> f64 {
    (b.z - a.z) * (c.r - a.r) - (b.r - a.r) * (c.z - a.z)
}

fn on_segment(a: ProfilePoint, b: ProfilePoint, p: ProfilePoint) -> bool {
    p.z >= a.z.min(b.z) && p.z <= a.z.max(b.z) && p.r >= a.r.min(b.r) && p.r <= a.r.max(b.r)
}

/// Closed-segment intersection test.
pub(crate) fn segments_intersect(
    a: ProfilePoint,
    b: ProfilePoint,
    c: ProfilePoint,
    d: ProfilePoint,
) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// First pair of non-adjacent segments that intersect, by segment index.
pub fn first_intersection(c: &ProfileCurve) -> Option<(usize, usize)> {
    let count = c.segment_count();
    let period = c.period();
    let mut segs = Vec::with_capacity(count * 3);
    let shifts: &[f64] = if period.is_some() {
        &[-1.0, 0.0, 1.0]
    } else {
        &[0.0]
    };
    for &k in shifts {
        let dz = k * period.unwrap_or(0.0);
        for id in 0..count {
            let (mut a, mut b) = c.segment(id);
            a.z += dz;
            b.z += dz;
            segs.push(Seg {
                id,
                a,
                b,
                zmin: a.z.min(b.z),
                zmax: a.z.max(b.z),
            });
        }
    }
    segs.sort_by(|x, y| x.zmin.total_cmp(&y.zmin));
    let adjacent = |i: usize, j: usize| {
        let d = i.abs_diff(j);
        d <= 1 || (period.is_some() && d == count - 1)
    };
    for (k, s) in segs.iter().enumerate() {
        for t in &segs[k + 1..] {
            if t.zmin > s.zmax {
                break;
            }
            if adjacent(s.id, t.id) {
                continue;
            }
            if segments_intersect(s.a, s.b, t.a, t.b) {
                return Some((s.id.min(t.id), s.id.max(t.id)));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fixtures, Closure};

    #[test]
    fn sphere_is_embedded() {
        let c = fixtures::sphere(3, 1.0, 200, 0.0).unwrap();
        assert!(first_intersection(&c).is_none());
    }

    #[test]
    fn detects_a_fold() {
        let c = fixtures::sphere(3, 1.0, 64, 0.0).unwrap();
        let mut pts = c.points().to_vec();
        pts.swap(10, 50);
        let bad = ProfileCurve::new_unchecked(3, pts, Closure::ClosedCaps, c.target_spacing());
        assert!(first_intersection(&bad).is_some());
    }
}
