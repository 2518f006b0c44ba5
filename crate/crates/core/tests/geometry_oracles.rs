//! Independent checks of the profile geometry: closed forms, dense sampling oracles
//! and invariances.

use gkflow::geometry::pseudocone::{
    is_enclosed, pseudo_cone_radial_curvature_unsquared, to_half_plane,
};
use gkflow::geometry::{
    cone_containment, curvatures, fixtures, mu_two_point, pseudo_cone_radial_curvature,
    reparametrize, Containment, ProfileCurve, PseudoCone,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn pseudo_cone_radial_curvature_bound_under_both_readings() {
    for d in [0.01, 0.1, 1.0] {
        let pc = PseudoCone::new((0.0, 0.0), (d, 0.0)).unwrap();
        for k in 1..=1000 {
            let s = k as f64 / 1001.0;
            let bound = -1e-3 / d;
            assert!(pseudo_cone_radial_curvature(&pc, s) < bound);
            assert!(pseudo_cone_radial_curvature_unsquared(&pc, s) < bound);
        }
    }
}

#[test]
fn sphere_curvature_from_the_parametrization_formula() {
    // r(s) = R sin(s/R), z(s) = -R cos(s/R), sampled exactly
    let c = fixtures::sphere(3, 1.0, 400, 0.0).unwrap();
    for g in curvatures(&c, 0.0).unwrap() {
        for l in g.spectrum().lambdas() {
            assert!((l - 1.0).abs() <= 5e-5);
        }
    }
}

#[test]
fn orientation_makes_convex_bodies_positive() {
    for radius in [0.3, 1.0, 4.0] {
        let c = fixtures::sphere(4, radius, 250, -1.0).unwrap();
        let geo = curvatures(&c, 0.0).unwrap();
        let sum_rot: f64 = geo.iter().map(|g| g.lambda_rot).sum();
        assert!(sum_rot > 0.0);
        let h = geo[100].spectrum().mean_curvature();
        assert!((h - 4.0 / radius).abs() < 1e-8);
    }
}

/// Brute-force classification: every point of a dense boundary sampling (ten times the
/// resolution in each direction) must be enclosed.
fn dense_oracle(pc: &PseudoCone, c: &ProfileCurve) -> bool {
    pc.boundary_samples(2000, 160)
        .into_iter()
        .all(|q| is_enclosed(c, to_half_plane(q)))
}

#[test]
fn cone_containment_agrees_with_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut agreed = 0;
    let mut inside = 0;
    while agreed < 50 {
        let c = if agreed % 2 == 0 {
            fixtures::sphere(
                3,
                rng.random_range(0.5..2.0),
                64,
                rng.random_range(-1.0..1.0),
            )
            .unwrap()
        } else {
            fixtures::periodic_wave(
                3,
                rng.random_range(0.5..1.5),
                rng.random_range(0.0..0.4),
                rng.random_range(1.0..4.0),
                64,
            )
            .unwrap()
        };
        let zs: Vec<f64> = c.points().iter().map(|p| p.z).collect();
        let (zlo, zhi) = (
            zs[0].min(zs[zs.len() - 1]),
            zs.iter().cloned().fold(f64::MIN, f64::max),
        );
        let rmax = c.max_radius();
        let pick =
            |rng: &mut ChaCha8Rng| (rng.random_range(zlo..zhi), rng.random_range(-rmax..rmax));
        let (apex, base) = (pick(&mut rng), pick(&mut rng));
        let Ok(pc) = PseudoCone::new(apex, base) else {
            continue;
        };
        if !is_enclosed(&c, to_half_plane(pc.point(0.0, 0.0, 0.0))) {
            continue;
        }
        let got = cone_containment(&pc, &c).unwrap();
        let oracle = dense_oracle(&pc, &c);
        match got {
            Containment::Inside => assert!(oracle, "{pc:?}"),
            Containment::Exits => assert!(!oracle, "{pc:?}"),
            Containment::Touches(_) => {}
        }
        inside += usize::from(oracle);
        agreed += 1;
    }
    // both outcomes must be exercised
    assert!(inside > 5 && inside < 45, "{inside}");
}

#[test]
fn reparametrization_preserves_the_wave() {
    let c = fixtures::periodic_wave(3, 1.0, 0.3, 3.0, 300).unwrap();
    let before: Vec<f64> = curvatures(&c, 0.0)
        .unwrap()
        .iter()
        .map(|g| g.lambda_profile)
        .collect();
    let d = reparametrize(&c).unwrap();
    let after: Vec<f64> = curvatures(&d, 0.0)
        .unwrap()
        .iter()
        .map(|g| g.lambda_profile)
        .collect();
    let hi = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max);
    let lo = |v: &[f64]| v.iter().cloned().fold(f64::MAX, f64::min);
    assert!((hi(&before) - hi(&after)).abs() < 1e-5);
    assert!((lo(&before) - lo(&after)).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mu_on_spheres_is_the_inverse_radius(radius in 0.2f64..5.0, z0 in -3.0f64..3.0) {
        let c = fixtures::sphere(3, radius, 200, z0).unwrap();
        for m in mu_two_point(&c).unwrap() {
            prop_assert!((m * radius - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn curvature_scales_inversely_with_dilation(scale in 0.1f64..10.0) {
        let c = fixtures::periodic_wave(3, 1.0, 0.3, 3.0, 128).unwrap();
        let scaled = ProfileCurve::new(
            3,
            c.points().iter().map(|p| gkflow::geometry::ProfilePoint::new(p.z * scale, p.r * scale)).collect(),
            gkflow::geometry::Closure::PeriodicInZ { period: 3.0 * scale },
            c.target_spacing() * scale,
        ).unwrap();
        let a = curvatures(&c, 0.0).unwrap();
        let b = curvatures(&scaled, 0.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.lambda_profile - scale * y.lambda_profile).abs() < 1e-9 * (1.0 + x.lambda_profile.abs()));
            prop_assert!((x.lambda_rot - scale * y.lambda_rot).abs() < 1e-12);
        }
    }
}
