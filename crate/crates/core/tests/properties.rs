mod common;

use common::{affine, cx, joukowski, quadratic};
use grunsky_core::grunsky::{assemble, operator_norm, Route};
use grunsky_core::map_zoo::{post_compose_mobius, validate_rigging, MobiusTransform, PreSchwarzianFamily, Rigging};
use grunsky_core::period_map::{check_mobius_invariance, holomorphy_probe, normalize_rigging, period};
use grunsky_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn triple() -> Rigging {
    let wide = validate_rigging(
        vec![
            quadratic(0.0, 0.0, cx(0.2, 0.1)),
            joukowski(3.0, 0.5, cx(0.2, 0.0)),
            affine(-2.5, 1.5, 0.5),
        ],
        256,
    )
    .unwrap();
    post_compose_mobius(&wide, &MobiusTransform::dilation(cx(0.3, 0.0)).unwrap()).unwrap()
}

#[test]
fn dilation_invariance_on_affine_pair() {
    let r = validate_rigging(vec![affine(0.0, 0.0, 1.0), affine(3.0, 0.0, 1.0)], 256).unwrap();
    let t = MobiusTransform::dilation(cx(2.0, 1.0)).unwrap();
    assert!(check_mobius_invariance(&r, &t, 16).unwrap() <= 1e-10);
}

#[test]
fn inversion_invariance_inside_radius_two() {
    let r = triple();
    assert!(r.maps().iter().all(|f| f.boundary_samples(256).iter().all(|b| b.norm() < 2.0)));
    let t = MobiusTransform::new(cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0), cx(-5.0, 0.0)).unwrap();
    assert!(check_mobius_invariance(&r, &t, 16).unwrap() <= 1e-8);
}

#[test]
fn period_is_unchanged_by_scaling() {
    let r = validate_rigging(
        vec![
            quadratic(0.3, 0.0, cx(0.2, 0.0)),
            affine(3.0, 1.0, 1.0),
            joukowski(-3.0, 0.0, cx(0.1, 0.1)),
            affine(0.0, 3.5, 0.9),
        ],
        256,
    )
    .unwrap();
    let scaled = post_compose_mobius(&r, &MobiusTransform::dilation(cx(5.0, 0.0)).unwrap()).unwrap();
    let a = period(&r, 12, Route::Series).unwrap();
    let b = period(&scaled, 12, Route::Series).unwrap();
    assert_eq!(a.normalized_centers.len(), 1);
    assert!(a.distance(&b).unwrap() <= 1e-9);
}

#[test]
fn nearby_riggings_have_distinct_periods() {
    let build = |c: Complex64, p: f64| {
        validate_rigging(
            vec![quadratic(0.0, 0.0, c), affine(p, 0.0, 1.0), joukowski(-3.0, 0.0, cx(0.2, 0.0))],
            256,
        )
        .unwrap()
    };
    let base = period(&build(cx(0.2, 0.0), 3.0), 8, Route::Series).unwrap();
    for other in [build(cx(0.201, 0.0), 3.0), build(cx(0.2, 0.001), 3.0)] {
        let d = base.distance(&period(&other, 8, Route::Series).unwrap()).unwrap();
        assert!(d >= 1e-9, "{d:e}");
    }
}

#[test]
fn two_map_convention_can_force_a_pole_into_an_image() {
    // With p₂ − p₁ orthogonal to f₁'(0) the normalizing map has its pole
    // inside the first disk.
    let r = validate_rigging(vec![affine(0.0, 0.0, 0.8), affine(0.0, 2.5, 1.0)], 256).unwrap();
    assert!(matches!(normalize_rigging(&r), Err(Error::PoleInImage(0))));
}

#[test]
fn residual_falls_quadratically_with_step() {
    let base = quadratic(0.0, 0.0, cx(0.2, 0.0));
    let r = validate_rigging(vec![base.clone(), affine(3.0, 0.0, 1.0)], 256).unwrap();
    let family = PreSchwarzianFamily::through(&base, &[cx(0.0, 0.0), cx(1.0, 0.0)], cx(0.0, 0.0)).unwrap();
    let coarse = holomorphy_probe(0, &r, &family, 2e-3, 12).unwrap();
    let fine = holomorphy_probe(0, &r, &family, 2e-4, 12).unwrap();
    let ratio = coarse.residual / fine.residual;
    assert!((90.0..=110.0).contains(&ratio), "{ratio}");
}

fn sep_pair(d: f64, angle: f64, c: Complex64) -> Rigging {
    let p = Complex64::from_polar(d, angle);
    validate_rigging(vec![quadratic(0.0, 0.0, c), affine(p.re, p.im, 1.0)], 128).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_below_one_and_symmetric(
        d in 2.5f64..8.0,
        angle in 0.0f64..6.28,
        re in -0.3f64..0.3,
        im in -0.3f64..0.3,
    ) {
        let r = sep_pair(d, angle, cx(re, im));
        let op = assemble(&r, 12, Route::Series).unwrap();
        prop_assert!(operator_norm(&op).unwrap() < 1.0);
        prop_assert!(op.symmetry_defect() <= 1e-12);
    }

    #[test]
    fn random_mobius_invariance(
        a_re in -2.0f64..2.0,
        a_im in -2.0f64..2.0,
        pole_angle in 0.0f64..6.28,
        pole_dist in 4.0f64..20.0,
    ) {
        let r = triple();
        let w = Complex64::from_polar(pole_dist, pole_angle);
        let a = cx(a_re, a_im);
        // (a z + 1)/(z − w); degenerate only when a w + 1 = 0.
        prop_assume!((a * w + cx(1.0, 0.0)).norm() > 1e-3);
        let t = MobiusTransform::new(a, cx(1.0, 0.0), cx(1.0, 0.0), -w).unwrap();
        prop_assert!(check_mobius_invariance(&r, &t, 12).unwrap() <= 1e-8);
    }
}
