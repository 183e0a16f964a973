use std::collections::HashSet;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use qmark_core::matrix::Mat2;
use qmark_core::mmf::*;
use qmark_core::modular::{eisenstein_e4, eisenstein_e6, theta, ThetaChar, TruncationSpec, UpperHalfPoint};
use qmark_core::Rational64;

fn h(re: f64, im: f64) -> UpperHalfPoint {
    UpperHalfPoint::new(Complex64::new(re, im)).unwrap()
}

fn e4(z: Complex64) -> qmark_core::Result<Complex64> {
    eisenstein_e4(UpperHalfPoint::new(z)?, &TruncationSpec::default())
}

fn e6(z: Complex64) -> qmark_core::Result<Complex64> {
    eisenstein_e6(UpperHalfPoint::new(z)?, &TruncationSpec::default())
}

/// A smooth function on the upper half plane with no modular symmetry.
fn wobble(z: Complex64) -> qmark_core::Result<Complex64> {
    Ok((Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z).exp() + 1.0 / (z + Complex64::new(0.3, 1.0)))
}

fn letter() -> impl Strategy<Value = Mat2> {
    prop_oneof![Just(Mat2::U), Just(Mat2::S), Just(Mat2::T), Just(Mat2::R), Just(Mat2::T.inverse())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slash_is_a_right_action(
        g1 in prop::collection::vec(letter(), 1..=6),
        g2 in prop::collection::vec(letter(), 1..=6),
        x in -0.5f64..0.5,
        y in 0.6f64..1.5,
    ) {
        let ctx = SlashContext::new(2).unwrap();
        let z = h(x, y);
        let m1 = g1.iter().fold(Mat2::IDENTITY, |a, m| a * *m);
        let m2 = g2.iter().fold(Mat2::IDENTITY, |a, m| a * *m);
        let inner = |w: Complex64| slash(&wobble, &m1, ctx, UpperHalfPoint::new(w)?);
        let lhs = slash(&inner, &m2, ctx, z).unwrap();
        let rhs = slash(&wobble, &(m1 * m2), ctx, z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }
}

#[test]
fn tr_words_are_distinct() {
    let mut seen = HashSet::new();
    let mut count = 0;
    for len in 0..=8u32 {
        for bits in 0..(1u32 << len) {
            let w: String = (0..len).map(|i| if bits >> i & 1 == 1 { 'T' } else { 'R' }).collect();
            let m = if w.is_empty() { Mat2::IDENTITY } else { mat_word(&w).unwrap() };
            seen.insert(m.projective_normal());
            count += 1;
        }
    }
    assert_eq!(seen.len(), count);
}

fn synthetic_height2() -> (KappaFunction, [fn(Complex64) -> qmark_core::Result<Complex64>; 3]) {
    fn a0(z: Complex64) -> qmark_core::Result<Complex64> {
        Ok(e4(z)?.powu(3))
    }
    fn a1(z: Complex64) -> qmark_core::Result<Complex64> {
        Ok(e6(z)?.powu(2))
    }
    fn a2(z: Complex64) -> qmark_core::Result<Complex64> {
        Ok(e4(z)?.powu(3) * 0.5 - e6(z)?.powu(2) * 2.0)
    }
    let f = KappaFunction::polynomial(vec![Arc::new(a0), Arc::new(a1), Arc::new(a2)]);
    (f, [a0, a1, a2])
}

#[test]
fn synthetic_height2_satisfies_lyg_for_every_kappa() {
    let (f, _) = synthetic_height2();
    let ctx = SlashContext::new(12).unwrap();
    for kappa in [Complex64::new(0.5, 0.0), Complex64::new(2.0, -3.0)] {
        assert!(residual_lyg(&f, kappa, ctx, h(0.2, 0.9)).unwrap() < 1e-8);
    }
}

#[test]
fn extraction_recovers_known_coordinates() {
    let (f, coords) = synthetic_height2();
    let arc = ArcSpec::default();
    for z in [h(0.1, 1.1), h(-0.3, 0.8)] {
        let exact: Vec<Complex64> = coords.iter().map(|a| a(z.z()).unwrap()).collect();
        for j in 0..3 {
            let got = extract_coordinate(&f, j, z, &arc, &exact[..j]).unwrap();
            assert!((got - exact[j]).norm() < 1e-8, "A_{j}: {got} vs {}", exact[j]);
        }
    }
}

#[test]
fn chained_extraction_first_two_coordinates() {
    let (f, coords) = synthetic_height2();
    let z = h(0.1, 1.1);
    let got = extract_coordinates(&f, 1, z, &ArcSpec::default()).unwrap();
    for j in 0..2 {
        assert!((got[j] - coords[j](z.z()).unwrap()).norm() < 1e-8);
    }
}

#[test]
fn extraction_is_linear() {
    let (f, _) = synthetic_height2();
    let z = h(0.2, 1.0);
    let arc = ArcSpec::default();
    let shifted = KappaFunction::new(None, {
        let f = f.clone();
        move |k: Complex64, w: Complex64| Ok(f.eval(k, w)? + k * k * wobble(w)?)
    });
    let base = extract_coordinates(&f, 1, z, &arc).unwrap();
    let moved = extract_coordinates(&shifted, 1, z, &arc).unwrap();
    assert!((base[0] - moved[0]).norm() < 1e-10);
    assert!((base[1] - moved[1]).norm() < 1e-8);
    let exact2: Vec<Complex64> = base.clone();
    let a2 = extract_coordinate(&f, 2, z, &arc, &exact2).unwrap();
    let b2 = extract_coordinate(&shifted, 2, z, &arc, &exact2).unwrap();
    assert!((b2 - a2 - wobble(z.z()).unwrap()).norm() < 1e-6);
}

#[test]
fn perein_on_extracted_height1_coordinates() {
    let ctx = SlashContext::new(12).unwrap();
    let f = KappaFunction::new(Some(1), |k: Complex64, w: Complex64| Ok(e4(w)?.powu(3) + k * e6(w)?.powu(2)));
    let arc = ArcSpec::default();
    let coord = |j: usize| {
        let f = f.clone();
        move |w: Complex64| -> qmark_core::Result<Complex64> {
            Ok(extract_coordinates(&f, j, UpperHalfPoint::new(w)?, &arc)?[j])
        }
    };
    let zero = |_: Complex64| Ok(Complex64::new(0.0, 0.0));
    let (a0, a1) = (coord(0), coord(1));
    for z in [h(0.1, 1.1), h(-0.35, 0.95)] {
        assert!(residual_perein(&zero, &a0, ctx, z).unwrap() < 1e-7);
        assert!(residual_perein(&a0, &a1, ctx, z).unwrap() < 1e-7);
        assert!(residual_perein(&a1, &zero, ctx, z).unwrap() < 1e-7);
    }
}

#[test]
fn third_ide_identity_follows_from_the_second() {
    let ctx = SlashContext::new(2).unwrap();
    let funcs: [fn(Complex64) -> qmark_core::Result<Complex64>; 3] = [
        wobble,
        |z| Ok(z.exp() / (z * z + 3.0)),
        |z| Ok((Complex64::new(0.0, 1.0) * z).sin() / (z + 2.0)),
    ];
    for a in funcs {
        let second = |w: Complex64| Ok(ide_defects(&a, ctx, UpperHalfPoint::new(w)?)?[1]);
        for z in [h(0.1, 0.9), h(-0.4, 1.4), h(0.45, 0.6)] {
            let third = ide_defects(&a, ctx, z).unwrap()[2];
            let combined = slash_sum(&second, &parse_mat_sum("I + U + U^2").unwrap(), ctx, z).unwrap();
            assert!((third - combined).norm() <= 1e-12 * third.norm().max(1.0));
            // pointwise bound through the three images of z
            let r = |m: Mat2| {
                let w = UpperHalfPoint::new(m.act(z.z())).unwrap();
                ide_defects(&a, ctx, w).unwrap()[1].norm() / m.automorphy(z.z()).norm().powi(2)
            };
            let bound = r(Mat2::IDENTITY) + r(Mat2::U) + r(Mat2::U * Mat2::U);
            assert!(third.norm() <= bound + 1e-12);
        }
    }
}

#[test]
fn svarbus_and_prop4_are_equivalent_for_periodic_c() {
    let ctx = SlashContext::new(4).unwrap();
    let c = |z: Complex64| {
        let q = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z).exp();
        Ok(q + 0.3 * q * q - 0.1)
    };
    for z in [h(0.1, 0.9), h(-0.2, 0.7)] {
        let s = |w: Complex64| svarbus_defect(&c, ctx, h(w.re, w.im));
        let p = prop4_defects(&c, ctx, z).unwrap();
        let shift = |n: f64| s(z.z() + n).unwrap();
        // 2C identity is s(z+1) + s(z+2); 3C identity is s(z+1) + s(z+2) + s(z+3)
        assert!((p[1] - shift(1.0) - shift(2.0)).norm() < 1e-12);
        assert!((p[2] - shift(1.0) - shift(2.0) - shift(3.0)).norm() < 1e-12);
        assert!((shift(3.0) - (p[2] - p[1])).norm() < 1e-12);
        assert!(p[0].norm() < 1e-12);
    }
}

#[test]
fn negative_controls() {
    let z = h(0.0, 1.0);
    let ide = residual_ide(&wobble, SlashContext::new(2).unwrap(), z).unwrap();
    assert!(ide[0] >= 1e-2);
    let theta4 = |w: Complex64| {
        let ch = ThetaChar::level_one(Rational64::from_integer(0), Rational64::from_integer(0));
        Ok(theta(&ch, UpperHalfPoint::new(w)?, &TruncationSpec::default())?.powu(4))
    };
    let p4 = residual_prop4(&theta4, SlashContext::new(2).unwrap(), h(0.1, 0.9)).unwrap();
    assert!(p4.iter().any(|&r| r >= 1e-2), "{p4:?}");
}

#[test]
fn g_satisfies_lyg() {
    let g = g_function(18);
    let ctx = SlashContext::new(2).unwrap();
    for kappa in [Complex64::new(0.3, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.4)] {
        let r = residual_lyg(&g, kappa, ctx, h(0.2, 0.8)).unwrap();
        assert!(r < 1e-4, "{kappa}: {r:e}");
    }
}
