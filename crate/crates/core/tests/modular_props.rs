use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use qmark_core::modular::*;
use qmark_core::period::centr_defect;

fn char_strategy() -> impl Strategy<Value = ThetaChar> {
    (-12i64..12, 1i64..9, -12i64..12, 1i64..9, 1u32..4)
        .prop_map(|(p, q, r, s, k)| ThetaChar::new(Rational64::new(p, q), Rational64::new(r, s), k).unwrap())
}

fn point_strategy() -> impl Strategy<Value = UpperHalfPoint> {
    (-1.0f64..1.0, 0.5f64..2.0).prop_map(|(x, y)| UpperHalfPoint::new(Complex64::new(x, y)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_rule_holds(ch in char_strategy(), z in point_strategy()) {
        for rule in Prop5Rule::ALL {
            let res = residual_prop5(rule, &ch, z).unwrap();
            prop_assert!(res < 1e-8, "rule {} {:?} {:?}: {:e}", rule.label(), ch, z, res);
        }
    }

    #[test]
    fn level_reduction(ch in char_strategy(), z in point_strategy()) {
        prop_assert!(residual_level_reduction(&ch, z).unwrap() < 1e-12);
    }

    #[test]
    fn odd_characteristic_vanishes(n in -3i64..3, m in -3i64..3, z in point_strategy()) {
        let ch = ThetaChar::level_one(Rational64::new(2 * n + 1, 2), Rational64::new(2 * m + 1, 2));
        prop_assert!(is_odd_characteristic(&ch));
        prop_assert!(theta(&ch, z, &TruncationSpec::default()).unwrap().norm() < 1e-12);
    }
}

#[test]
fn scaled_g2_satisfies_the_three_term_equation() {
    let trunc = TruncationSpec::default();
    let h = |z: Complex64| {
        let p = UpperHalfPoint::new(z)?;
        Ok(eisenstein_g2(p, &trunc)? * Complex64::new(0.0, 1.0 / (2.0 * PI)))
    };
    for kappa in [Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.2), Complex64::new(0.9, -0.1)] {
        for z in [Complex64::new(0.0, 1.0), Complex64::new(-0.4, 0.6), Complex64::new(1.3, 0.9)] {
            let d = centr_defect(kappa, z, h).unwrap();
            assert!(d.norm() < 1e-8, "{kappa} {z}: {d}");
        }
    }
}
