use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use qmark_core::mmf::SlashContext;
use qmark_core::modular::{theta, ThetaChar, TruncationSpec, UpperHalfPoint};
use qmark_core::poly::CPoly;
use qmark_core::sporadic::*;
use qmark_core::QmarkError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ch(p: i64, q: i64, s: i64, t: i64) -> ThetaChar {
    ThetaChar::level_one(Rational64::new(p, q), Rational64::new(s, t))
}

fn gamma2() -> FunctionBasis {
    catalog("gamma2-classic").unwrap().functions()
}

fn pair_for(basis: &FunctionBasis, offset: usize) -> TransformPair {
    let ctx = SlashContext::new(basis.weight).unwrap();
    fit_transform_pair(basis, ctx, &sample_points(3 * basis.len(), offset)).unwrap()
}

#[test]
fn quarter_catalog_sizes() {
    let mut sizes: Vec<usize> = quarter_partition().unwrap().iter().map(|o| o.orbit_size).collect();
    sizes.sort();
    assert_eq!(sizes, vec![1, 3, 6]);
}

// The T image of (1/3, 1/3) is (1/3, 1/6) up to a phase, checked on the
// theta series itself rather than on the characteristic bookkeeping.
#[test]
fn thirds_and_sixths_share_an_orbit() {
    let trunc = TruncationSpec::default();
    for z in [c(0.1, 0.9), c(-0.3, 0.6)] {
        let lhs = theta(&ch(1, 3, 1, 3), UpperHalfPoint::new(z + 1.0).unwrap(), &trunc).unwrap();
        let rhs = theta(&ch(1, 3, 1, 6), UpperHalfPoint::new(z).unwrap(), &trunc).unwrap();
        let phase = Complex64::from_polar(1.0, -PI * (1.0 / 9.0 + 1.0 / 3.0));
        // (1/3, 7/6) and (1/3, 1/6) differ by e^{2πi/3}
        let shift = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((lhs - phase * shift * rhs).norm() < 1e-12);
    }
    let sixth = sixth_partition().unwrap();
    let big = sixth.iter().find(|o| o.orbit_size == 12).unwrap();
    assert!(big.members.contains(&canonical(&ch(1, 3, 1, 3))));
    assert!(big.members.contains(&canonical(&ch(0, 1, 1, 6))));
}

#[test]
fn classical_sublists_are_not_invariant() {
    for name in ["sixth-Q2", "sixth-Q3"] {
        let err = run_pipeline(&catalog(name).unwrap().functions(), 0).unwrap_err();
        assert!(matches!(err, QmarkError::Inconsistency(_)), "{name}: {err}");
    }
    let joined = run_pipeline(&catalog("sixth-Q23").unwrap().functions(), 0).unwrap();
    assert_eq!(joined.dimension, 12);
    assert!(joined.fit_residual < 1e-8);
}

#[test]
fn gamma2_polynomial() {
    let pair = pair_for(&gamma2(), 0);
    assert!(pair.fit_residual < 1e-9);
    let p = det_polynomial(&pair).unwrap();
    let expect = CPoly::from_real(&[0.0, 3.0, -3.0]);
    assert_eq!(p.degree(), Some(2));
    for (x, y) in p.coeffs().iter().zip(expect.coeffs()) {
        assert!((x - y).norm() < 1e-7, "{p}");
    }
    let inside = roots_in_d(&p).unwrap();
    assert_eq!(inside.len(), 1);
    assert!(inside[0].value.norm() < 1e-9);
}

// u₁ = ϑ⁴(0,1/2), u₂ = ϑ⁴(1/2,0): u₁(z − 1) = ϑ⁴(0,0)(z) = u₁ + u₂ by the
// Jacobi identity, and (n + 1/2)² ≡ 1/4 mod 2 gives u₂(z − 1) = −u₂.
#[test]
fn gamma2_shift_matrix_matches_hand_derivation() {
    let pair = pair_for(&gamma2(), 40);
    let expect = [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
    for (i, row) in expect.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            assert!((pair.mat_a[(i, j)] - e).norm() < 1e-9, "A[{i}][{j}] = {}", pair.mat_a[(i, j)]);
        }
    }
}

#[test]
fn shift_matrices_are_unimodular() {
    for name in ["gamma2-classic", "quarter-orbit", "sixth-Q1", "sixth-Q23"] {
        let pair = pair_for(&catalog(name).unwrap().functions(), 7);
        assert!((pair.mat_a.determinant().norm() - 1.0).abs() < 1e-7, "{name}");
    }
}

#[test]
fn refit_on_disjoint_samples_agrees() {
    for name in ["gamma2-classic", "quarter-orbit", "sixth-Q1", "sixth-Q23"] {
        let basis = catalog(name).unwrap().functions();
        let a = pair_for(&basis, 0);
        let b = pair_for(&basis, 500);
        let gap = (&a.mat_a - &b.mat_a).iter().chain((&a.mat_b - &b.mat_b).iter()).map(|x| x.norm()).fold(0.0, f64::max);
        assert!(gap < 1e-6, "{name}: {gap:e}");
    }
    for basis in search_space().unwrap() {
        let report = run_pipeline(&basis.functions(), 3).unwrap();
        assert!(report.refit_gap < 1e-6, "{}: {:e}", basis.label, report.refit_gap);
    }
}

#[test]
fn interpolated_matches_direct_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["gamma2-classic", "quarter-orbit", "sixth-Q1"] {
        let basis = catalog(name).unwrap().functions();
        let pair = pair_for(&basis, 0);
        let p = det_polynomial(&pair).unwrap();
        assert!(p.degree().unwrap() <= basis.len());
        for _ in 0..5 {
            let k = c(rng.random_range(-0.2..1.2), rng.random_range(-0.7..0.7));
            let direct = det_direct(&pair, k);
            assert!((direct - p.eval(k)).norm() < 1e-8 * direct.norm().max(1.0), "{name} at {k}");
        }
    }
}

#[test]
fn gamma2_kernel_at_zero_is_r_periodic() {
    let basis = gamma2();
    let pair = pair_for(&basis, 0);
    let sol = kernel_solution(&pair, c(0.0, 0.0), &basis).unwrap();
    let norm: f64 = sol.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-12);
    for z in sample_points(5, 900) {
        let w = z.z();
        let moved = UpperHalfPoint::new(w / (1.0 - w)).unwrap();
        let lhs = sol.eval(moved).unwrap() / (1.0 - w).powu(2);
        let rhs = sol.eval(z).unwrap();
        assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
    }
}

#[test]
fn kernel_needs_a_root() {
    let basis = gamma2();
    let pair = pair_for(&basis, 0);
    let err = kernel_solution(&pair, c(0.5, 0.1), &basis).unwrap_err();
    assert!(matches!(err, QmarkError::Inconsistency(_)));
}

#[test]
fn sampling_errors() {
    let basis = catalog("quarter-orbit").unwrap().functions();
    let ctx = SlashContext::new(2).unwrap();
    let few = sample_points(5, 0);
    assert!(matches!(fit_transform_pair(&basis, ctx, &few), Err(QmarkError::Sampling(_))));
    let same = vec![sample_points(1, 0)[0]; 12];
    assert!(matches!(fit_transform_pair(&basis, ctx, &same), Err(QmarkError::Sampling(_))));
    let dependent = catalog("jacobi-orbit").unwrap().functions();
    assert!(matches!(
        fit_transform_pair(&dependent, ctx, &sample_points(9, 0)),
        Err(QmarkError::Sampling(_))
    ));
    let reduced = independent_members(&dependent, &sample_points(12, 0)).unwrap();
    assert_eq!(reduced.len(), 2);
    assert!(fit_transform_pair(&reduced, SlashContext::new(4).unwrap(), &sample_points(9, 0)).is_err());
}

#[test]
fn every_root_in_the_domain_solves_the_equation() {
    for basis in search_space().unwrap() {
        let report = run_pipeline(&basis.functions(), 0).unwrap();
        assert_eq!(report.lyg_residuals.len(), report.roots_in_d.len());
        for (k, r) in &report.lyg_residuals {
            assert!(in_domain(*k));
            assert!(*r < 1e-6, "{} at {k}: {r:e}", basis.label);
        }
    }
}

#[test]
fn invariant_form_gives_the_zero_polynomial() {
    // ϑ⁸ on the three even characteristics spans a space containing E₄,
    // which solves the equation for every κ
    let mut basis = orbit_closure(&ch(0, 1, 0, 1), 8).unwrap();
    basis.label = "jacobi^8".into();
    let report = run_pipeline(&basis.functions(), 0).unwrap();
    assert!(report.poly.is_zero());
    assert!(report.roots.is_empty());
}

#[test]
fn search_reports_half_plus_half_i() {
    let target = c(0.5, 0.5);
    let search = search_target(target, 0).unwrap();
    assert!(search.entries.iter().all(|e| e.outcome.is_ok()));
    assert_eq!(search.found_in, vec!["orbit(1/4, 0)*pairs".to_string()]);
    let entry = search.entries.iter().find(|e| e.label == "orbit(1/4, 0)*pairs").unwrap();
    assert!(entry.closest.unwrap().1 < 1e-5);
    assert!(entry.target_residual.unwrap() < 1e-6);
    // the nearby root itself is in the domain and carries its own solution
    let report = entry.outcome.as_ref().unwrap();
    assert!(report.lyg_residuals.iter().any(|(k, r)| (k - target).norm() < 1e-5 && *r < 1e-6));
}
