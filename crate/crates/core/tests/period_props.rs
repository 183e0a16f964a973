use num_complex::Complex64;
use qmark_core::period::{g_series, g_stieltjes, residual_centr, DomainD};
use qmark_core::quadrature::QuadratureSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_kappa(rng: &mut ChaCha8Rng) -> DomainD {
    loop {
        let k = c(rng.random_range(0.05..0.95), rng.random_range(-0.45..0.45));
        if let Ok(d) = DomainD::new(k) {
            if (1.0 - k).norm() < 0.9 {
                return d;
            }
        }
    }
}

fn random_z(rng: &mut ChaCha8Rng) -> Complex64 {
    let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    if z.re >= 1.0 && z.im.abs() < 0.2 {
        c(z.re, 0.5)
    } else {
        z
    }
}

#[test]
fn series_and_quadrature_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let quad = QuadratureSpec::new(1 << 12, 80).unwrap();
    for _ in 0..20 {
        let k = random_kappa(&mut rng);
        let z = random_z(&mut rng);
        let s = g_series(&k, z, 18).unwrap();
        let q = g_stieltjes(&k, z, &quad).unwrap();
        let diff = (s.value - q.value).norm();
        assert!(
            diff <= s.residual_estimate + q.residual_estimate,
            "kappa {} z {z}: {diff:e} vs {:e} + {:e}",
            k.kappa(),
            s.residual_estimate,
            q.residual_estimate
        );
    }
}

#[test]
fn cauchy_riemann_in_both_variables() {
    let h = 1e-3;
    let g = |k: Complex64, z: Complex64| g_series(&DomainD::new(k).unwrap(), z, 14).unwrap().value;
    for (k, z) in [(c(0.5, 0.0), c(-1.0, 0.5)), (c(0.4, 0.2), c(0.3, 1.5)), (c(0.6, -0.1), c(-2.0, -1.0))] {
        let dz_re = (g(k, z + h) - g(k, z - h)) / (2.0 * h);
        let dz_im = (g(k, z + c(0.0, h)) - g(k, z - c(0.0, h))) / c(0.0, 2.0 * h);
        assert!((dz_re - dz_im).norm() < 1e-5, "z-derivative at {k}, {z}");
        let dk_re = (g(k + h, z) - g(k - h, z)) / (2.0 * h);
        let dk_im = (g(k + c(0.0, h), z) - g(k - c(0.0, h), z)) / c(0.0, 2.0 * h);
        assert!((dk_re - dk_im).norm() < 1e-5, "kappa-derivative at {k}, {z}");
    }
}

#[test]
fn decays_along_imaginary_axis() {
    for k in [c(0.3, 0.0), c(0.5, 0.0), c(0.5, 0.4)] {
        let d = DomainD::new(k).unwrap();
        let sizes: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&y| g_series(&d, c(0.0, y), 16).unwrap().value.norm())
            .collect();
        assert!(sizes[0] > sizes[1] && sizes[1] > sizes[2], "{k}: {sizes:?}");
    }
}

#[test]
fn endpoint_limits_along_real_axis() {
    let z = c(-0.7, 0.9);
    let at_zero = 1.0 / (1.0 - z);
    let mut prev = f64::INFINITY;
    for k in [0.2, 0.1, 0.05] {
        let err = (g_series(&DomainD::real(k).unwrap(), z, 16).unwrap().value - at_zero).norm();
        assert!(err < prev);
        prev = err;
    }
    let quad = QuadratureSpec::new(1 << 10, 60).unwrap();
    let mut prev = f64::INFINITY;
    for k in [0.8, 0.9, 0.95] {
        let err = g_stieltjes(&DomainD::real(k).unwrap(), z, &quad).unwrap().value.norm();
        assert!(err < prev);
        prev = err;
    }
}

#[test]
fn centr_at_half_near_minus_one_plus_i() {
    let half = DomainD::real(0.5).unwrap();
    assert!(residual_centr(&half, c(-1.0, 1.0), 24).unwrap() < 1e-6);
}

#[test]
fn series_bits_do_not_depend_on_thread_count() {
    let k = DomainD::new(c(0.5, 0.4)).unwrap();
    let z = c(0.25, 0.75);
    std::env::set_var("QMARK_THREADS", "1");
    let one = g_series(&k, z, 16).unwrap();
    std::env::set_var("QMARK_THREADS", "5");
    let five = g_series(&k, z, 16).unwrap();
    std::env::remove_var("QMARK_THREADS");
    assert_eq!(one.value.re.to_bits(), five.value.re.to_bits());
    assert_eq!(one.value.im.to_bits(), five.value.im.to_bits());
}
