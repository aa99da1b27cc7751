use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use degen::bessel::{lommel_sigma_identity_check, lommel_weighted_integral};
use degen::quadrature::integrate;
use degen::{bessel_j, bessel_j_deriv, bessel_zeros, BesselOrder};
use proptest::prelude::*;

fn j(nu: f64, x: f64) -> f64 {
    bessel_j(BesselOrder::new(nu).unwrap(), x).unwrap()
}

fn jd(nu: f64, x: f64) -> f64 {
    bessel_j_deriv(BesselOrder::new(nu).unwrap(), x).unwrap()
}

fn scale(nu: f64, x: f64) -> f64 {
    // envelope of |J| so that relative checks near zeros stay meaningful
    j(nu, x)
        .abs()
        .max(j(nu + 1.0, x).abs())
        .max((2.0 / (PI * x)).sqrt().min(1.0))
}

#[test]
fn documented_values() {
    assert_eq!(j(0.0, 0.0), 1.0);
    assert_abs_diff_eq!(j(0.5, PI / 2.0), 2.0 / PI, epsilon = 1e-14);
    assert_abs_diff_eq!(j(0.0, 2.404825557695773), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(jd(0.0, 1.0), -j(1.0, 1.0), epsilon = 1e-14);
    assert_abs_diff_eq!(jd(0.5, PI), -(2.0_f64).sqrt() / PI, epsilon = 1e-13);
}

#[test]
fn domain_errors() {
    let nu = BesselOrder::new(0.3).unwrap();
    assert!(bessel_j(nu, -1.0).is_err());
    assert!(bessel_j_deriv(nu, 0.0).is_err());
    assert!(BesselOrder::new(-0.1).is_err());
    assert!(BesselOrder::new(f64::INFINITY).is_err());
    assert!(bessel_zeros(nu, 0).is_err());
}

#[test]
fn zero_tables_from_the_documentation() {
    let t = bessel_zeros(BesselOrder::new(0.5).unwrap(), 3).unwrap();
    for (k, z) in t.zeros().iter().enumerate() {
        assert_abs_diff_eq!(*z, (k + 1) as f64 * PI, epsilon = 1e-12);
    }
    let t = bessel_zeros(BesselOrder::new(0.0).unwrap(), 1).unwrap();
    assert_abs_diff_eq!(t.zero(1), 2.404825557695773, epsilon = 1e-12);
    let t = bessel_zeros(BesselOrder::new(0.25).unwrap(), 50).unwrap();
    assert!(t.check().interlacing);
    for k in 1..50 {
        assert!(jd(0.25, t.zero(k)) * jd(0.25, t.zero(k + 1)) < 0.0);
    }
}

#[test]
fn lommel_examples() {
    let half = BesselOrder::new(0.5).unwrap();
    assert_abs_diff_eq!(lommel_weighted_integral(half, PI).unwrap(), 1.0, epsilon = 1e-12);
    let zero = BesselOrder::new(0.0).unwrap();
    assert!(lommel_weighted_integral(zero, 1e-8).unwrap().abs() < 1e-15);
    for &(nu, c) in &[(0.0, 1.0), (0.25, 7.5), (1.0 / 3.0, 20.0), (0.9, 3.3)] {
        let o = BesselOrder::new(nu).unwrap();
        let q = integrate(|z| z * j(nu, z).powi(2), 0.0, c, 1e-13).unwrap();
        assert_abs_diff_eq!(lommel_weighted_integral(o, c).unwrap(), q, epsilon = 1e-9);
    }
    assert!(lommel_sigma_identity_check(half, PI).unwrap().abs() <= 1e-9);
    assert!(lommel_sigma_identity_check(zero, 2.404825557695773).unwrap().abs() <= 1e-9);
    assert!(lommel_sigma_identity_check(zero, 1e-6).unwrap().abs() <= 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn three_term_recurrence(nu in 0.0..3.0_f64, x in 0.01..100.0_f64) {
        let lhs = j(nu, x) + j(nu + 2.0, x);
        let rhs = 2.0 * (nu + 1.0) / x * j(nu + 1.0, x);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale(nu, x).max(rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn derivative_identity(nu in 0.0..3.0_f64, x in 0.01..100.0_f64) {
        let lhs = 2.0 * jd(nu + 1.0, x);
        let rhs = j(nu, x) - j(nu + 2.0, x);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale(nu, x), "{lhs} vs {rhs}");
    }

    #[test]
    fn central_difference(nu in 0.0..4.0_f64, x in 0.1..60.0_f64) {
        let h = 1e-5;
        let fd = (j(nu, x + h) - j(nu, x - h)) / (2.0 * h);
        prop_assert!((jd(nu, x) - fd).abs() <= 1e-6);
    }

    #[test]
    fn half_integer_closed_forms(x in 0.05..150.0_f64) {
        let s = (2.0 / (PI * x)).sqrt();
        prop_assert!((j(0.5, x) - s * x.sin()).abs() <= 1e-12);
        prop_assert!((j(1.5, x) - s * (x.sin() / x - x.cos())).abs() <= 1e-12);
    }

    #[test]
    fn zero_table_invariants(nu in 0.0..1.0_f64, count in 2usize..60) {
        let t = bessel_zeros(BesselOrder::new(nu).unwrap(), count).unwrap();
        let c = t.check();
        prop_assert!(c.increasing && c.interlacing && c.monotone_differences, "{c:?}");
        prop_assert!(t.derivative_zeros()[0] > nu || nu == 0.0);
        for &z in t.zeros() {
            prop_assert!(j(nu, z).abs() <= 1e-10);
            prop_assert!(j(nu, z - 1e-6).signum() != j(nu, z + 1e-6).signum());
        }
    }
}
