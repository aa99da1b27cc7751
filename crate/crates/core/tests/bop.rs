use std::f64::consts::PI;
use std::sync::OnceLock;

use approx::assert_abs_diff_eq;
use degen::bop::{
    entry_quadrature, first_row_analytic, ground_entry_analytic, hypothesis_series, integration_by_parts_consistency,
    lower_bound_check,
};
use degen::spectral::eigenvalues;
use degen::{make_problem, ControlOperator, EigenSystem, QuadratureRule};
use proptest::prelude::*;

fn system(alpha: f64, n: usize) -> EigenSystem {
    eigenvalues(&make_problem(alpha).unwrap(), n).unwrap()
}

fn operator(alpha: f64, n: usize) -> ControlOperator {
    ControlOperator::new(system(alpha, n), &QuadratureRule::default()).unwrap()
}

fn grid_operators() -> &'static Vec<ControlOperator> {
    static OPS: OnceLock<Vec<ControlOperator>> = OnceLock::new();
    OPS.get_or_init(|| degen::ALPHA_GRID.iter().map(|&a| operator(a, 24)).collect())
}

#[test]
fn sine_entries() {
    let s = system(0.0, 4);
    let rule = QuadratureRule::default();
    let b11 = 1.0 / 3.0 - 1.0 / (2.0 * PI * PI);
    assert_abs_diff_eq!(entry_quadrature(&s, 1, 1, &rule).unwrap(), b11, epsilon = 1e-11);
    assert_abs_diff_eq!(b11, 0.282673, epsilon = 1e-6);
    let b12 = -16.0 / (9.0 * PI * PI);
    assert_abs_diff_eq!(entry_quadrature(&s, 1, 2, &rule).unwrap(), b12, epsilon = 1e-11);
    assert_abs_diff_eq!(first_row_analytic(&s, 2).unwrap(), b12, epsilon = 1e-9);
    assert_abs_diff_eq!(ground_entry_analytic(&s).unwrap().value, b11, epsilon = 1e-9);
}

#[test]
fn sine_row_alternates() {
    let s = system(0.0, 30);
    for k in 2..=30 {
        let b = first_row_analytic(&s, k).unwrap();
        let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(b.signum(), sign, "k={k}");
        let kk = k as f64;
        let closed = 8.0 * kk / (PI * PI * (kk * kk - 1.0).powi(2));
        assert_abs_diff_eq!(b.abs(), closed, epsilon = 1e-13);
    }
}

#[test]
fn first_row_never_vanishes() {
    let s = system(1.2, 200);
    for k in 2..=200 {
        assert!(first_row_analytic(&s, k).unwrap().abs() > 0.0);
    }
    assert!(first_row_analytic(&s, 1).is_err());
}

#[test]
fn ground_entry_routes_agree() {
    let rule = QuadratureRule::default();
    let s = system(1.0, 2);
    let g = ground_entry_analytic(&s).unwrap();
    assert_abs_diff_eq!(g.value, entry_quadrature(&s, 1, 1, &rule).unwrap(), epsilon = 1e-9);
    for &alpha in &degen::ALPHA_GRID {
        let g = ground_entry_analytic(&system(alpha, 2)).unwrap();
        assert!(g.value > 0.0 && g.positivity_holds, "alpha={alpha} {g:?}");
        assert_abs_diff_eq!(g.value, g.closed_form, epsilon = 1e-12);
    }
}

#[test]
fn integration_by_parts_examples() {
    let rule = QuadratureRule::default();
    assert!(
        integration_by_parts_consistency(&system(0.0, 3), 3, &rule)
            .unwrap()
            .residual
            <= 1e-9
    );
    let s = system(1.2, 5);
    assert!(integration_by_parts_consistency(&s, 2, &rule).unwrap().residual <= 1e-8);
    assert!(integration_by_parts_consistency(&s, 5, &rule).unwrap().residual <= 1e-8);
}

#[test]
fn lower_bound_examples() {
    let op = operator(1.49, 200);
    let lb = lower_bound_check(&op);
    assert!(lb.ok && lb.c_hat > 0.0, "{}", lb.c_hat);
    let op = operator(0.0, 200);
    let lb = lower_bound_check(&op);
    assert!(lb.c_hat > 0.0);
    let k = 200.0_f64;
    let closed = 8.0 * PI * k.powi(4) / (k * k - 1.0).powi(2);
    approx::assert_relative_eq!(*lb.scaled.last().unwrap(), closed, max_relative = 1e-5);
    assert_abs_diff_eq!(closed, 8.0 * PI, epsilon = 2e-3);
    for op in grid_operators() {
        assert!(lower_bound_check(op).c_hat > 0.0);
    }
}

#[test]
fn series_examples() {
    let op = operator(1.3, 100);
    assert!(hypothesis_series(&op, 0.05).unwrap().converged);
    let op = operator(0.0, 20);
    let r = hypothesis_series(&op, 0.1).unwrap();
    for k in 2..10 {
        let t = |k: f64| (-0.2 * k * k * PI * PI).exp() * (PI * PI * (k * k - 1.0).powi(2) / (8.0 * k)).powi(2);
        let kk = k as f64;
        assert_abs_diff_eq!(r.ratios[k - 1] / (t(kk + 1.0) / t(kk)), 1.0, epsilon = 1e-8);
        assert!(r.ratios[k - 1] < 2e-3);
    }
    let r = hypothesis_series(&op, 5.0).unwrap();
    let first = r.partial_sums[0];
    assert_abs_diff_eq!(*r.partial_sums.last().unwrap() / first, 1.0, epsilon = 1e-12);
    assert!(hypothesis_series(&op, 0.0).is_err());
}

#[test]
fn operator_invariants_on_grid() {
    for op in grid_operators() {
        assert!(op.symmetry_deviation() <= 1e-10);
        assert!(op.first_row_deviation() <= 1e-8);
        assert!(op.norm() <= 1.0 + 1e-8);
        assert!(op.entry(1, 1) > 0.0);
        for j in 1..=op.dim() {
            assert!(op.entry(j, j) > 0.0 && op.entry(j, j) < 1.0);
            for k in 1..=op.dim() {
                assert!(op.entry(j, k).abs() <= 1.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn analytic_row_matches_matrix(i in 0usize..7, k in 2usize..=24) {
        let op = &grid_operators()[i];
        prop_assert!((op.entry(1, k) - op.analytic_first_row()[k - 1]).abs() <= 1e-8);
    }

    #[test]
    fn quadratic_form_bounded(i in 0usize..7, v in prop::collection::vec(-1.0..1.0_f64, 24)) {
        let op = &grid_operators()[i];
        let x = nalgebra::DVector::from_vec(v);
        let q = x.dot(&(op.matrix() * &x));
        let n2 = x.norm_squared();
        prop_assert!(q >= -1e-10 * n2 && q <= (1.0 + 1e-8) * n2);
    }
}
