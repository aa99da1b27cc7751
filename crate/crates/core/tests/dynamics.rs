use std::sync::OnceLock;

use approx::assert_abs_diff_eq;
use degen::dynamics::{error_to_ground, free_flow, simulate, simulate_with, tail_sensitivity, SimulationOptions};
use degen::spectral::eigenvalues;
use degen::{make_problem, ControlOperator, ControlPiece, ControlSignal, GroundState, QuadratureRule, TrajectoryState};
use nalgebra::DVector;
use proptest::prelude::*;

fn operator(alpha: f64, n: usize) -> ControlOperator {
    let s = eigenvalues(&make_problem(alpha).unwrap(), n).unwrap();
    ControlOperator::new(s, &QuadratureRule::default()).unwrap()
}

fn op16() -> &'static ControlOperator {
    static OP: OnceLock<ControlOperator> = OnceLock::new();
    OP.get_or_init(|| operator(0.7, 16))
}

fn op_sine() -> &'static ControlOperator {
    static OP: OnceLock<ControlOperator> = OnceLock::new();
    OP.get_or_init(|| operator(0.0, 8))
}

fn state(coeffs: &[f64], op: &ControlOperator) -> TrajectoryState {
    TrajectoryState::from_coefficients(0.0, coeffs, op).unwrap()
}

#[test]
fn free_flow_examples() {
    let op = op_sine();
    let mut c = vec![0.0; 8];
    c[0] = 1.0;
    let u = free_flow(&state(&c, op), 1.0, op.system()).unwrap();
    let coeffs = u.coefficients();
    assert_abs_diff_eq!(coeffs[0], (-std::f64::consts::PI.powi(2)).exp(), epsilon = 1e-18);
    assert!(coeffs.iter().skip(1).all(|&v| v == 0.0));
    let u0 = state(&[0.3, -0.2, 0.1, 0.0, 0.05, 0.0, 0.0, 0.01], op);
    let same = free_flow(&u0, 0.0, op.system()).unwrap();
    assert_eq!(same.coefficients(), u0.coefficients());
    assert!(free_flow(&u0, -1.0, op.system()).is_err());
}

#[test]
fn ground_state_tracked_exactly() {
    let op = op16();
    let g = GroundState::new(op.system().lambda(1));
    let u0 = TrajectoryState::ground(0.0, op);
    let traj = simulate(&u0, &ControlSignal::zero(), 2.0, op, 0.25).unwrap();
    for s in &traj {
        assert!(error_to_ground(s) <= 1e-14);
        let expected = g.coefficients(s.t(), op.dim());
        assert!((s.coefficients() - expected).norm() <= 1e-14);
    }
}

#[test]
fn perturbation_decays_at_second_rate() {
    let op = op16();
    let eps = 0.01;
    let u0 = TrajectoryState::perturbed_ground(2, eps, op).unwrap();
    let t = 0.7;
    let end = simulate(&u0, &ControlSignal::zero(), t, op, t).unwrap().pop().unwrap();
    let expected = eps * (-op.system().lambda(2) * t).exp();
    assert_abs_diff_eq!(error_to_ground(&end) / expected, 1.0, epsilon = 1e-12);
}

#[test]
fn truncation_robustness() {
    let small = operator(0.5, 32);
    let large = operator(0.5, 64);
    let mut c = vec![0.0; 32];
    c[0] = 1.0;
    c[1] = 0.05;
    let mut p = ControlSignal::from_piece(ControlPiece::new(0.0, 0.5, vec![0.0, 5.0], vec![1.0, -2.0]).unwrap());
    p.push(ControlPiece::constant(0.5, 1.0, 0.4).unwrap()).unwrap();
    let r = tail_sensitivity(&c, &p, 1.0, &small, &large).unwrap();
    assert!(r.difference < 1e-6, "{r:?}");
    assert_eq!((r.modes, r.doubled_modes), (32, 64));
}

#[test]
fn step_order_on_constant_control() {
    let op = op16();
    let p = ControlSignal::constant(0.0, 0.5, 2.0).unwrap();
    let mut c = vec![0.0; 16];
    c[0] = 1.0;
    c[2] = 0.1;
    let u0 = state(&c, op);
    let run = |h: f64| {
        let opts = SimulationOptions { max_step: Some(h) };
        simulate_with(&u0, &p, 0.5, op, 0.5, opts)
            .unwrap()
            .pop()
            .unwrap()
            .coefficients()
    };
    let reference = run(2.5e-5);
    let e1 = (run(1e-3) - &reference).norm();
    let e2 = (run(5e-4) - &reference).norm();
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.2, "order {order}");
}

fn coeff_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0_f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_flow_closed_form(c in coeff_vec(16), t in 0.0..0.5_f64) {
        let op = op16();
        let u0 = state(&c, op);
        let end = simulate(&u0, &ControlSignal::zero(), t.max(1e-3), op, 0.05).unwrap().pop().unwrap();
        let t = end.t();
        let got = end.coefficients();
        for k in 0..16 {
            let exact = c[k] * (-op.system().lambda(k + 1) * t).exp();
            prop_assert!((got[k] - exact).abs() <= 1e-12);
        }
    }

    #[test]
    fn free_shifted_error_nonincreasing(c in coeff_vec(16)) {
        let op = op16();
        let traj = simulate(&state(&c, op), &ControlSignal::zero(), 0.3, op, 0.01).unwrap();
        for w in traj.windows(2) {
            prop_assert!(w[1].shifted_error() <= w[0].shifted_error() * (1.0 + 1e-14));
            prop_assert!(w[1].norm() <= w[0].norm() * (1.0 + 1e-14));
        }
    }

    #[test]
    fn norm_bound_under_control(c in coeff_vec(16), p0 in -3.0..3.0_f64, rate in 0.0..20.0_f64) {
        let op = op16();
        let u0 = state(&c, op);
        let p = ControlSignal::from_piece(ControlPiece::new(0.0, 0.4, vec![0.0, rate], vec![p0, -p0]).unwrap());
        let traj = simulate(&u0, &p, 0.4, op, 0.02).unwrap();
        for s in &traj {
            // p = p0 (1 - e^{-rate s}) keeps one sign
            let abs_int = p.integral(0.0, s.t()).abs();
            let bound = (abs_int * op.norm()).exp() * u0.norm();
            prop_assert!(s.norm() <= bound * (1.0 + 1e-6), "{} > {}", s.norm(), bound);
        }
    }

    #[test]
    fn triangle_inequality(a in coeff_vec(8), b in coeff_vec(8), t in 0.0..1.0_f64) {
        let op = op_sine();
        let sa = TrajectoryState::from_coefficients(t, &a, op).unwrap();
        let sb = TrajectoryState::from_coefficients(t, &b, op).unwrap();
        let diff = (sa.coefficients() - sb.coefficients()).norm();
        prop_assert!(diff <= error_to_ground(&sa) + error_to_ground(&sb) + 1e-15);
        let sum = DVector::from_vec(a.clone()) + DVector::from_vec(b.clone());
        let s = TrajectoryState::from_coefficients(t, sum.as_slice(), op).unwrap();
        prop_assert!(s.norm() <= sa.norm() + sb.norm() + 1e-15);
    }

    #[test]
    fn zero_control_matches_free_flow(c in coeff_vec(8), t in 0.01..0.3_f64) {
        let op = op_sine();
        let u0 = state(&c, op);
        let a = simulate(&u0, &ControlSignal::zero(), t, op, t).unwrap().pop().unwrap();
        let b = free_flow(&u0, t, op.system()).unwrap();
        prop_assert!((a.coefficients() - b.coefficients()).norm() <= 1e-15);
    }
}
