//! Galerkin dynamics `u' = -Lambda u - p(t) B u` in the eigenbasis.
//!
//! States are stored as the shifted deviation `w = e^{lambda_1 t} u - e_1` so
//! that errors far below `e^{-lambda_1 t}` keep full relative precision.

use nalgebra::DVector;
use serde::Serialize;

use crate::bop::ControlOperator;
use crate::error::{Error, Result};
use crate::spectral::EigenSystem;

/// `psi_1(t) = e^{-lambda_1 t} phi_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundState {
    lambda1: f64,
}

impl GroundState {
    pub fn new(lambda1: f64) -> Self {
        Self { lambda1 }
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn coefficients(&self, t: f64, n: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        if n > 0 {
            v[0] = (-self.lambda1 * t).exp();
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState {
    t: f64,
    lambda1: f64,
    deviation: DVector<f64>,
}

impl TrajectoryState {
    /// State at time `t` with eigen-coefficients `coeffs` (length must equal the operator dimension).
    pub fn from_coefficients(t: f64, coeffs: &[f64], op: &ControlOperator) -> Result<Self> {
        if coeffs.len() != op.dim() {
            return Err(Error::Dimension {
                expected: op.dim(),
                found: coeffs.len(),
            });
        }
        if !t.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("state entries must be finite"));
        }
        let lambda1 = op.system().lambda(1);
        let scale = (lambda1 * t).exp();
        let mut deviation = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|c| c * scale));
        deviation[0] -= 1.0;
        Ok(Self { t, lambda1, deviation })
    }

    /// State given directly by its shifted deviation `w`.
    pub fn from_deviation(t: f64, deviation: DVector<f64>, op: &ControlOperator) -> Result<Self> {
        if deviation.len() != op.dim() {
            return Err(Error::Dimension {
                expected: op.dim(),
                found: deviation.len(),
            });
        }
        Ok(Self {
            t,
            lambda1: op.system().lambda(1),
            deviation,
        })
    }

    /// `psi_1(t)`.
    pub fn ground(t: f64, op: &ControlOperator) -> Self {
        Self {
            t,
            lambda1: op.system().lambda(1),
            deviation: DVector::zeros(op.dim()),
        }
    }

    /// `phi_1 + eps phi_k` at `t = 0`.
    pub fn perturbed_ground(k: usize, eps: f64, op: &ControlOperator) -> Result<Self> {
        if k == 0 || k > op.dim() {
            return Err(Error::IndexOutOfRange {
                index: k,
                count: op.dim(),
            });
        }
        let mut deviation = DVector::zeros(op.dim());
        deviation[k - 1] += eps;
        Ok(Self {
            t: 0.0,
            lambda1: op.system().lambda(1),
            deviation,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.deviation.len()
    }

    pub fn deviation(&self) -> &DVector<f64> {
        &self.deviation
    }

    /// Eigen-coefficients of `u(t)`.
    pub fn coefficients(&self) -> DVector<f64> {
        let mut u = self.deviation.clone();
        u[0] += 1.0;
        u * (-self.lambda1 * self.t).exp()
    }

    /// `e^{lambda_1 t} ||u(t) - psi_1(t)||`.
    pub fn shifted_error(&self) -> f64 {
        self.deviation.norm()
    }

    pub fn norm(&self) -> f64 {
        let mut u = self.deviation.clone();
        u[0] += 1.0;
        u.norm() * (-self.lambda1 * self.t).exp()
    }
}

/// `||u(t) - psi_1(t)||`, the L2 distance by Parseval.
pub fn error_to_ground(state: &TrajectoryState) -> f64 {
    state.shifted_error() * (-state.lambda1 * state.t).exp()
}

/// Exact diagonal semigroup over `dt`.
pub fn free_flow(state: &TrajectoryState, dt: f64, system: &EigenSystem) -> Result<TrajectoryState> {
    if !(dt >= 0.0) {
        return Err(Error::domain(format!("free_flow needs dt >= 0, got {dt}")));
    }
    let mut next = state.clone();
    decay(&mut next.deviation, system.lambdas(), dt);
    next.t += dt;
    Ok(next)
}

fn decay(w: &mut DVector<f64>, lambdas: &[f64], dt: f64) {
    let l1 = lambdas[0];
    for (k, wk) in w.iter_mut().enumerate().skip(1) {
        *wk *= (-(lambdas[k] - l1) * dt).exp();
    }
}

/// `p(t) = sum_m c_m e^{-r_m (t - start)}` on `[start, end)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlPiece {
    pub start: f64,
    pub end: f64,
    pub rates: Vec<f64>,
    pub coeffs: Vec<f64>,
}

impl ControlPiece {
    pub fn new(start: f64, end: f64, rates: Vec<f64>, coeffs: Vec<f64>) -> Result<Self> {
        if !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::domain(format!(
                "control piece needs start < end, got [{start}, {end})"
            )));
        }
        if rates.len() != coeffs.len() {
            return Err(Error::Dimension {
                expected: rates.len(),
                found: coeffs.len(),
            });
        }
        if rates.iter().chain(&coeffs).any(|v| !v.is_finite()) || rates.iter().any(|&r| r < 0.0) {
            return Err(Error::domain(
                "control rates must be finite and >= 0, coefficients finite",
            ));
        }
        Ok(Self {
            start,
            end,
            rates,
            coeffs,
        })
    }

    pub fn constant(start: f64, end: f64, value: f64) -> Result<Self> {
        Self::new(start, end, vec![0.0], vec![value])
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = t - self.start;
        self.rates
            .iter()
            .zip(&self.coeffs)
            .map(|(r, c)| c * (-r * s).exp())
            .sum()
    }

    /// `int_a^b p` for `start <= a <= b <= end`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let h = b - a;
        let s = a - self.start;
        self.rates
            .iter()
            .zip(&self.coeffs)
            .map(|(&r, &c)| {
                if r == 0.0 {
                    c * h
                } else {
                    c * (-r * s).exp() * (-(-r * h).exp_m1()) / r
                }
            })
            .sum()
    }

    /// Upper bound for `|p|` on the piece.
    pub fn sup_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

/// Piecewise control; zero outside its pieces.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ControlSignal {
    pieces: Vec<ControlPiece>,
}

impl ControlSignal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(start: f64, end: f64, value: f64) -> Result<Self> {
        Ok(Self {
            pieces: vec![ControlPiece::constant(start, end, value)?],
        })
    }

    pub fn from_piece(piece: ControlPiece) -> Self {
        Self { pieces: vec![piece] }
    }

    /// Appends a piece that starts at or after the end of the last one.
    pub fn push(&mut self, piece: ControlPiece) -> Result<()> {
        if let Some(last) = self.pieces.last() {
            if piece.start < last.end {
                return Err(Error::domain("control pieces must not overlap"));
            }
        }
        self.pieces.push(piece);
        Ok(())
    }

    pub fn pieces(&self) -> &[ControlPiece] {
        &self.pieces
    }

    pub fn value(&self, t: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.start <= t && t < p.end)
            .map_or(0.0, |p| p.value(t))
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.pieces
            .iter()
            .filter_map(|p| {
                let lo = a.max(p.start);
                let hi = b.min(p.end);
                (hi > lo).then(|| p.integral(lo, hi))
            })
            .sum()
    }

    pub fn sup_abs(&self, a: f64, b: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.start < b && p.end > a)
            .map(ControlPiece::sup_abs)
            .fold(0.0, f64::max)
    }

    fn boundaries_in(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        self.pieces
            .iter()
            .flat_map(|p| [p.start, p.end])
            .filter(move |&t| t > a && t < b)
    }
}

/// `min(0.05 / sqrt(lambda_N), 0.1 / (1 + max |p|))` over `[a, b]`.
pub fn h_max(op: &ControlOperator, p: &ControlSignal, a: f64, b: f64) -> f64 {
    let lam_n = *op.system().lambdas().last().expect("nonempty spectrum");
    (0.05 / lam_n.sqrt()).min(0.1 / (1.0 + p.sup_abs(a, b)))
}

/// One Strang step: half diagonal flow, exact `exp(-q B)` with `q = int p`,
/// half diagonal flow.
pub fn step(state: &TrajectoryState, p: &ControlSignal, dt: f64, op: &ControlOperator) -> Result<TrajectoryState> {
    if !(dt > 0.0) {
        return Err(Error::domain(format!("step needs dt > 0, got {dt}")));
    }
    let max = h_max(op, p, state.t, state.t + dt);
    if dt > max * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, max });
    }
    Ok(step_unchecked(state, p, dt, op))
}

pub(crate) fn step_unchecked(
    state: &TrajectoryState,
    p: &ControlSignal,
    dt: f64,
    op: &ControlOperator,
) -> TrajectoryState {
    let lambdas = op.system().lambdas();
    let mut w = state.deviation.clone();
    decay(&mut w, lambdas, 0.5 * dt);
    let q = p.integral(state.t, state.t + dt);
    if q != 0.0 {
        b_flow(&mut w, q, op);
    }
    decay(&mut w, lambdas, 0.5 * dt);
    TrajectoryState {
        t: state.t + dt,
        lambda1: state.lambda1,
        deviation: w,
    }
}

// Exact flow of v' = -q B v written for the deviation:
// w <- w + (e^{-qB} - I) e_1 + (e^{-qB} - I) w.
// The ground term uses the Taylor series of B^m e_1 / m! when |q| ||B|| is
// small, so its error stays relative to q rather than to e_1.
fn b_flow(w: &mut DVector<f64>, q: f64, op: &ControlOperator) {
    let v = op.b_eigenvectors();
    let x = q.abs() * op.norm();
    let taylor = x <= 0.25;
    let mut u = w.clone();
    if !taylor {
        u[0] += 1.0;
    }
    let mut y = v.tr_mul(&u);
    for (yi, beta) in y.iter_mut().zip(op.b_eigenvalues().iter()) {
        *yi *= (-q * beta).exp_m1();
    }
    *w += v * y;
    if taylor {
        let mut coef = 1.0;
        let mut bound = 1.0;
        for (m, term) in op.ground_series().iter().enumerate() {
            coef *= -q;
            bound *= x / (m + 1) as f64;
            w.axpy(coef, term, 1.0);
            if bound < 1e-18 {
                break;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimulationOptions {
    /// Cap on the step below the `h_max` rule.
    pub max_step: Option<f64>,
}

/// Advances `u0` over `[t0, t0 + horizon]`, returning states every `record_dt`
/// (the final time is always included).
pub fn simulate(
    u0: &TrajectoryState,
    p: &ControlSignal,
    horizon: f64,
    op: &ControlOperator,
    record_dt: f64,
) -> Result<Vec<TrajectoryState>> {
    simulate_with(u0, p, horizon, op, record_dt, SimulationOptions::default())
}

pub fn simulate_with(
    u0: &TrajectoryState,
    p: &ControlSignal,
    horizon: f64,
    op: &ControlOperator,
    record_dt: f64,
    options: SimulationOptions,
) -> Result<Vec<TrajectoryState>> {
    if !(horizon > 0.0) || !(record_dt > 0.0) {
        return Err(Error::domain("simulate needs horizon > 0 and record_dt > 0"));
    }
    if u0.dim() != op.dim() {
        return Err(Error::Dimension {
            expected: op.dim(),
            found: u0.dim(),
        });
    }
    let t0 = u0.t;
    let t_end = t0 + horizon;
    let records = (horizon / record_dt - 1e-9).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(records + 1);
    out.push(u0.clone());
    let mut state = u0.clone();
    for i in 1..=records {
        let a = state.t;
        let b = if i == records { t_end } else { t0 + i as f64 * record_dt };
        let mut cuts: Vec<f64> = p.boundaries_in(a, b).collect();
        cuts.push(b);
        let mut lo = a;
        for hi in cuts {
            let mut h = h_max(op, p, lo, hi);
            if let Some(m) = options.max_step {
                h = h.min(m);
            }
            let n = ((hi - lo) / h).ceil().max(1.0) as usize;
            let dt = (hi - lo) / n as f64;
            for s in 0..n {
                state = step_unchecked(&state, p, dt, op);
                state.t = if s + 1 == n { hi } else { lo + (s + 1) as f64 * dt };
            }
            lo = hi;
        }
        out.push(state.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailReport {
    pub modes: usize,
    pub doubled_modes: usize,
    pub error: f64,
    pub doubled_error: f64,
    pub difference: f64,
}

/// Final `error_to_ground` for the same initial coefficients (zero-padded) and
/// control under `op` and under a larger truncation `op_large`.
pub fn tail_sensitivity(
    coeffs: &[f64],
    p: &ControlSignal,
    horizon: f64,
    op: &ControlOperator,
    op_large: &ControlOperator,
) -> Result<TailReport> {
    let run = |o: &ControlOperator| -> Result<f64> {
        let mut c = vec![0.0; o.dim()];
        for (dst, src) in c.iter_mut().zip(coeffs) {
            *dst = *src;
        }
        let u0 = TrajectoryState::from_coefficients(0.0, &c, o)?;
        let traj = simulate(&u0, p, horizon, o, horizon)?;
        Ok(error_to_ground(traj.last().expect("nonempty trajectory")))
    };
    let error = run(op)?;
    let doubled_error = run(op_large)?;
    Ok(TailReport {
        modes: op.dim(),
        doubled_modes: op_large.dim(),
        error,
        doubled_error,
        difference: (error - doubled_error).abs(),
    })
}
