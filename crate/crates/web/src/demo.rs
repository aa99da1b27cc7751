//! Plain Rust versions of the exported functions.

use degen::bop::{lower_bound_check, ControlOperator};
use degen::dynamics::TrajectoryState;
use degen::spectral::{eigenvalues, make_problem, EigenSystem};
use degen::stabilize::{run_stabilization, StabilizationSettings, WindowSchedule};
use degen::QuadratureRule;

use crate::Curves;

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("{what} must lie in [{lo}, {hi}], got {value}")]
    Range {
        what: &'static str,
        lo: usize,
        hi: usize,
        value: usize,
    },
    #[error(transparent)]
    Core(#[from] degen::Error),
}

pub type Result<T> = std::result::Result<T, DemoError>;

pub const MAX_MODES: usize = 64;
pub const MAX_SAMPLES: usize = 4096;

fn bounded(what: &'static str, value: usize, lo: usize, hi: usize) -> Result<usize> {
    if (lo..=hi).contains(&value) {
        Ok(value)
    } else {
        Err(DemoError::Range { what, lo, hi, value })
    }
}

fn system(alpha: f64, count: usize) -> Result<EigenSystem> {
    Ok(eigenvalues(
        &make_problem(alpha)?,
        bounded("mode count", count, 1, MAX_MODES)?,
    )?)
}

pub fn spectrum(alpha: f64, count: usize) -> Result<Vec<f64>> {
    Ok(system(alpha, count)?.lambdas().to_vec())
}

pub fn eigenfunctions(alpha: f64, modes: usize, samples: usize) -> Result<Vec<f64>> {
    let sys = system(alpha, modes)?;
    let samples = bounded("sample count", samples, 2, MAX_SAMPLES)?;
    let step = 1.0 / (samples - 1) as f64;
    Ok((1..=modes)
        .flat_map(|k| (0..samples).map(move |i| (k, (i as f64 * step).min(1.0))))
        .map(|(k, x)| sys.phi(k, x))
        .collect())
}

pub fn scaled_first_row(alpha: f64, count: usize) -> Result<Vec<f64>> {
    let op = ControlOperator::new(
        system(alpha, bounded("mode count", count, 2, MAX_MODES)?)?,
        &QuadratureRule::default(),
    )?;
    Ok(lower_bound_check(&op).scaled)
}

pub fn stabilize(alpha: f64, modes: usize, windows: usize, window_length: f64, eps: f64) -> Result<Curves> {
    let op = ControlOperator::new(
        system(alpha, bounded("mode count", modes, 2, MAX_MODES)?)?,
        &QuadratureRule::default(),
    )?;
    let windows = bounded("window count", windows, 1, 8)?;
    let schedule = WindowSchedule::growing(window_length, windows, 1, 1, op.dim())?;
    let mut coeffs = vec![0.0; op.dim()];
    coeffs[0] = 1.0;
    coeffs[1] = eps;
    let u0 = TrajectoryState::from_coefficients(0.0, &coeffs, &op)?;
    let rep = run_stabilization(&u0, &schedule, &op, &StabilizationSettings::default())?;
    let (shifted, baseline) = rep
        .samples
        .iter()
        .map(|s| s.shifted_error)
        .zip(baseline_at(&rep.samples, eps, &op))
        .unzip();
    Ok(Curves {
        times: rep.samples.iter().map(|s| s.t).collect(),
        shifted,
        baseline,
        log_reductions: rep.log_reductions,
    })
}

/// Uncontrolled shifted error from `phi_1 + eps phi_2`: `|eps| e^{-(lambda_2 - lambda_1) t}`.
fn baseline_at<'a>(
    samples: &'a [degen::stabilize::DecaySample],
    eps: f64,
    op: &ControlOperator,
) -> impl Iterator<Item = f64> + 'a {
    let gap = op.system().lambda(2) - op.system().lambda(1);
    samples.iter().map(move |s| eps.abs() * (-gap * s.t).exp())
}
