//! The control operator `B`, multiplication by `mu(x) = x^{2-a}`, in the
//! eigenbasis, with the closed forms for its first row.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::bessel::lommel_sigma_rhs;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::spectral::EigenSystem;

#[derive(Debug, Clone)]
pub struct ControlOperator {
    system: EigenSystem,
    matrix: DMatrix<f64>,
    analytic_first_row: Vec<f64>,
    mu_exponent: f64,
    b_eigenvalues: DVector<f64>,
    b_eigenvectors: DMatrix<f64>,
    ground_series: Vec<DVector<f64>>,
}

/// Number of Taylor terms `B^m e_1 / m!` kept for the exact flow on the ground direction.
pub(crate) const GROUND_SERIES_TERMS: usize = 24;

impl ControlOperator {
    /// Assembles `B_{jk} = <mu phi_j, phi_k>` on the composite rule and
    /// diagonalizes it once.
    pub fn new(system: EigenSystem, rule: &QuadratureRule) -> Result<Self> {
        if system.count() >= 2 {
            let sep = system.lambda(2) - system.lambda(1);
            if sep <= 0.5 {
                return Err(Error::DegenerateSpectrum(sep));
            }
        }
        let mu_exponent = system.problem().mu_exponent();
        let matrix = system.weighted_gram(rule, |x| x.powf(mu_exponent));
        let finer = QuadratureRule {
            order: rule.order + 8,
            ..*rule
        };
        let check = system.weighted_gram(&finer, |x| x.powf(mu_exponent));
        let dev = (&matrix - &check).amax();
        if dev > rule.tolerance.max(1e-13) * 10.0 {
            return Err(Error::Quadrature {
                estimate: dev,
                tolerance: rule.tolerance,
            });
        }
        let mut analytic_first_row = Vec::with_capacity(system.count());
        analytic_first_row.push(ground_entry_analytic(&system)?.value);
        for k in 2..=system.count() {
            analytic_first_row.push(first_row_analytic(&system, k)?);
        }
        let eig = SymmetricEigen::new(matrix.clone());
        let mut ground_series = Vec::with_capacity(GROUND_SERIES_TERMS);
        let mut v = matrix.column(0).into_owned();
        for m in 1..=GROUND_SERIES_TERMS {
            if m > 1 {
                v = &matrix * v / m as f64;
            }
            ground_series.push(v.clone());
        }
        Ok(Self {
            system,
            matrix,
            analytic_first_row,
            mu_exponent,
            b_eigenvalues: eig.eigenvalues,
            b_eigenvectors: eig.eigenvectors,
            ground_series,
        })
    }

    pub fn system(&self) -> &EigenSystem {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `B_{jk}` with indices starting at 1.
    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.matrix[(j - 1, k - 1)]
    }

    /// Closed-form values of `B_{11}, B_{12}, ..., B_{1N}`.
    pub fn analytic_first_row(&self) -> &[f64] {
        &self.analytic_first_row
    }

    pub fn mu_exponent(&self) -> f64 {
        self.mu_exponent
    }

    pub fn b_eigenvalues(&self) -> &DVector<f64> {
        &self.b_eigenvalues
    }

    pub fn b_eigenvectors(&self) -> &DMatrix<f64> {
        &self.b_eigenvectors
    }

    /// `B^m e_1 / m!` for `m = 1, 2, ...`.
    pub(crate) fn ground_series(&self) -> &[DVector<f64>] {
        &self.ground_series
    }

    /// Largest absolute eigenvalue of the truncated matrix.
    pub fn norm(&self) -> f64 {
        self.b_eigenvalues.amax()
    }

    pub fn symmetry_deviation(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    /// `max_k |analytic b_{1k} - quadrature B_{1k}|`, ground entry included.
    pub fn first_row_deviation(&self) -> f64 {
        self.analytic_first_row
            .iter()
            .enumerate()
            .map(|(i, a)| (a - self.matrix[(0, i)]).abs())
            .fold(0.0, f64::max)
    }
}

/// `<mu phi_j, phi_k>` by adaptive quadrature on the graded partition.
pub fn entry_quadrature(system: &EigenSystem, j: usize, k: usize, rule: &QuadratureRule) -> Result<f64> {
    for i in [j, k] {
        if i == 0 || i > system.count() {
            return Err(Error::IndexOutOfRange {
                index: i,
                count: system.count(),
            });
        }
    }
    let e = system.problem().mu_exponent();
    let breaks = system.interior_zeros(j.max(k));
    rule.integrate(|x| x.powf(e) * system.phi(j, x) * system.phi(k, x), &breaks)
}

/// `b_{1k} = 2(2-a)/(lambda_k - lambda_1)^2 * 2 k_a^3 j_1 j_k * sgn(J'(j_1) J'(j_k))` for `k >= 2`.
pub fn first_row_analytic(system: &EigenSystem, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::domain(
            "first_row_analytic covers k >= 2; use ground_entry_analytic",
        ));
    }
    if k > system.count() {
        return Err(Error::IndexOutOfRange {
            index: k,
            count: system.count(),
        });
    }
    let p = system.problem();
    let ka = p.k_alpha();
    let z = system.zero_table();
    let dl = system.lambda(k) - system.lambda(1);
    let sign = (system.derivative_at_zero(1) * system.derivative_at_zero(k)).signum();
    Ok(2.0 * (2.0 - p.alpha()) / (dl * dl) * 2.0 * ka.powi(3) * z.zero(1) * z.zero(k) * sign)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundEntry {
    /// `B_{11}` from the Lommel chain.
    pub value: f64,
    /// `1/3 + 2(nu^2 - 1)/(3 j^2)`, the collapsed form of the chain.
    pub closed_form: f64,
    /// `int_0^j t^3 J_nu(t)^2 dt`.
    pub cubic_moment: f64,
    /// `j^5 / 24`.
    pub positivity_left: f64,
    /// `(1/2)(j^2 (nu^2 - 1)/3 + j^5/12)`.
    pub positivity_right: f64,
    pub positivity_holds: bool,
}

/// `B_{11} = 2/(j^4 J'(j)^2) int_0^j t^3 J_nu^2 dt` with the cubic moment from
/// the `sigma = 1` Lommel identity.
pub fn ground_entry_analytic(system: &EigenSystem) -> Result<GroundEntry> {
    let nu = system.problem().nu();
    let v = nu.value();
    let j = system.zero_table().zero(1);
    let jp = system.derivative_at_zero(1);
    let cubic_moment = lommel_sigma_rhs(nu, j)? / 3.0;
    let value = 2.0 * cubic_moment / (j.powi(4) * jp * jp);
    let positivity_left = j.powi(5) / 24.0;
    let positivity_right = 0.5 * (j * j * (v * v - 1.0) / 3.0 + j.powi(5) / 12.0);
    Ok(GroundEntry {
        value,
        closed_form: 1.0 / 3.0 + 2.0 * (v * v - 1.0) / (3.0 * j * j),
        cubic_moment,
        positivity_left,
        positivity_right,
        positivity_holds: positivity_left > positivity_right,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound {
    /// `min_{2 <= k <= N} |B_{1k}| lambda_k^{3/2}`.
    pub c_hat: f64,
    pub argmin: usize,
    pub top_half_min: f64,
    pub top_half_max: f64,
    pub ok: bool,
    /// `|B_{1k}| lambda_k^{3/2}` for `k = 2..=N`.
    pub scaled: Vec<f64>,
}

/// Scans `|B_{1k}| lambda_k^{3/2}`; `ok` requires a positive minimum and a top
/// half that stays within a factor 2 of both `c_hat` and its own maximum.
pub fn lower_bound_check(op: &ControlOperator) -> LowerBound {
    let s = op.system();
    let scaled: Vec<f64> = (2..=op.dim())
        .map(|k| op.entry(1, k).abs() * s.lambda(k).powf(1.5))
        .collect();
    let (argmin, c_hat) = scaled.iter().enumerate().fold(
        (0, f64::INFINITY),
        |acc, (i, &v)| if v < acc.1 { (i + 2, v) } else { acc },
    );
    let top = &scaled[scaled.len() / 2..];
    let top_half_min = top.iter().copied().fold(f64::INFINITY, f64::min);
    let top_half_max = top.iter().copied().fold(0.0, f64::max);
    let ok = c_hat > 0.0 && c_hat.is_finite() && top_half_min >= 0.5 * c_hat && top_half_min >= 0.5 * top_half_max;
    LowerBound {
        c_hat,
        argmin,
        top_half_min,
        top_half_max,
        ok,
        scaled,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub tau: f64,
    /// `S_K = sum_{k <= K} e^{-2 lambda_k tau} / B_{1k}^2`.
    pub partial_sums: Vec<f64>,
    /// `term_{k+1} / term_k` for `k = 1..N-1`.
    pub ratios: Vec<f64>,
    /// Smallest `k` from which every later ratio `term_{k+1}/term_k` is below 1/2.
    pub onset: Option<usize>,
    /// The last increments decay monotonically with ratio below 1/2.
    pub converged: bool,
}

/// Partial sums of `sum_k e^{-2 lambda_k tau} / |<mu phi_1, phi_k>|^2`, terms
/// formed in log space.
pub fn hypothesis_series(op: &ControlOperator, tau: f64) -> Result<SeriesReport> {
    if !(tau > 0.0) {
        return Err(Error::domain(format!("tau must be positive, got {tau}")));
    }
    let s = op.system();
    let mut log_terms = Vec::with_capacity(op.dim());
    for k in 1..=op.dim() {
        let b = op.entry(1, k);
        if b.abs() < 1e-300 {
            return Err(Error::VanishingCoupling { k, value: b });
        }
        log_terms.push(-2.0 * s.lambda(k) * tau - 2.0 * b.abs().ln());
    }
    let mut partial_sums = Vec::with_capacity(log_terms.len());
    let mut acc = 0.0;
    for lt in &log_terms {
        acc += lt.exp();
        partial_sums.push(acc);
    }
    let ratios: Vec<f64> = log_terms.windows(2).map(|w| (w[1] - w[0]).exp()).collect();
    let onset = match ratios.iter().rposition(|&r| r >= 0.5) {
        None => Some(1),
        Some(i) if i + 1 < ratios.len() => Some(i + 2),
        Some(_) => None,
    };
    let from = ratios.len().saturating_sub(10);
    let tail = &ratios[from..];
    // term_2 / term_1 involves B_11, so monotonicity starts at k = 2
    let monotone_tail = &ratios[from.max(1).min(ratios.len())..];
    let converged = !tail.is_empty()
        && tail.iter().all(|&r| r < 0.5)
        && monotone_tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    Ok(SeriesReport {
        tau,
        partial_sums,
        ratios,
        onset,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IbpReport {
    pub direct: f64,
    pub intermediate: f64,
    pub boundary: f64,
    pub residual: f64,
}

/// `<mu phi_1, phi_k>` three ways: direct quadrature, the intermediate form
/// `-2(2-a)/(lambda_k - lambda_1) int x phi_1' phi_k`, and the closed form.
pub fn integration_by_parts_consistency(system: &EigenSystem, k: usize, rule: &QuadratureRule) -> Result<IbpReport> {
    let boundary = first_row_analytic(system, k)?;
    let direct = entry_quadrature(system, 1, k, rule)?;
    let alpha = system.problem().alpha();
    let breaks = system.interior_zeros(k);
    let inner = rule.integrate(
        |x| {
            if x == 0.0 {
                0.0
            } else {
                x * system.phi_prime(1, x) * system.phi(k, x)
            }
        },
        &breaks,
    )?;
    let intermediate = -2.0 * (2.0 - alpha) / (system.lambda(k) - system.lambda(1)) * inner;
    let residual = (direct - intermediate)
        .abs()
        .max((direct - boundary).abs())
        .max((intermediate - boundary).abs());
    Ok(IbpReport {
        direct,
        intermediate,
        boundary,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eigenvalues, make_problem};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn op(alpha: f64, n: usize) -> ControlOperator {
        let s = eigenvalues(&make_problem(alpha).unwrap(), n).unwrap();
        ControlOperator::new(s, &QuadratureRule::default()).unwrap()
    }

    #[test]
    fn sine_entries() {
        let b = op(0.0, 8);
        let pi2 = PI * PI;
        assert_abs_diff_eq!(b.entry(1, 1), 1.0 / 3.0 - 0.5 / pi2, epsilon = 1e-12);
        assert_abs_diff_eq!(b.entry(1, 2), -16.0 / (9.0 * pi2), epsilon = 1e-12);
        for k in 2..=8 {
            let kf = k as f64;
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            let exact = sign * 8.0 * kf / (pi2 * (kf * kf - 1.0).powi(2));
            assert_abs_diff_eq!(b.analytic_first_row()[k - 1], exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn adaptive_entry_matches_matrix() {
        let s = eigenvalues(&make_problem(1.2).unwrap(), 6).unwrap();
        let rule = QuadratureRule::default();
        let b = ControlOperator::new(s.clone(), &rule).unwrap();
        for (j, k) in [(1, 1), (1, 4), (3, 5), (6, 6)] {
            let q = entry_quadrature(&s, j, k, &rule).unwrap();
            assert_abs_diff_eq!(q, b.entry(j, k), epsilon = 1e-11);
        }
    }

    #[test]
    fn ground_entry_chain() {
        for a in [0.0, 0.5, 1.0, 1.49] {
            let b = op(a, 4);
            let g = ground_entry_analytic(b.system()).unwrap();
            assert_abs_diff_eq!(g.value, g.closed_form, epsilon = 1e-13);
            assert_abs_diff_eq!(g.value, b.entry(1, 1), epsilon = 1e-11);
            assert!(g.value > 0.0 && g.positivity_holds);
        }
    }

    #[test]
    fn first_row_analytic_rejects_ground_index() {
        let b = op(0.3, 3);
        assert!(first_row_analytic(b.system(), 1).is_err());
        assert!(first_row_analytic(b.system(), 4).is_err());
    }

    #[test]
    fn structural_invariants() {
        for a in [0.0, 0.9, 1.3] {
            let b = op(a, 24);
            assert!(b.symmetry_deviation() <= 1e-14);
            assert!(b.matrix().amax() <= 1.0);
            assert!(b.norm() <= 1.0 + 1e-8);
            assert!(b.first_row_deviation() <= 1e-10, "alpha={a}");
        }
    }

    #[test]
    fn series_large_tau_dominated_by_ground() {
        let b = op(0.5, 20);
        let r = hypothesis_series(&b, 3.0).unwrap();
        let first = r.partial_sums[0];
        assert_abs_diff_eq!(r.partial_sums.last().unwrap() / first, 1.0, epsilon = 1e-6);
        assert!(r.converged);
    }

    #[test]
    fn ibp_forms_agree() {
        let rule = QuadratureRule::default();
        let s = eigenvalues(&make_problem(0.0).unwrap(), 5).unwrap();
        assert!(integration_by_parts_consistency(&s, 3, &rule).unwrap().residual <= 1e-9);
        let s = eigenvalues(&make_problem(1.2).unwrap(), 5).unwrap();
        for k in [2, 5] {
            assert!(integration_by_parts_consistency(&s, k, &rule).unwrap().residual <= 1e-8);
        }
    }
}
