//! Eigenpairs of `A u = -(x^a u_x)_x` on `(0, 1)`.
//!
//! `lambda_k = k_a^2 j_k^2` and `phi_k(x) = N_k x^{(1-a)/2} J_nu(j_k x^{k_a})`
//! with `j_k` the zeros of `J_nu`, `k_a = (2-a)/2` and
//! `N_k = sqrt(2 k_a) / |J'_nu(j_k)|`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bessel::{bessel_zeros, jv, jvp, BesselOrder, ZeroTable};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `a` in `[0, 1)`: Dirichlet conditions at both ends.
    Weak,
    /// `a` in `[1, 3/2)`: weighted Neumann condition at `x = 0`.
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegenerateProblem {
    alpha: f64,
    regime: Regime,
    nu_alpha: BesselOrder,
    k_alpha: f64,
}

/// Builds `(regime, nu_a, k_a)` for `alpha` in `[0, 3/2)`.
pub fn make_problem(alpha: f64) -> Result<DegenerateProblem> {
    if !alpha.is_finite() || !(0.0..1.5).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let (regime, nu) = if alpha < 1.0 {
        (Regime::Weak, (1.0 - alpha) / (2.0 - alpha))
    } else {
        (Regime::Strong, (alpha - 1.0) / (2.0 - alpha))
    };
    Ok(DegenerateProblem {
        alpha,
        regime,
        nu_alpha: BesselOrder::new(nu)?,
        k_alpha: 0.5 * (2.0 - alpha),
    })
}

impl DegenerateProblem {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn nu(&self) -> BesselOrder {
        self.nu_alpha
    }

    pub fn k_alpha(&self) -> f64 {
        self.k_alpha
    }

    /// Exponent of the prefactor `x^{(1-a)/2}`.
    pub fn power(&self) -> f64 {
        0.5 * (1.0 - self.alpha)
    }

    /// Exponent of the control profile `mu(x) = x^{2-a}`.
    pub fn mu_exponent(&self) -> f64 {
        2.0 - self.alpha
    }

    /// Leading power of every eigenfunction at the origin: `1-a` (weak), `0` (strong).
    pub fn boundary_exponent(&self) -> f64 {
        self.power() + self.k_alpha * self.nu_alpha.value()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSystem {
    problem: DegenerateProblem,
    lambdas: Vec<f64>,
    zero_table: ZeroTable,
    normalizers: Vec<f64>,
    derivative_at_zeros: Vec<f64>,
}

/// The first `count` eigenpairs of the problem.
pub fn eigenvalues(problem: &DegenerateProblem, count: usize) -> Result<EigenSystem> {
    if count == 0 {
        return Err(Error::domain("eigenvalues needs count >= 1"));
    }
    let zero_table = bessel_zeros(problem.nu(), count)?;
    let nu = problem.nu().value();
    let k = problem.k_alpha();
    let lambdas = zero_table.zeros().iter().map(|j| k * k * j * j).collect();
    let derivative_at_zeros: Vec<f64> = zero_table.zeros().iter().map(|&j| jvp(nu, j)).collect();
    let normalizers = derivative_at_zeros.iter().map(|d| (2.0 * k).sqrt() / d.abs()).collect();
    Ok(EigenSystem {
        problem: *problem,
        lambdas,
        zero_table,
        normalizers,
        derivative_at_zeros,
    })
}

impl EigenSystem {
    pub fn problem(&self) -> &DegenerateProblem {
        &self.problem
    }

    pub fn count(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `lambda_k`, `k` starting at 1.
    pub fn lambda(&self, k: usize) -> f64 {
        self.lambdas[k - 1]
    }

    pub fn zero_table(&self) -> &ZeroTable {
        &self.zero_table
    }

    pub fn normalizers(&self) -> &[f64] {
        &self.normalizers
    }

    /// `J'_nu(j_k)`.
    pub fn derivative_at_zero(&self, k: usize) -> f64 {
        self.derivative_at_zeros[k - 1]
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.count() {
            Err(Error::IndexOutOfRange {
                index: k,
                count: self.count(),
            })
        } else {
            Ok(())
        }
    }

    /// `phi_k(x)` on `[0, 1]`, extended continuously to `x = 0`. Panics on a bad index.
    pub fn phi(&self, k: usize, x: f64) -> f64 {
        let p = &self.problem;
        let nu = p.nu().value();
        let c = self.zero_table.zero(k);
        let n = self.normalizers[k - 1];
        if x == 0.0 {
            return match p.regime() {
                Regime::Weak => 0.0,
                Regime::Strong if nu == 0.0 => n,
                Regime::Strong => n * (0.5 * c).powf(nu) / libm::tgamma(nu + 1.0),
            };
        }
        n * x.powf(p.power()) * jv(nu, c * x.powf(p.k_alpha()))
    }

    /// `phi_k'(x)` for `x > 0`, written without cancellation:
    /// `N x^{a-1} [(a + b nu) J_nu(z) - b z J_{nu+1}(z)]`, `z = j_k x^b`.
    pub fn phi_prime(&self, k: usize, x: f64) -> f64 {
        let p = &self.problem;
        let (a, b, nu) = (p.power(), p.k_alpha(), p.nu().value());
        let z = self.zero_table.zero(k) * x.powf(b);
        let n = self.normalizers[k - 1];
        n * x.powf(a - 1.0) * ((a + b * nu) * jv(nu, z) - b * z * jv(nu + 1.0, z))
    }

    /// `(x^a phi_k')'(x)` from Bessel identities, independent of the eigen-equation.
    pub fn flux_prime(&self, k: usize, x: f64) -> f64 {
        let p = &self.problem;
        let (alpha, a, b, nu) = (p.alpha(), p.power(), p.k_alpha(), p.nu().value());
        let z = self.zero_table.zero(k) * x.powf(b);
        let n = self.normalizers[k - 1];
        let s = a + b * nu;
        let j0 = jv(nu, z);
        let j1 = jv(nu + 1.0, z);
        let f = s * j0 - b * z * j1;
        let fp = s * jvp(nu, z) - b * (z * j0 - nu * j1);
        n * x.powf(alpha + a - 2.0) * ((alpha + a - 1.0) * f + b * z * fp)
    }

    /// Zeros of `phi_k` inside `(0, 1)`.
    pub fn interior_zeros(&self, k: usize) -> Vec<f64> {
        let jk = self.zero_table.zero(k);
        let inv_b = 1.0 / self.problem.k_alpha();
        (1..k).map(|i| (self.zero_table.zero(i) / jk).powf(inv_b)).collect()
    }

    /// `count x len` matrix of `phi_k(x_i)`.
    pub fn sample(&self, xs: &[f64]) -> DMatrix<f64> {
        let n = self.count();
        let column = |x: &f64| (1..=n).map(|k| self.phi(k, *x)).collect::<Vec<f64>>();
        #[cfg(feature = "parallel")]
        let columns: Vec<Vec<f64>> = {
            use rayon::prelude::*;
            xs.par_iter().map(column).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let columns: Vec<Vec<f64>> = xs.iter().map(column).collect();
        DMatrix::from_iterator(n, xs.len(), columns.into_iter().flatten())
    }

    /// Composite nodes adapted to the highest retained eigenfunction.
    pub fn nodes(&self, rule: &QuadratureRule) -> (Vec<f64>, Vec<f64>) {
        rule.composite(&self.interior_zeros(self.count()))
    }

    /// `M_{ij} = int_0^1 w(x) phi_i phi_j dx` on the composite nodes of `rule`.
    pub fn weighted_gram<W: Fn(f64) -> f64>(&self, rule: &QuadratureRule, weight: W) -> DMatrix<f64> {
        let (xs, ws) = self.nodes(rule);
        let mut p = self.sample(&xs);
        for (i, (&x, &w)) in xs.iter().zip(&ws).enumerate() {
            let s = w * weight(x);
            p.column_mut(i).scale_mut(s.abs().sqrt());
        }
        let signs: Vec<f64> = xs.iter().zip(&ws).map(|(&x, &w)| (w * weight(x)).signum()).collect();
        let mut q = p.clone();
        for (i, s) in signs.iter().enumerate() {
            if *s < 0.0 {
                q.column_mut(i).neg_mut();
            }
        }
        &p * q.transpose()
    }
}

/// `phi_k(x)` with index and argument checks.
pub fn eigenfunction_eval(system: &EigenSystem, k: usize, x: f64) -> Result<f64> {
    system.check_index(k)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("eigenfunctions live on [0, 1], got x = {x}")));
    }
    Ok(system.phi(k, x))
}

/// Gram matrix of the retained eigenfunctions. The rule is applied at two
/// orders; a diagonal disagreement above the tolerance is reported as
/// non-convergence.
pub fn gram_matrix(system: &EigenSystem, rule: &QuadratureRule) -> Result<DMatrix<f64>> {
    let m = system.weighted_gram(rule, |_| 1.0);
    let finer = QuadratureRule {
        order: rule.order + 8,
        ..*rule
    };
    let m2 = system.weighted_gram(&finer, |_| 1.0);
    let dev = (0..system.count())
        .map(|i| (m[(i, i)] - m2[(i, i)]).abs())
        .fold(0.0, f64::max);
    if dev > rule.tolerance.max(1e-13) * 10.0 {
        return Err(Error::Quadrature {
            estimate: dev,
            tolerance: rule.tolerance,
        });
    }
    Ok(m)
}

/// `max |M - I|`.
pub fn identity_deviation(m: &DMatrix<f64>) -> f64 {
    let mut dev = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((m[(i, j)] - target).abs());
        }
    }
    dev
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapBranch {
    /// `nu <= 1/2`: differences of zeros nondecreasing, constant `7 pi / 16`.
    NonDecreasing,
    /// `nu >= 1/2`: differences of zeros nonincreasing toward `pi`, constant `pi / 2`.
    NonIncreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    pub min_gap: f64,
    /// Index `k` attaining `sqrt(lambda_{k+1}) - sqrt(lambda_k)`.
    pub argmin: usize,
    pub branch: GapBranch,
    /// The constant claimed for this branch.
    pub bound: f64,
    pub ok: bool,
    /// `k_a (j_2 - j_1)` on the nondecreasing branch, `k_a pi` on the other.
    pub certified_bound: f64,
    pub certified_ok: bool,
    pub gamma_positive: bool,
    pub differences_monotone: bool,
}

pub fn gap_check(system: &EigenSystem) -> Result<GapReport> {
    if system.count() < 2 {
        return Err(Error::domain("gap_check needs at least two eigenvalues"));
    }
    let k = system.problem().k_alpha();
    let nu = system.problem().nu().value();
    let z = system.zero_table().zeros();
    let (argmin, min_gap) =
        z.windows(2)
            .map(|w| k * (w[1] - w[0]))
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, g)| if g < acc.1 { (i + 1, g) } else { acc },
            );
    let weak = 7.0 * PI / 16.0;
    let strong = PI / 2.0;
    let (branch, bound) = if nu < 0.5 {
        (GapBranch::NonDecreasing, weak)
    } else if nu > 0.5 || min_gap >= strong {
        (GapBranch::NonIncreasing, strong)
    } else {
        (GapBranch::NonDecreasing, weak)
    };
    let certified_bound = match branch {
        GapBranch::NonDecreasing => k * (z[1] - z[0]),
        GapBranch::NonIncreasing => k * PI,
    };
    let diffs: Vec<f64> = z.windows(2).map(|w| w[1] - w[0]).collect();
    let slack = 1e-10;
    let differences_monotone = match branch {
        GapBranch::NonDecreasing => diffs.windows(2).all(|d| d[1] >= d[0] - slack),
        GapBranch::NonIncreasing => diffs.windows(2).all(|d| d[1] <= d[0] + slack),
    };
    Ok(GapReport {
        min_gap,
        argmin,
        branch,
        bound,
        ok: min_gap >= bound,
        certified_bound,
        certified_ok: min_gap >= certified_bound - slack,
        gamma_positive: min_gap > 0.0,
        differences_monotone,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryAsymptotics {
    pub fitted_exponent: f64,
    pub expected_exponent: f64,
    /// Sample points `x` used for the limits below, decreasing toward 0.
    pub limit_points: Vec<f64>,
    /// `x phi_1(x) phi_k(x)`.
    pub product_samples: Vec<f64>,
    /// `x^2 phi_1(x) phi_k'(x)`.
    pub derivative_product_samples: Vec<f64>,
    /// `(x phi_1')' x^a phi_k`.
    pub flux_samples: Vec<f64>,
    pub limits_vanish: bool,
}

/// Least-squares slope of `log |phi_k|` against `log x` on `[1e-6, 1e-3]`, plus
/// sampled boundary limits of the products that appear when integrating by parts.
pub fn boundary_asymptotics_check(system: &EigenSystem, k: usize) -> Result<BoundaryAsymptotics> {
    system.check_index(k)?;
    let n = 31;
    let (lx, ly): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|i| {
            let lx = (1e-6_f64).ln() + (1e3_f64).ln() * i as f64 / (n - 1) as f64;
            (lx, system.phi(k, lx.exp()).abs().ln())
        })
        .unzip();
    let fitted_exponent = slope(&lx, &ly);

    let p = system.problem();
    let alpha = p.alpha();
    let lam1 = system.lambda(1);
    let limit_points = vec![1e-4, 1e-6, 1e-8];
    let mut product_samples = Vec::new();
    let mut derivative_product_samples = Vec::new();
    let mut flux_samples = Vec::new();
    for &x in &limit_points {
        let f1 = system.phi(1, x);
        let fk = system.phi(k, x);
        product_samples.push(x * f1 * fk);
        derivative_product_samples.push(x * x * f1 * system.phi_prime(k, x));
        let xflux = (1.0 - alpha) * system.phi_prime(1, x) - lam1 * x.powf(1.0 - alpha) * f1;
        flux_samples.push(xflux * x.powf(alpha) * fk);
    }
    let vanishing =
        |s: &[f64]| s.windows(2).all(|w| w[1].abs() <= w[0].abs() + 1e-300) && s.last().unwrap().abs() < 1e-3;
    let limits_vanish =
        vanishing(&product_samples) && vanishing(&derivative_product_samples) && vanishing(&flux_samples);
    Ok(BoundaryAsymptotics {
        fitted_exponent,
        expected_exponent: p.boundary_exponent(),
        limit_points,
        product_samples,
        derivative_product_samples,
        flux_samples,
        limits_vanish,
    })
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `max |(x^a phi_k')' + lambda_k phi_k|` over `samples` points of `[delta, 1 - delta]`.
pub fn eigen_residual(system: &EigenSystem, k: usize, delta: f64, samples: usize) -> Result<f64> {
    system.check_index(k)?;
    let lam = system.lambda(k);
    let samples = samples.max(2);
    Ok((0..samples)
        .map(|i| {
            let x = delta + (1.0 - 2.0 * delta) * i as f64 / (samples - 1) as f64;
            (system.flux_prime(k, x) + lam * system.phi(k, x)).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn problem_parameters() {
        let p = make_problem(0.0).unwrap();
        assert_eq!(p.regime(), Regime::Weak);
        assert_eq!(p.nu().value(), 0.5);
        assert_eq!(p.k_alpha(), 1.0);
        let p = make_problem(1.0).unwrap();
        assert_eq!(p.regime(), Regime::Strong);
        assert_eq!(p.nu().value(), 0.0);
        assert_eq!(p.k_alpha(), 0.5);
        assert!(matches!(make_problem(1.5), Err(Error::AlphaOutOfRange(_))));
        assert!(make_problem(-0.1).is_err());
        assert!(make_problem(f64::NAN).is_err());
    }

    #[test]
    fn boundary_exponent_by_regime() {
        for a in [0.0, 0.3, 0.9] {
            assert_abs_diff_eq!(make_problem(a).unwrap().boundary_exponent(), 1.0 - a, epsilon = 1e-15);
        }
        for a in [1.0, 1.2, 1.49] {
            assert_abs_diff_eq!(make_problem(a).unwrap().boundary_exponent(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn sine_system() {
        let s = eigenvalues(&make_problem(0.0).unwrap(), 10).unwrap();
        for k in 1..=10 {
            let kf = k as f64;
            assert_abs_diff_eq!(s.lambda(k) / (kf * kf * PI * PI), 1.0, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(s.phi(1, 0.5), 2.0_f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.phi(3, 0.1), 2.0_f64.sqrt() * (0.3 * PI).sin(), epsilon = 1e-13);
        assert_abs_diff_eq!(
            s.phi_prime(2, 0.3),
            2.0_f64.sqrt() * 2.0 * PI * (0.6 * PI).cos(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn strong_origin_value() {
        let s = eigenvalues(&make_problem(1.0).unwrap(), 2).unwrap();
        assert_abs_diff_eq!(s.lambda(1), 1.4457964907366, epsilon = 1e-12);
        let expected = (2.0 * 0.5_f64).sqrt() / libm::j1(2.404825557695773).abs();
        assert_abs_diff_eq!(s.phi(1, 0.0), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(s.phi(1, 1e-12), expected, epsilon = 1e-9);
    }

    #[test]
    fn vanishes_at_right_end() {
        for a in [0.0, 0.7, 1.3] {
            let s = eigenvalues(&make_problem(a).unwrap(), 6).unwrap();
            for k in 1..=6 {
                assert!(s.phi(k, 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn index_errors() {
        let s = eigenvalues(&make_problem(0.4).unwrap(), 3).unwrap();
        assert!(eigenfunction_eval(&s, 0, 0.5).is_err());
        assert!(eigenfunction_eval(&s, 4, 0.5).is_err());
        assert!(eigenfunction_eval(&s, 3, 1.5).is_err());
    }

    #[test]
    fn residual_small() {
        for a in [0.0, 0.5, 1.2, 1.49] {
            let s = eigenvalues(&make_problem(a).unwrap(), 12).unwrap();
            for k in 1..=12 {
                let r = eigen_residual(&s, k, 1e-3, 401).unwrap();
                assert!(r <= 1e-6 * s.lambda(k), "alpha={a} k={k} r={r}");
            }
        }
    }

    #[test]
    fn gram_is_identity() {
        let rule = QuadratureRule::default();
        for a in [0.0, 0.5, 1.3] {
            let s = eigenvalues(&make_problem(a).unwrap(), 16).unwrap();
            let g = gram_matrix(&s, &rule).unwrap();
            assert!(identity_deviation(&g) <= 1e-10, "alpha={a}");
        }
    }

    #[test]
    fn gap_at_zero_alpha() {
        let s = eigenvalues(&make_problem(0.0).unwrap(), 50).unwrap();
        let g = gap_check(&s).unwrap();
        assert_abs_diff_eq!(g.min_gap, PI, epsilon = 1e-10);
        assert!(g.ok && g.certified_ok && g.differences_monotone);
        assert_eq!(g.bound, PI / 2.0);
    }

    #[test]
    fn boundary_exponents() {
        let s = eigenvalues(&make_problem(0.0).unwrap(), 2).unwrap();
        let b = boundary_asymptotics_check(&s, 1).unwrap();
        assert_abs_diff_eq!(b.fitted_exponent, 1.0, epsilon = 0.02);
        let s = eigenvalues(&make_problem(1.0).unwrap(), 2).unwrap();
        let b = boundary_asymptotics_check(&s, 1).unwrap();
        assert_abs_diff_eq!(b.fitted_exponent, 0.0, epsilon = 0.02);
        let s = eigenvalues(&make_problem(1.3).unwrap(), 4).unwrap();
        for k in 1..=4 {
            let b = boundary_asymptotics_check(&s, k).unwrap();
            assert!(b.limits_vanish, "{b:?}");
        }
    }
}
