//! Bessel functions of the first kind of real order, their zeros and the
//! Lommel-type integrals of `J_nu^2`.
//!
//! Evaluation uses the ascending series for `x <= 2`, Steed's continued
//! fractions for intermediate arguments and the Hankel expansion once
//! `x >= 25 + nu^2`. Negative orders in `(-1, 0)` are reached by reflection
//! through `Y_nu`, which Steed's method produces alongside `J_nu`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature;

const SERIES_MAX: f64 = 2.0;
const STEED_EPS: f64 = 2e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;

/// A nonnegative, finite Bessel order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct BesselOrder(f64);

impl BesselOrder {
    /// Largest order with validated accuracy.
    pub const MAX: f64 = 5.0;

    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::domain(format!("Bessel order must be finite and >= 0, got {nu}")));
        }
        if nu > Self::MAX {
            return Err(Error::domain(format!(
                "Bessel order {nu} exceeds the supported maximum {}",
                Self::MAX
            )));
        }
        Ok(Self(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `J_nu(x)` for `nu >= 0`, `x >= 0`.
pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("bessel_j requires finite x >= 0, got {x}")));
    }
    Ok(jv(nu.0, x))
}

/// `J'_nu(x)` for `x > 0`.
pub fn bessel_j_deriv(nu: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("bessel_j_deriv requires finite x > 0, got {x}")));
    }
    Ok(jvp(nu.0, x))
}

/// `J_nu(x)` for real `nu >= -1` and `x >= 0`, without argument checks.
pub(crate) fn jv(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 || nu == nu.round() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if nu < 0.0 && nu == nu.round() {
        let n = -nu;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return sign * jv(n, x);
    }
    if x <= SERIES_MAX {
        series(nu, x)
    } else if x >= hankel_threshold(nu) {
        hankel(nu, x)
    } else if nu >= 0.0 {
        steed(nu, x).0
    } else {
        let mu = -nu;
        let (j, _, y) = steed(mu, x);
        (mu * PI).cos() * j - (mu * PI).sin() * y
    }
}

/// `J'_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x)`, valid for every order without
/// touching negative orders.
pub(crate) fn jvp(nu: f64, x: f64) -> f64 {
    (nu / x) * jv(nu, x) - jv(nu + 1.0, x)
}

fn jvpp(nu: f64, x: f64, j: f64, jp: f64) -> f64 {
    -jp / x - (1.0 - nu * nu / (x * x)) * j
}

fn hankel_threshold(nu: f64) -> f64 {
    25.0 + nu * nu
}

fn series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = h.powf(nu) / libm::tgamma(nu + 1.0);
    let mut sum = term;
    for m in 1..200 {
        let mf = m as f64;
        term *= -h2 / (mf * (mf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) * inv8x / k as f64;
        if next.abs() > term.abs() && k > 2 {
            break;
        }
        term = next;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() <= 1e-17 * (p.abs() + q.abs()) {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    let (sp, cp) = ((0.5 * nu + 0.25) * PI).sin_cos();
    let cos_chi = c * cp + s * sp;
    let sin_chi = s * cp - c * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Steed's method (continued fractions CF1 and CF2) for `nu >= 0`, `x >= 2`.
/// Returns `(J_nu, J'_nu, Y_nu)`.
fn steed(nu: f64, x: f64) -> (f64, f64, f64) {
    let nl = (nu - x + 1.5).floor().max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < STEED_EPS {
            break;
        }
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = STEED_EPS;
    }
    let f = rjpl / rjl;

    let mut a = 0.25 - xmu2;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fct = a * xi / (p * p + q * q);
    let mut cr = br + q * fct;
    let mut ci = bi + p * fct;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..MAXIT {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fct = a / (cr * cr + ci * ci);
        cr = br + cr * fct;
        ci = bi - ci * fct;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di = -di / den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < STEED_EPS {
            break;
        }
    }

    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    let mut rymu = rjmu * gam;
    let rymup = rymu * (p + q / gam);
    let mut ry1 = xmu * xi * rymu - rymup;
    let scale = rjmu / rjl;
    let rj = rjl1 * scale;
    let rjp = rjp1 * scale;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    (rj, rjp, rymu)
}

/// Positive zeros of `J_nu` and `J'_nu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroTable {
    nu: BesselOrder,
    zeros: Vec<f64>,
    derivative_zeros: Vec<f64>,
}

/// Outcome of the structural checks on a [`ZeroTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroTableCheck {
    pub increasing: bool,
    pub interlacing: bool,
    pub monotone_differences: bool,
    pub last_difference: f64,
    pub approaches_pi: bool,
}

impl ZeroTableCheck {
    pub fn all(&self) -> bool {
        self.increasing && self.interlacing && self.monotone_differences && self.approaches_pi
    }
}

impl ZeroTable {
    pub fn nu(&self) -> BesselOrder {
        self.nu
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    /// Zeros of `J'_nu`. For `nu = 0` the first entry is `0`.
    pub fn derivative_zeros(&self) -> &[f64] {
        &self.derivative_zeros
    }

    /// `j_{nu,k}` with `k` starting at 1.
    pub fn zero(&self, k: usize) -> f64 {
        self.zeros[k - 1]
    }

    pub fn check(&self) -> ZeroTableCheck {
        let nu = self.nu.0;
        let z = &self.zeros;
        let dz = &self.derivative_zeros;
        let increasing = z.windows(2).all(|w| w[1] > w[0]) && dz.windows(2).all(|w| w[1] > w[0]);
        let mut interlacing = z.len() == dz.len();
        if interlacing {
            let lower_ok = if nu == 0.0 { dz[0] >= nu } else { dz[0] > nu };
            interlacing =
                lower_ok && z.iter().zip(dz).all(|(j, jp)| jp < j) && z.iter().zip(&dz[1..]).all(|(j, jp)| j < jp);
        }
        let diffs: Vec<f64> = z.windows(2).map(|w| w[1] - w[0]).collect();
        let slack = 1e-10;
        let nondecreasing = diffs.windows(2).all(|d| d[1] >= d[0] - slack);
        let nonincreasing = diffs.windows(2).all(|d| d[1] <= d[0] + slack);
        let monotone_differences = if (nu - 0.5).abs() < 1e-15 {
            nondecreasing || nonincreasing
        } else if nu < 0.5 {
            nondecreasing
        } else {
            nonincreasing
        };
        let last_difference = diffs.last().copied().unwrap_or(f64::NAN);
        let approaches_pi = match (diffs.first(), diffs.last()) {
            (Some(first), Some(last)) => (last - PI).abs() <= (first - PI).abs() + slack,
            _ => true,
        };
        ZeroTableCheck {
            increasing,
            interlacing,
            monotone_differences,
            last_difference,
            approaches_pi,
        }
    }
}

/// The first `count` zeros of `J_nu` and of `J'_nu`.
///
/// Zeros are bracketed by scanning in steps shorter than half the minimal
/// spacing, so no zero is skipped, then refined by Newton's method kept inside
/// the bracket (bisection whenever an iterate would leave it).
pub fn bessel_zeros(nu: BesselOrder, count: usize) -> Result<ZeroTable> {
    if count == 0 {
        return Err(Error::domain("bessel_zeros needs count >= 1"));
    }
    let v = nu.0;
    let f = |x: f64| {
        let j = jv(v, x);
        (j, jvp(v, x))
    };
    let mut zeros = Vec::with_capacity(count);
    let mut lo = 0.5 * v + 0.5;
    for k in 1..=count {
        let (a, b) = scan_bracket(|x| jv(v, x), lo, 0.5, 64.0).ok_or(Error::ZeroNotFound {
            nu: v,
            index: k,
            kind: "J",
        })?;
        let seed = mcmahon(v, k);
        let root = refine(f, a, b, seed).ok_or(Error::ZeroNotFound {
            nu: v,
            index: k,
            kind: "J",
        })?;
        zeros.push(root);
        lo = root + 1.0;
    }

    let g = |x: f64| {
        let j = jv(v, x);
        let jp = jvp(v, x);
        (jp, jvpp(v, x, j, jp))
    };
    let mut derivative_zeros = Vec::with_capacity(count);
    for k in 1..=count {
        if k == 1 && v == 0.0 {
            derivative_zeros.push(0.0);
            continue;
        }
        let a = if k == 1 { v } else { zeros[k - 2] };
        let b = zeros[k - 1];
        let a = a.max(1e-300);
        let fa = g(a).0;
        let fb = g(b).0;
        let err = Error::ZeroNotFound {
            nu: v,
            index: k,
            kind: "J'",
        };
        if fa * fb > 0.0 {
            return Err(err);
        }
        let root = refine(g, a, b, 0.5 * (a + b)).ok_or(err)?;
        derivative_zeros.push(root);
    }
    Ok(ZeroTable {
        nu,
        zeros,
        derivative_zeros,
    })
}

fn mcmahon(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * e.powi(5))
}

fn scan_bracket<F: Fn(f64) -> f64>(f: F, start: f64, step: f64, span: f64) -> Option<(f64, f64)> {
    let mut a = start;
    let mut fa = f(a);
    while a < start + span {
        let b = a + step;
        let fb = f(b);
        if fa == 0.0 {
            return Some((a, a));
        }
        if fa * fb <= 0.0 {
            return Some((a, b));
        }
        a = b;
        fa = fb;
    }
    None
}

/// Safeguarded Newton for a sign change of `f` on `[a, b]`; `f` returns `(value, derivative)`.
fn refine<F: Fn(f64) -> (f64, f64)>(f: F, mut a: f64, mut b: f64, seed: f64) -> Option<f64> {
    if a == b {
        return Some(a);
    }
    let mut fa = f(a).0;
    if fa == 0.0 {
        return Some(a);
    }
    if f(b).0 == 0.0 {
        return Some(b);
    }
    let mut x = if seed > a && seed < b { seed } else { 0.5 * (a + b) };
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if (fx > 0.0) == (fa > 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) || b - a <= 4.0 * f64::EPSILON * b.abs() {
            return Some(next);
        }
        x = next;
    }
    None
}

/// `int_0^c z J_nu(z)^2 dz = (c^2/2) [J_nu(c)^2 - J_{nu-1}(c) J_{nu+1}(c)]`.
pub fn lommel_weighted_integral(nu: BesselOrder, c: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain(format!("Lommel integral needs finite c > 0, got {c}")));
    }
    let v = nu.0;
    let j = jv(v, c);
    Ok(0.5 * c * c * (j * j - jv(v - 1.0, c) * jv(v + 1.0, c)))
}

/// Right-hand side of the `sigma = 1` Lommel identity for `3 int_0^z t^3 J_nu(t)^2 dt`.
pub fn lommel_sigma_rhs(nu: BesselOrder, z: f64) -> Result<f64> {
    let v = nu.0;
    let base = lommel_weighted_integral(nu, z)?;
    let j = jv(v, z);
    let jp = jvp(v, z);
    let r = z * jp - j;
    Ok(2.0 * (v * v - 1.0) * base + 0.5 * z * z * (r * r + (z * z - v * v + 1.0) * j * j))
}

/// Difference between `3 int_0^z t^3 J_nu(t)^2 dt` (adaptive quadrature) and
/// the closed combination of `J_nu`, `J'_nu` and the Lommel integral.
pub fn lommel_sigma_identity_check(nu: BesselOrder, z: f64) -> Result<f64> {
    let rhs = lommel_sigma_rhs(nu, z)?;
    let v = nu.0;
    let lhs = 3.0
        * quadrature::integrate(
            |t| {
                let j = jv(v, t);
                t * t * t * j * j
            },
            0.0,
            z,
            1e-13 * (1.0 + z.powi(4)),
        )?;
    Ok(lhs - rhs)
}

/// One line of the invariant suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub checks: Vec<SelfTestCheck>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, max_deviation: f64, tolerance: f64) -> SelfTestCheck {
    SelfTestCheck {
        name: name.to_string(),
        max_deviation,
        tolerance,
        passed: max_deviation <= tolerance,
    }
}

fn sample_x() -> Vec<f64> {
    let mut xs: Vec<f64> = (1..=40).map(|i| 0.05 * i as f64).collect();
    xs.extend((0..400).map(|i| 2.0 + 0.2437 * i as f64));
    xs.retain(|&x| x <= 100.0);
    xs.push(100.0);
    xs
}

/// Runs the recurrence, derivative-identity, closed-form, crossover and zero suites.
pub fn selftest() -> SelfTestReport {
    let tol = 1e-10;
    let orders: Vec<f64> = (0..=12).map(|i| 0.25 * i as f64).chain([1.0 / 3.0, 0.1]).collect();
    let xs = sample_x();

    let mut rec = 0.0_f64;
    let mut der = 0.0_f64;
    for &nu in &orders {
        for &x in &xs {
            let jm = jv(nu - 1.0, x);
            let j0 = jv(nu, x);
            let jp = jv(nu + 1.0, x);
            let lhs = jm + jp;
            let rhs = 2.0 * nu / x * j0;
            let scale = jm.abs().max(jp.abs()).max(rhs.abs()).max(1e-300);
            rec = rec.max((lhs - rhs).abs() / scale);
            let d = 2.0 * jvp(nu, x);
            let scale = jm.abs().max(jp.abs()).max(d.abs()).max(1e-300);
            der = der.max((d - (jm - jp)).abs() / scale);
        }
    }

    let mut half = 0.0_f64;
    for &x in xs.iter().filter(|&&x| x >= 0.5) {
        let env = (2.0 / (PI * x)).sqrt();
        let (s, c) = x.sin_cos();
        let refs = [
            (-0.5, env * c),
            (0.5, env * s),
            (1.5, env * (s / x - c)),
            (2.5, env * ((3.0 / (x * x) - 1.0) * s - 3.0 * c / x)),
        ];
        for (nu, r) in refs {
            half = half.max((jv(nu, x) - r).abs() / env);
        }
    }

    let mut cross = 0.0_f64;
    for &nu in &orders {
        let x = hankel_threshold(nu);
        cross = cross.max((steed(nu, x).0 - hankel(nu, x)).abs());
        cross = cross.max((steed(nu, SERIES_MAX).0 - series(nu, SERIES_MAX)).abs());
    }

    let mut residual = 0.0_f64;
    let mut structure = true;
    for nu in [0.0, 0.25, 1.0 / 3.0, 0.5] {
        match bessel_zeros(BesselOrder(nu), 50) {
            Ok(table) => {
                for &z in table.zeros() {
                    residual = residual.max(jv(nu, z).abs());
                    structure &= jv(nu, z - 1e-6) * jv(nu, z + 1e-6) < 0.0;
                }
                structure &= table.check().all();
            }
            Err(_) => {
                residual = f64::INFINITY;
                structure = false;
            }
        }
    }

    SelfTestReport {
        checks: vec![
            check("recurrence J(nu-1)+J(nu+1)=(2nu/x)J(nu)", rec, tol),
            check("derivative 2J'(nu)=J(nu-1)-J(nu+1)", der, tol),
            check("half-integer closed forms", half, tol),
            check("evaluation crossover agreement", cross, 1e-11),
            check("zero residual |J(j)|", residual, tol),
            check(
                "zero tables: sign change, interlacing, monotone differences",
                if structure { 0.0 } else { 1.0 },
                0.0,
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn order(nu: f64) -> BesselOrder {
        BesselOrder::new(nu).unwrap()
    }

    // Independent oracle: bisection on the ascending series alone.
    fn series_bisect(nu: f64, mut a: f64, mut b: f64) -> f64 {
        let fa = series(nu, a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (series(nu, m) > 0.0) == (fa > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn order_rejects_negative_and_nan() {
        assert!(BesselOrder::new(-0.1).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
        assert!(BesselOrder::new(0.0).is_ok());
    }

    #[test]
    fn basic_values() {
        assert_eq!(bessel_j(order(0.0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(order(0.7), 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(bessel_j(order(0.5), PI / 2.0).unwrap(), 2.0 / PI, epsilon = 1e-15);
        assert!(bessel_j(order(0.0), -1.0).is_err());
    }

    #[test]
    fn first_zero_matches_series_bisection() {
        let oracle = series_bisect(0.0, 2.0, 2.8);
        assert_abs_diff_eq!(oracle, 2.404825557695773, epsilon = 1e-14);
        let t = bessel_zeros(order(0.0), 1).unwrap();
        assert_abs_diff_eq!(t.zero(1), oracle, epsilon = 1e-13);
        assert!(bessel_j(order(0.0), 2.404825557695773).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn agrees_with_libm_integer_orders() {
        for i in 0..2000 {
            let x = 0.01 + 0.1 * i as f64;
            assert_abs_diff_eq!(jv(0.0, x), libm::j0(x), epsilon = 2e-15);
            assert_abs_diff_eq!(jv(1.0, x), libm::j1(x), epsilon = 2e-15);
            assert_abs_diff_eq!(jv(3.0, x), libm::jn(3, x), epsilon = 5e-15);
        }
    }

    #[test]
    fn derivative_examples() {
        assert_abs_diff_eq!(
            bessel_j_deriv(order(0.0), 1.0).unwrap(),
            -libm::j1(1.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            bessel_j_deriv(order(0.5), PI).unwrap(),
            -(2.0_f64).sqrt() / PI,
            epsilon = 1e-14
        );
        assert!(bessel_j_deriv(order(0.5), 0.0).is_err());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-5;
        for nu in [0.0, 0.2, 0.5, 0.9, 1.7, 3.0] {
            for x in [0.3, 1.0, 2.5, 7.0, 19.0, 33.0, 80.0] {
                let fd = (jv(nu, x + h) - jv(nu, x - h)) / (2.0 * h);
                assert!((jvp(nu, x) - fd).abs() <= 1e-6, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn half_integer_zeros_are_multiples_of_pi() {
        let t = bessel_zeros(order(0.5), 3).unwrap();
        for (k, z) in t.zeros().iter().enumerate() {
            assert_abs_diff_eq!(*z, (k + 1) as f64 * PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn interlacing_quarter_order() {
        let t = bessel_zeros(order(0.25), 50).unwrap();
        let c = t.check();
        assert!(c.all(), "{c:?}");
        for w in t.zeros().windows(2) {
            let m = 0.5 * (w[0] + w[1]);
            assert!(jvp(0.25, w[0]) * jvp(0.25, w[1]) < 0.0);
            assert!(jv(0.25, m).abs() > 0.0);
        }
    }

    #[test]
    fn order_zero_derivative_convention() {
        let t = bessel_zeros(order(0.0), 5).unwrap();
        assert_eq!(t.derivative_zeros()[0], 0.0);
        assert_abs_diff_eq!(t.derivative_zeros()[1], 3.831705970207512, epsilon = 1e-12);
        assert!(t.check().all());
    }

    #[test]
    fn steed_and_hankel_overlap() {
        for nu in [0.0, 0.1, 0.5, 0.75, 1.0, 2.3, 4.0] {
            for dx in [0.0, 1.0, 5.0] {
                let x = hankel_threshold(nu) + dx;
                assert_abs_diff_eq!(steed(nu, x).0, hankel(nu, x), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn negative_orders_by_reflection() {
        for x in [0.5, 1.5, 3.0, 10.0, 40.0] {
            let env = (2.0 / (PI * x)).sqrt();
            assert_abs_diff_eq!(jv(-0.5, x), env * x.cos(), epsilon = 1e-13);
        }
        assert_abs_diff_eq!(jv(-1.0, 3.0), -libm::j1(3.0), epsilon = 1e-15);
    }

    #[test]
    fn lommel_half_order_at_pi() {
        assert_abs_diff_eq!(lommel_weighted_integral(order(0.5), PI).unwrap(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn lommel_matches_quadrature() {
        for nu in [0.0, 0.3, 0.5, 0.9, 2.0] {
            for c in [0.4, 2.0, 7.5, 30.0] {
                let q = quadrature::integrate(|z| z * jv(nu, z).powi(2), 0.0, c, 1e-13).unwrap();
                let l = lommel_weighted_integral(order(nu), c).unwrap();
                assert_abs_diff_eq!(q, l, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn lommel_vanishes_at_origin() {
        let v = lommel_weighted_integral(order(0.0), 1e-6).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn sigma_identity_residuals() {
        assert!(lommel_sigma_identity_check(order(0.5), PI).unwrap().abs() <= 1e-9);
        assert!(
            lommel_sigma_identity_check(order(0.0), 2.404825557695773)
                .unwrap()
                .abs()
                <= 1e-9
        );
        assert!(lommel_sigma_identity_check(order(0.3), 1e-3).unwrap().abs() <= 1e-15);
    }

    #[test]
    fn selftest_passes() {
        let r = selftest();
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
