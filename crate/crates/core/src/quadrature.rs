//! Gauss-Legendre rules, composite panels graded toward `x = 0`, and a global
//! adaptive integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }

    /// Appends the mapped nodes and weights of this rule on `[a, b]`.
    pub fn push_mapped(&self, a: f64, b: f64, xs: &mut Vec<f64>, ws: &mut Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            xs.push(mid + half * t);
            ws.push(w * half);
        }
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Global adaptive Gauss-Legendre integration over the partition given by
/// `breaks` (sorted, at least two points). Each panel is estimated by comparing
/// the rule on the panel against the rule on its two halves; the panel with the
/// largest estimate is split until the summed estimate drops below `tol`.
pub fn adaptive<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    f: F,
    breaks: &[f64],
    tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    if breaks.len() < 2 {
        return Err(Error::domain("adaptive quadrature needs at least two break points"));
    }
    let estimate = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        let coarse = rule.integrate(&f, a, b);
        let fine = rule.integrate(&f, a, m) + rule.integrate(&f, m, b);
        Panel {
            a,
            b,
            value: fine,
            error: (fine - coarse).abs(),
        }
    };
    let mut heap: BinaryHeap<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| estimate(w[0], w[1]))
        .collect();
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= tol || heap.len() >= max_panels {
            let value = sum_sorted(heap.iter().map(|p| (p.a, p.value)));
            if total_err > tol {
                return Err(Error::Quadrature {
                    estimate: total_err,
                    tolerance: tol,
                });
            }
            return Ok(QuadResult {
                value,
                error_estimate: total_err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("nonempty panel heap");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        heap.push(estimate(worst.a, m));
        heap.push(estimate(m, worst.b));
    }
}

// Summation in left-to-right panel order keeps results independent of heap layout.
fn sum_sorted(items: impl Iterator<Item = (f64, f64)>) -> f64 {
    let mut v: Vec<(f64, f64)> = items.collect();
    v.sort_by(|x, y| x.0.total_cmp(&y.0));
    v.iter().map(|p| p.1).sum()
}

/// Composite quadrature on `[0, 1]` used for all inner products of eigenfunctions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRule {
    /// Gauss-Legendre nodes per panel.
    pub order: usize,
    /// Absolute tolerance for adaptive integrals.
    pub tolerance: f64,
    /// Ratio of consecutive graded panels toward the origin.
    pub grading_ratio: f64,
    /// Right end of the innermost panel `[0, first_panel]`.
    pub first_panel: f64,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self {
            order: 24,
            tolerance: 1e-11,
            grading_ratio: 0.25,
            first_panel: 1e-14,
        }
    }
}

impl QuadratureRule {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    /// Break points on `[0, 1]`: the interior points in `interior` plus a
    /// geometric grading from the smallest of them down to `first_panel`.
    pub fn breaks(&self, interior: &[f64]) -> Vec<f64> {
        let mut pts: Vec<f64> = interior.iter().copied().filter(|&x| x > 0.0 && x < 1.0).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let lowest = pts.first().copied().unwrap_or(1.0);
        let mut graded = Vec::new();
        let mut g = lowest * self.grading_ratio;
        while g > self.first_panel {
            graded.push(g);
            g *= self.grading_ratio;
        }
        if lowest > self.first_panel {
            graded.push(self.first_panel);
        }
        graded.reverse();
        let mut out = Vec::with_capacity(graded.len() + pts.len() + 2);
        out.push(0.0);
        out.extend(graded);
        out.extend(pts);
        out.push(1.0);
        out
    }

    /// Fixed composite nodes and weights over the panels of [`Self::breaks`].
    pub fn composite(&self, interior: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let gl = GaussLegendre::new(self.order);
        let breaks = self.breaks(interior);
        let mut xs = Vec::with_capacity(breaks.len() * self.order);
        let mut ws = Vec::with_capacity(breaks.len() * self.order);
        for w in breaks.windows(2) {
            gl.push_mapped(w[0], w[1], &mut xs, &mut ws);
        }
        (xs, ws)
    }

    /// Adaptive integral over `[0, 1]` with the graded partition as the initial mesh.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, interior: &[f64]) -> Result<f64> {
        let gl = GaussLegendre::new(self.order.min(20));
        let breaks = self.breaks(interior);
        adaptive(&gl, f, &breaks, self.tolerance, 20_000).map(|r| r.value)
    }
}

/// Adaptive integral of `f` over `[a, b]` with a 15-point rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let gl = GaussLegendre::new(15);
    adaptive(&gl, f, &[a, b], tol, 20_000).map(|r| r.value)
}
