//! Hypothesis checks over a grid of exponents.

use degen::bop::{entry_quadrature, first_row_analytic, ground_entry_analytic, hypothesis_series, lower_bound_check};
use degen::spectral::{eigenvalues, gap_check, gram_matrix, identity_deviation};
use degen::{make_problem, ControlOperator, Regime};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, VerifyConfig};
use crate::emit::{Cell, Table};

pub const GRAM_TOLERANCE: f64 = 1e-8;
pub const FIRST_ROW_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub count: usize,
    pub min_gap: f64,
    pub argmin: usize,
    /// `7 pi/16` or `pi/2`, by branch.
    pub constant: f64,
    pub constant_ok: bool,
    pub certified_bound: f64,
    pub certified_ok: bool,
    pub differences_monotone: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub tau: f64,
    pub converged: bool,
    /// First index from which every term ratio stays below 1/2.
    pub onset: Option<usize>,
    pub last_partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub alpha: f64,
    pub regime: String,
    pub nu: f64,
    pub k_alpha: f64,
    pub gap: Option<GapEntry>,
    pub gram_deviation: Option<f64>,
    pub first_row_deviation: Option<f64>,
    pub c_hat: Option<f64>,
    pub lower_bound_ok: Option<bool>,
    pub series: Vec<SeriesEntry>,
    pub b11: Option<f64>,
    pub positivity_left: Option<f64>,
    pub positivity_right: Option<f64>,
    pub positivity_holds: Option<bool>,
    pub errors: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub quad_tol: f64,
    pub settings: VerifyConfig,
    pub entries: Vec<VerifyEntry>,
    pub passed: bool,
}

/// Every requested exponent in parallel; a failing sub-check marks its entry
/// failed and the run continues.
pub fn verify_all(cfg: &RunConfig) -> VerifyReport {
    let entries: Vec<VerifyEntry> = cfg
        .verify
        .alphas
        .par_iter()
        .map(|&alpha| verify_alpha(alpha, cfg))
        .collect();
    let passed = entries.iter().all(|e| e.passed);
    VerifyReport {
        quad_tol: cfg.quad_tol,
        settings: cfg.verify.clone(),
        entries,
        passed,
    }
}

fn verify_alpha(alpha: f64, cfg: &RunConfig) -> VerifyEntry {
    let v = &cfg.verify;
    let rule = cfg.rule();
    let mut e = VerifyEntry {
        alpha,
        regime: String::new(),
        nu: f64::NAN,
        k_alpha: f64::NAN,
        gap: None,
        gram_deviation: None,
        first_row_deviation: None,
        c_hat: None,
        lower_bound_ok: None,
        series: Vec::new(),
        b11: None,
        positivity_left: None,
        positivity_right: None,
        positivity_holds: None,
        errors: Vec::new(),
        passed: false,
    };
    let problem = match make_problem(alpha) {
        Ok(p) => p,
        Err(err) => {
            e.errors.push(err.to_string());
            return e;
        }
    };
    e.regime = match problem.regime() {
        Regime::Weak => "weak".into(),
        Regime::Strong => "strong".into(),
    };
    e.nu = problem.nu().value();
    e.k_alpha = problem.k_alpha();
    let mut note = |r: degen::Result<()>| {
        if let Err(err) = r {
            e.errors.push(err.to_string());
        }
    };

    let mut gap = None;
    note((|| {
        let s = eigenvalues(&problem, v.gap_count + 1)?;
        let g = gap_check(&s)?;
        gap = Some(GapEntry {
            count: v.gap_count,
            min_gap: g.min_gap,
            argmin: g.argmin,
            constant: g.bound,
            constant_ok: g.ok,
            certified_bound: g.certified_bound,
            certified_ok: g.certified_ok,
            differences_monotone: g.differences_monotone,
            passed: g.gamma_positive && g.certified_ok && g.differences_monotone,
        });
        Ok(())
    })());

    let mut gram = None;
    note((|| {
        let s = eigenvalues(&problem, v.gram_modes)?;
        gram = Some(identity_deviation(&gram_matrix(&s, &rule)?));
        Ok(())
    })());

    let mut first_row = None;
    note((|| {
        let s = eigenvalues(&problem, v.max_k)?;
        let mut dev = 0.0_f64;
        for k in 2..=v.max_k {
            dev = dev.max((first_row_analytic(&s, k)? - entry_quadrature(&s, 1, k, &rule)?).abs());
        }
        first_row = Some(dev);
        Ok(())
    })());

    let mut lower = None;
    let mut series = Vec::new();
    let mut ground = None;
    note((|| {
        let s = eigenvalues(&problem, v.lower_bound_modes)?;
        ground = Some(ground_entry_analytic(&s)?);
        let op = ControlOperator::new(s, &rule)?;
        lower = Some(lower_bound_check(&op));
        for &tau in &v.taus {
            let r = hypothesis_series(&op, tau)?;
            series.push(SeriesEntry {
                tau,
                converged: r.converged,
                onset: r.onset,
                last_partial_sum: *r.partial_sums.last().unwrap_or(&f64::NAN),
            });
        }
        Ok(())
    })());

    e.gap = gap;
    e.gram_deviation = gram;
    e.first_row_deviation = first_row;
    e.c_hat = lower.as_ref().map(|l| l.c_hat);
    e.lower_bound_ok = lower.as_ref().map(|l| l.ok);
    e.series = series;
    e.b11 = ground.map(|g| g.value);
    e.positivity_left = ground.map(|g| g.positivity_left);
    e.positivity_right = ground.map(|g| g.positivity_right);
    e.positivity_holds = ground.map(|g| g.positivity_holds);
    e.passed = e.errors.is_empty()
        && e.gap.as_ref().is_some_and(|g| g.passed)
        && e.gram_deviation.is_some_and(|d| d <= GRAM_TOLERANCE)
        && e.first_row_deviation.is_some_and(|d| d <= FIRST_ROW_TOLERANCE)
        && e.lower_bound_ok == Some(true)
        && e.series.len() == v.taus.len()
        && e.series.iter().all(|s| s.converged)
        && e.b11.is_some_and(|b| b > 0.0)
        && e.positivity_holds == Some(true);
    e
}

pub fn summary_table(report: &VerifyReport) -> Table {
    let mut t = Table::new([
        "alpha",
        "regime",
        "nu",
        "min_gap",
        "gap_constant",
        "gap_constant_ok",
        "gap_certified_ok",
        "gram_deviation",
        "first_row_deviation",
        "c_hat",
        "lower_bound_ok",
        "series_converged",
        "b11",
        "positivity_left",
        "positivity_right",
        "passed",
    ]);
    let f = |v: Option<f64>| Cell::Float(v.unwrap_or(f64::NAN));
    let b = |v: Option<bool>| Cell::Bool(v.unwrap_or(false));
    for e in &report.entries {
        t.push(vec![
            e.alpha.into(),
            e.regime.as_str().into(),
            e.nu.into(),
            f(e.gap.as_ref().map(|g| g.min_gap)),
            f(e.gap.as_ref().map(|g| g.constant)),
            b(e.gap.as_ref().map(|g| g.constant_ok)),
            b(e.gap.as_ref().map(|g| g.certified_ok)),
            f(e.gram_deviation),
            f(e.first_row_deviation),
            f(e.c_hat),
            b(e.lower_bound_ok),
            Cell::Bool(!e.series.is_empty() && e.series.iter().all(|s| s.converged)),
            f(e.b11),
            f(e.positivity_left),
            f(e.positivity_right),
            e.passed.into(),
        ]);
    }
    t
}
