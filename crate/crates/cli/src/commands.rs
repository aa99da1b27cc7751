use std::path::Path;

use degen::bessel::{selftest, ZeroTableCheck};
use degen::bop::{hypothesis_series, lower_bound_check};
use degen::dynamics::{error_to_ground, simulate, tail_sensitivity, TailReport};
use degen::spectral::{eigenvalues, gap_check, gram_matrix, identity_deviation, GapReport};
use degen::stabilize::{radius_sweep, run_stabilization, StabilizationReport, StabilizationSettings};
use degen::{make_problem, ControlOperator, ControlSignal, EigenSystem, Regime, WindowSchedule};
use serde::Serialize;

use crate::config::RunConfig;
use crate::emit::{write_csv, write_json, Cell, Table};
use crate::error::Result;
use crate::initial::{coefficients, initial_state};
use crate::verify::{summary_table, verify_all, GRAM_TOLERANCE};

/// Paths chosen on the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Outputs<'a> {
    pub csv: Option<&'a Path>,
    pub report: Option<&'a Path>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
}

fn system(cfg: &RunConfig, n: usize) -> Result<EigenSystem> {
    Ok(eigenvalues(&make_problem(cfg.alpha)?, n)?)
}

fn operator(cfg: &RunConfig, n: usize) -> Result<ControlOperator> {
    Ok(ControlOperator::new(system(cfg, n)?, &cfg.rule())?)
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Weak => "weak",
        Regime::Strong => "strong",
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub alpha: f64,
    pub regime: &'static str,
    pub nu: f64,
    pub k_alpha: f64,
    pub modes: usize,
    pub zero_table: ZeroTableCheck,
    pub gap: GapReport,
    pub gram_deviation: f64,
    pub passed: bool,
}

pub fn spectrum(cfg: &RunConfig, out: Outputs) -> Result<Outcome> {
    let s = system(cfg, cfg.num_modes)?;
    let mut t = Table::new(["k", "j_nu_k", "lambda_k", "normalizer"]);
    for k in 1..=s.count() {
        t.push(vec![
            k.into(),
            s.zero_table().zero(k).into(),
            s.lambda(k).into(),
            s.normalizers()[k - 1].into(),
        ]);
    }
    write_csv(out.csv, &t)?;
    let zt = s.zero_table().check();
    let gap = gap_check(&s)?;
    let gram_deviation = identity_deviation(&gram_matrix(&s, &cfg.rule())?);
    let passed = zt.increasing
        && zt.interlacing
        && zt.monotone_differences
        && gap.gamma_positive
        && gram_deviation <= GRAM_TOLERANCE;
    let p = s.problem();
    let report = SpectrumReport {
        alpha: cfg.alpha,
        regime: regime_name(p.regime()),
        nu: p.nu().value(),
        k_alpha: p.k_alpha(),
        modes: s.count(),
        zero_table: zt,
        gap,
        gram_deviation,
        passed,
    };
    write_json(out.report, &report)?;
    Ok(Outcome {
        passed,
        summary: format!(
            "spectrum alpha={} N={}: lambda_1={:.12e}, min gap {:.6}, gram deviation {:.2e}",
            cfg.alpha,
            s.count(),
            s.lambda(1),
            gap.min_gap,
            gram_deviation
        ),
    })
}

#[derive(Debug, Serialize)]
pub struct OperatorReport {
    pub alpha: f64,
    pub modes: usize,
    pub symmetry_dev: f64,
    pub first_row_dev: f64,
    pub norm: f64,
    pub c_hat: f64,
    pub lower_bound_ok: bool,
    pub tau: f64,
    pub series_converged: bool,
    pub series_onset: Option<usize>,
    pub b11: f64,
    pub passed: bool,
}

pub fn operator_cmd(cfg: &RunConfig, out: Outputs) -> Result<Outcome> {
    let op = operator(cfg, cfg.num_modes)?;
    let n = op.dim();
    let mut t = Table::new(std::iter::once("j".to_string()).chain((1..=n).map(|k| format!("k{k}"))));
    for j in 1..=n {
        let mut row: Vec<Cell> = vec![j.into()];
        row.extend((1..=n).map(|k| Cell::Float(op.entry(j, k))));
        t.push(row);
    }
    write_csv(out.csv, &t)?;
    let lb = lower_bound_check(&op);
    let series = hypothesis_series(&op, cfg.operator.tau)?;
    let report = OperatorReport {
        alpha: cfg.alpha,
        modes: n,
        symmetry_dev: op.symmetry_deviation(),
        first_row_dev: op.first_row_deviation(),
        norm: op.norm(),
        c_hat: lb.c_hat,
        lower_bound_ok: lb.ok,
        tau: cfg.operator.tau,
        series_converged: series.converged,
        series_onset: series.onset,
        b11: op.entry(1, 1),
        passed: false,
    };
    let passed = report.symmetry_dev <= 1e-10
        && report.first_row_dev <= 1e-8
        && report.norm <= 1.0 + 1e-8
        && report.b11 > 0.0
        && lb.ok
        && series.converged;
    let report = OperatorReport { passed, ..report };
    write_json(out.report, &report)?;
    Ok(Outcome {
        passed,
        summary: format!(
            "operator alpha={} N={n}: symmetry {:.2e}, first row {:.2e}, c_hat {:.6}, series converged {}",
            cfg.alpha, report.symmetry_dev, report.first_row_dev, report.c_hat, report.series_converged
        ),
    })
}

pub fn verify(cfg: &RunConfig, out: Outputs) -> Result<Outcome> {
    let report = verify_all(cfg);
    write_csv(out.csv, &summary_table(&report))?;
    write_json(out.report, &report)?;
    let failed: Vec<String> = report
        .entries
        .iter()
        .filter(|e| !e.passed)
        .map(|e| e.alpha.to_string())
        .collect();
    let summary = if failed.is_empty() {
        format!("verify: all {} exponents pass", report.entries.len())
    } else {
        format!("verify: failed for alpha in {{{}}}", failed.join(", "))
    };
    Ok(Outcome {
        passed: report.passed,
        summary,
    })
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub alpha: f64,
    pub modes: usize,
    pub horizon: f64,
    pub record_dt: f64,
    pub control: f64,
    pub initial_coefficients: Vec<f64>,
    pub final_error: f64,
    pub final_shifted_error: f64,
    pub tail: TailReport,
    pub tail_tolerance: f64,
    pub passed: bool,
}

pub fn simulate_cmd(cfg: &RunConfig, out: Outputs) -> Result<Outcome> {
    let sc = &cfg.simulate;
    let op = operator(cfg, cfg.num_modes)?;
    let large = operator(cfg, 2 * cfg.num_modes)?;
    let init = sc.initial();
    let u0 = initial_state(&init, &op)?;
    let p = if sc.control == 0.0 {
        ControlSignal::zero()
    } else {
        ControlSignal::constant(0.0, sc.horizon, sc.control)?
    };
    let traj = simulate(&u0, &p, sc.horizon, &op, sc.record_dt)?;
    let shown = if sc.full_state { op.dim() } else { op.dim().min(8) };
    let mut t = Table::new(
        ["t", "err", "shifted_err"]
            .into_iter()
            .map(String::from)
            .chain((1..=shown).map(|k| format!("c{k}"))),
    );
    for s in &traj {
        let c = s.coefficients();
        let mut row: Vec<Cell> = vec![s.t().into(), error_to_ground(s).into(), s.shifted_error().into()];
        row.extend(c.iter().take(shown).map(|&v| Cell::Float(v)));
        t.push(row);
    }
    write_csv(out.csv, &t)?;
    let coeffs = coefficients(&init, op.dim())?;
    let tail = tail_sensitivity(&coeffs, &p, sc.horizon, &op, &large)?;
    let last = traj.last().expect("nonempty trajectory");
    let passed = tail.difference <= sc.tail_tolerance;
    let report = SimulateReport {
        alpha: cfg.alpha,
        modes: op.dim(),
        horizon: sc.horizon,
        record_dt: sc.record_dt,
        control: sc.control,
        initial_coefficients: coeffs,
        final_error: error_to_ground(last),
        final_shifted_error: last.shifted_error(),
        tail,
        tail_tolerance: sc.tail_tolerance,
        passed,
    };
    write_json(out.report, &report)?;
    Ok(Outcome {
        passed,
        summary: format!(
            "simulate alpha={} N={}: final error {:.6e}; N vs 2N difference {:.2e}",
            cfg.alpha,
            op.dim(),
            report.final_error,
            tail.difference
        ),
    })
}

#[derive(Debug, Serialize)]
pub struct RadiusSweep {
    pub mode: usize,
    pub radii: Vec<f64>,
    pub largest_success: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct StabilizeOutput {
    pub settings: StabilizationSettings,
    pub modes_per_window: Vec<usize>,
    pub stabilization: StabilizationReport,
    pub radius_sweep: Option<RadiusSweep>,
    pub passed: bool,
}

pub fn stabilize(cfg: &RunConfig, out: Outputs) -> Result<Outcome> {
    let z = &cfg.stabilize;
    let op = operator(cfg, cfg.num_modes)?;
    let schedule = WindowSchedule::growing(z.window_length, z.windows, z.first_modes, z.growth, op.dim())?;
    let settings = StabilizationSettings {
        radius: z.radius,
        max_corrections: z.max_corrections,
        record_dt: z.record_dt,
        ..StabilizationSettings::default()
    };
    let u0 = initial_state(&z.initial(), &op)?;
    let rep = run_stabilization(&u0, &schedule, &op, &settings)?;
    let mut t = Table::new(["t", "err", "shifted_err"]);
    for s in &rep.samples {
        t.push(vec![s.t.into(), s.error.into(), s.shifted_error.into()]);
    }
    write_csv(out.csv, &t)?;
    let sweep = (!z.sweep.is_empty()).then(|| RadiusSweep {
        mode: 2,
        radii: z.sweep.clone(),
        largest_success: radius_sweep(&op, &schedule, &settings, 2, &z.sweep),
    });
    let summary = format!(
        "stabilize alpha={} N={}: log reductions [{}], final/baseline {:.2e}, fit {:?}{}",
        cfg.alpha,
        op.dim(),
        rep.log_reductions
            .iter()
            .map(|r| format!("{r:.2}"))
            .collect::<Vec<_>>()
            .join(", "),
        rep.final_over_baseline,
        rep.fit_status,
        rep.r2.map(|r| format!(" r2={r:.4}")).unwrap_or_default()
    );
    let output = StabilizeOutput {
        settings,
        modes_per_window: schedule.modes_per_window().to_vec(),
        passed: rep.success,
        stabilization: rep,
        radius_sweep: sweep,
    };
    write_json(out.report, &output)?;
    Ok(Outcome {
        passed: output.passed,
        summary,
    })
}

pub fn bessel_selftest(out: Outputs) -> Result<Outcome> {
    let r = selftest();
    let mut t = Table::new(["check", "max_deviation", "tolerance", "passed"]);
    for c in &r.checks {
        t.push(vec![
            c.name.as_str().into(),
            c.max_deviation.into(),
            c.tolerance.into(),
            c.passed.into(),
        ]);
    }
    write_csv(out.csv, &t)?;
    write_json(out.report, &r)?;
    let lines: Vec<String> = r
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {} ({:.1e} <= {:.0e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.tolerance
            )
        })
        .collect();
    Ok(Outcome {
        passed: r.passed(),
        summary: lines.join("\n"),
    })
}
