use std::fs;
use std::path::Path;

use degen::{make_problem, QuadratureRule, ALPHA_GRID};
use serde::{Deserialize, Serialize};

use crate::args::{CommonArgs, InitialArgs, OperatorArgs, SimulateArgs, StabilizeArgs, VerifyArgs};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub alpha: f64,
    pub num_modes: usize,
    pub quad_tol: f64,
    pub operator: OperatorConfig,
    pub simulate: SimulateConfig,
    pub stabilize: StabilizeConfig,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            num_modes: 64,
            quad_tol: 1e-11,
            operator: OperatorConfig::default(),
            simulate: SimulateConfig::default(),
            stabilize: StabilizeConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatorConfig {
    pub tau: f64,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self { tau: 0.1 }
    }
}

/// Initial state as `phi1+eps*phik` or as explicit coefficients; at most one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InitialConfig {
    pub u0: Option<String>,
    pub coeffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub u0: Option<String>,
    pub coeffs: Option<Vec<f64>>,
    pub horizon: f64,
    pub record_dt: f64,
    pub control: f64,
    pub full_state: bool,
    /// Largest accepted change of the final error when the truncation doubles.
    pub tail_tolerance: f64,
}

impl SimulateConfig {
    pub fn initial(&self) -> InitialConfig {
        InitialConfig {
            u0: self.u0.clone(),
            coeffs: self.coeffs.clone(),
        }
    }
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            u0: None,
            coeffs: None,
            horizon: 1.0,
            record_dt: 0.01,
            control: 0.0,
            full_state: false,
            tail_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilizeConfig {
    pub u0: Option<String>,
    pub coeffs: Option<Vec<f64>>,
    pub window_length: f64,
    pub windows: usize,
    pub first_modes: usize,
    pub growth: usize,
    pub radius: f64,
    pub record_dt: f64,
    pub max_corrections: usize,
    pub sweep: Vec<f64>,
}

impl StabilizeConfig {
    pub fn initial(&self) -> InitialConfig {
        InitialConfig {
            u0: self.u0.clone(),
            coeffs: self.coeffs.clone(),
        }
    }
}

impl Default for StabilizeConfig {
    fn default() -> Self {
        Self {
            u0: None,
            coeffs: None,
            window_length: 0.5,
            windows: 4,
            first_modes: 1,
            growth: 1,
            radius: 0.1,
            record_dt: 0.01,
            max_corrections: 5,
            sweep: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub alphas: Vec<f64>,
    pub taus: Vec<f64>,
    pub max_k: usize,
    pub gram_modes: usize,
    pub gap_count: usize,
    pub lower_bound_modes: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            alphas: ALPHA_GRID.to_vec(),
            taus: vec![0.01, 0.1, 1.0],
            max_k: 50,
            gram_modes: 32,
            gap_count: 500,
            lower_bound_modes: 200,
        }
    }
}

/// Flag values that override the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub common: CommonArgs,
    pub operator: OperatorArgs,
    pub verify: VerifyArgs,
    pub simulate: SimulateArgs,
    pub stabilize: StabilizeArgs,
}

impl RunConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    /// File (or defaults), then flags, then validation.
    pub fn resolve(overrides: &Overrides) -> Result<Self> {
        let mut cfg = match &overrides.common.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        let c = &o.common;
        set(&mut self.alpha, c.alpha);
        set(&mut self.num_modes, c.num);
        set(&mut self.quad_tol, c.quad_tol);
        set(&mut self.operator.tau, o.operator.tau);

        let v = &o.verify;
        set(&mut self.verify.alphas, v.alphas.clone());
        set(&mut self.verify.taus, v.taus.clone());
        set(&mut self.verify.max_k, v.max_k);

        let s = &o.simulate;
        apply_initial(&mut self.simulate.u0, &mut self.simulate.coeffs, &s.initial);
        set(&mut self.simulate.horizon, s.horizon);
        set(&mut self.simulate.record_dt, s.record_dt);
        set(&mut self.simulate.control, s.control);
        self.simulate.full_state |= s.full_state;

        let z = &o.stabilize;
        apply_initial(&mut self.stabilize.u0, &mut self.stabilize.coeffs, &z.initial);
        set(&mut self.stabilize.window_length, z.window_length);
        set(&mut self.stabilize.windows, z.windows);
        set(&mut self.stabilize.first_modes, z.first_modes);
        set(&mut self.stabilize.growth, z.growth);
        set(&mut self.stabilize.radius, z.radius);
        set(&mut self.stabilize.sweep, z.sweep.clone());
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(2..=1024).contains(&self.num_modes) {
            return invalid(format!("num_modes must lie in [2, 1024], got {}", self.num_modes));
        }
        positive("quad_tol", self.quad_tol)?;
        positive("operator.tau", self.operator.tau)?;

        let s = &self.simulate;
        check_initial("simulate", &s.initial())?;
        positive("simulate.horizon", s.horizon)?;
        positive("simulate.record_dt", s.record_dt)?;
        positive("simulate.tail_tolerance", s.tail_tolerance)?;
        if !s.control.is_finite() {
            return invalid("simulate.control must be finite".into());
        }

        let z = &self.stabilize;
        check_initial("stabilize", &z.initial())?;
        positive("stabilize.window_length", z.window_length)?;
        positive("stabilize.radius", z.radius)?;
        positive("stabilize.record_dt", z.record_dt)?;
        if z.windows == 0 || z.first_modes == 0 {
            return invalid("stabilize.windows and stabilize.first_modes must be at least 1".into());
        }
        for &r in &z.sweep {
            positive("stabilize.sweep", r)?;
        }

        let v = &self.verify;
        if v.alphas.is_empty() || v.taus.is_empty() {
            return invalid("verify.alphas and verify.taus must be nonempty".into());
        }
        for &a in &v.alphas {
            check_alpha(a)?;
        }
        for &t in &v.taus {
            positive("verify.taus", t)?;
        }
        if v.max_k < 2 || v.gram_modes == 0 || v.gap_count < 2 || v.lower_bound_modes < 2 {
            return invalid("verify needs max_k >= 2, gram_modes >= 1, gap_count >= 2, lower_bound_modes >= 2".into());
        }
        Ok(())
    }

    pub fn rule(&self) -> QuadratureRule {
        QuadratureRule::with_tolerance(self.quad_tol)
    }
}

fn set<T>(dst: &mut T, src: Option<T>) {
    if let Some(v) = src {
        *dst = v;
    }
}

fn apply_initial(u0: &mut Option<String>, coeffs: &mut Option<Vec<f64>>, flags: &InitialArgs) {
    if flags.u0.is_some() || flags.coeffs.is_some() {
        *u0 = flags.u0.clone();
        *coeffs = flags.coeffs.clone();
    }
}

fn invalid<T>(msg: String) -> Result<T> {
    Err(CliError::Config(msg))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        invalid(format!("{name} must be positive and finite, got {v}"))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    make_problem(alpha)
        .map(|_| ())
        .map_err(|e| CliError::Config(e.to_string()))
}

fn check_initial(block: &str, init: &InitialConfig) -> Result<()> {
    if init.u0.is_some() && init.coeffs.is_some() {
        return invalid(format!("{block}: u0 and coeffs both given; use one"));
    }
    Ok(())
}
