//! Initial states written as `phi1+0.05*phi2`, `phi1 - 1e-3 phi4`, `0.9*phi1`.

use degen::{ControlOperator, TrajectoryState};

use crate::config::InitialConfig;
use crate::error::{CliError, Result};

pub const DEFAULT_STATE: &str = "phi1+0.05*phi2";

/// `(index, coefficient)` terms; repeated indices add up.
pub fn parse_state(expr: &str) -> Result<Vec<(usize, f64)>> {
    let fail = |reason: &str| CliError::InitialState {
        expr: expr.to_string(),
        reason: reason.to_string(),
    };
    let s: Vec<char> = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(fail("empty"));
    }
    let mut terms = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let mut sign = 1.0;
        if s[i] == '+' || s[i] == '-' {
            if s[i] == '-' {
                sign = -1.0;
            }
            i += 1;
        } else if !terms.is_empty() {
            return Err(fail("terms must be joined by + or -"));
        }
        let start = i;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == '.' || exponent_char(&s, i, start)) {
            i += 1;
        }
        let coef = if i > start {
            let text: String = s[start..i].iter().collect();
            let v: f64 = text.parse().map_err(|_| fail("bad coefficient"))?;
            if i < s.len() && s[i] == '*' {
                i += 1;
            }
            v
        } else {
            1.0
        };
        if s.len() < i + 3 || s[i..i + 3].iter().collect::<String>() != "phi" {
            return Err(fail("expected phiK"));
        }
        i += 3;
        let idx_start = i;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        let idx: usize = s[idx_start..i]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| fail("missing mode index after phi"))?;
        if idx == 0 {
            return Err(fail("mode indices start at 1"));
        }
        if !coef.is_finite() {
            return Err(fail("coefficient must be finite"));
        }
        terms.push((idx, sign * coef));
    }
    Ok(terms)
}

fn exponent_char(s: &[char], i: usize, start: usize) -> bool {
    match s[i] {
        'e' | 'E' => {
            i > start
                && s.get(i + 1)
                    .is_some_and(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
        }
        '+' | '-' => i > start && matches!(s[i - 1], 'e' | 'E'),
        _ => false,
    }
}

/// Coefficient vector of length `n`.
pub fn coefficients(init: &InitialConfig, n: usize) -> Result<Vec<f64>> {
    match (&init.u0, &init.coeffs) {
        (Some(_), Some(_)) => Err(CliError::Config("u0 and coeffs both given; use one".into())),
        (None, Some(c)) => {
            if c.len() > n {
                return Err(CliError::Config(format!(
                    "{} coefficients given for {n} modes",
                    c.len()
                )));
            }
            let mut v = vec![0.0; n];
            v[..c.len()].copy_from_slice(c);
            Ok(v)
        }
        (expr, None) => {
            let expr = expr.as_deref().unwrap_or(DEFAULT_STATE);
            let mut v = vec![0.0; n];
            for (k, c) in parse_state(expr)? {
                if k > n {
                    return Err(CliError::InitialState {
                        expr: expr.to_string(),
                        reason: format!("phi{k} exceeds the {n} retained modes"),
                    });
                }
                v[k - 1] += c;
            }
            Ok(v)
        }
    }
}

pub fn initial_state(init: &InitialConfig, op: &ControlOperator) -> Result<TrajectoryState> {
    let c = coefficients(init, op.dim())?;
    Ok(TrajectoryState::from_coefficients(0.0, &c, op)?)
}
