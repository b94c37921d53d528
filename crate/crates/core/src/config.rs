//! Flat `key = value` scenario files.
//!
//! ```text
//! # baseline scenario
//! t_aj = 15e-6
//! delta = 1e-6
//! ```
//!
//! Blank lines and `#` comments are ignored. Physical keys are required
//! except `c_t_star` (default 0); the remaining keys are optional.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::model::GameParams;
use crate::sim::DEFAULT_UPDATE_PERIOD;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: key `{key}`: cannot parse {value:?} as a number")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
}

const PHYSICAL: [&str; 7] = ["t_aj", "delta", "p_t", "p_j", "t_p", "c_t", "c_t_star"];
const OPTIONAL: [&str; 4] = ["update_period_cycles", "total_cycles", "xi_min", "xi_max"];

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: GameParams,
    pub update_period_cycles: usize,
    pub total_cycles: Option<usize>,
    pub xi_min: Option<f64>,
    pub xi_max: Option<f64>,
}

impl ScenarioConfig {
    pub fn new(params: GameParams) -> Self {
        ScenarioConfig {
            params,
            update_period_cycles: DEFAULT_UPDATE_PERIOD,
            total_cycles: None,
            xi_min: None,
            xi_max: None,
        }
    }

    /// Serialises in canonical key order; `parse(dump(c)) == c`.
    pub fn dump(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        for (k, v) in PHYSICAL
            .iter()
            .zip([p.t_aj, p.delta, p.p_t, p.p_j, p.t_p, p.c_t, p.c_t_star])
        {
            let _ = writeln!(out, "{k} = {v:e}");
        }
        let _ = writeln!(out, "update_period_cycles = {}", self.update_period_cycles);
        if let Some(n) = self.total_cycles {
            let _ = writeln!(out, "total_cycles = {n}");
        }
        if let Some(v) = self.xi_min {
            let _ = writeln!(out, "xi_min = {v:e}");
        }
        if let Some(v) = self.xi_max {
            let _ = writeln!(out, "xi_max = {v:e}");
        }
        out
    }
}

fn parse_num<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
    })
}

/// Parses a scenario. Only syntax is checked here; physical invariants are
/// left to [`GameParams::validate`].
pub fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut seen: Vec<(String, usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: raw.to_string(),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: raw.to_string(),
            });
        }
        if !PHYSICAL.contains(&k) && !OPTIONAL.contains(&k) {
            return Err(ConfigError::UnknownKey {
                line,
                key: k.to_string(),
            });
        }
        if seen.iter().any(|(s, _, _)| s == k) {
            return Err(ConfigError::Duplicate {
                line,
                key: k.to_string(),
            });
        }
        seen.push((k.to_string(), line, v.to_string()));
    }

    let get = |key: &str| seen.iter().find(|(k, _, _)| k == key);
    let float = |key: &'static str| -> Result<Option<f64>, ConfigError> {
        get(key)
            .map(|(k, l, v)| parse_num::<f64>(*l, k, v))
            .transpose()
    };
    let count = |key: &'static str| -> Result<Option<usize>, ConfigError> {
        get(key)
            .map(|(k, l, v)| parse_num::<usize>(*l, k, v))
            .transpose()
    };
    let required = |key: &'static str| float(key)?.ok_or(ConfigError::Missing(key));

    let params = GameParams {
        t_aj: required("t_aj")?,
        delta: required("delta")?,
        p_t: required("p_t")?,
        p_j: required("p_j")?,
        t_p: required("t_p")?,
        c_t: required("c_t")?,
        c_t_star: float("c_t_star")?.unwrap_or(0.0),
    };
    Ok(ScenarioConfig {
        params,
        update_period_cycles: count("update_period_cycles")?.unwrap_or(DEFAULT_UPDATE_PERIOD),
        total_cycles: count("total_cycles")?,
        xi_min: float("xi_min")?,
        xi_max: float("xi_max")?,
    })
}
