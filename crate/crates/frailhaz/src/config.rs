//! Flat `key = value` scenario files.
//!
//! ```text
//! # Scenario 1
//! n_per_arm = 10000
//! n_twin_pairs = 1e4
//! n_survey = 10000
//! h0 = 0.002
//! nu = 1/9
//! r_cau = 0.8
//! t1 = 50
//! delta = 1
//! seed = 0        # optional, default 0
//! n_draws = 10000 # optional, default 10000
//! ```
//!
//! Reals accept a fraction `a/b`; counts accept any integral number such as `1e4`.

use std::collections::HashMap;

use frailhaz_core::sim::ScenarioConfig;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("{key}: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

fn err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        message: message.into(),
    }
}

pub const KEYS: [&str; 10] = [
    "n_per_arm",
    "n_twin_pairs",
    "n_survey",
    "h0",
    "nu",
    "r_cau",
    "t1",
    "delta",
    "seed",
    "n_draws",
];

fn parse_real(key: &str, raw: &str) -> Result<f64, ConfigError> {
    let value = match raw.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| err(key, format!("cannot parse `{raw}`")))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| err(key, format!("cannot parse `{raw}`")))?;
            a / b
        }
        None => raw
            .parse()
            .map_err(|_| err(key, format!("cannot parse `{raw}`")))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(err(key, format!("`{raw}` is not finite")))
    }
}

fn parse_count(key: &str, raw: &str) -> Result<usize, ConfigError> {
    if let Ok(n) = raw.parse::<usize>() {
        return Ok(n);
    }
    let x = parse_real(key, raw)?;
    if x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(err(key, format!("`{raw}` is not a non-negative integer")))
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut values: HashMap<&str, &str> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line, format!("line {}: expected `key = value`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let known = KEYS.iter().find(|k| **k == key).ok_or_else(|| {
            err(
                key,
                format!("unknown key; expected one of {}", KEYS.join(", ")),
            )
        })?;
        if values.insert(known, value).is_some() {
            return Err(err(key, "given more than once"));
        }
    }
    let get = |key: &str| values.get(key).copied().ok_or_else(|| err(key, "missing"));
    let defaults = ScenarioConfig::scenario1();
    let cfg = ScenarioConfig {
        n_per_arm: parse_count("n_per_arm", get("n_per_arm")?)?,
        n_twin_pairs: parse_count("n_twin_pairs", get("n_twin_pairs")?)?,
        n_survey: parse_count("n_survey", get("n_survey")?)?,
        h0: parse_real("h0", get("h0")?)?,
        nu: parse_real("nu", get("nu")?)?,
        r_cau: parse_real("r_cau", get("r_cau")?)?,
        t1: parse_real("t1", get("t1")?)?,
        delta: parse_real("delta", get("delta")?)?,
        seed: match values.get("seed") {
            Some(raw) => raw
                .parse()
                .map_err(|_| err("seed", format!("`{raw}` is not an unsigned 64-bit integer")))?,
            None => 0,
        },
        n_draws: match values.get("n_draws") {
            Some(raw) => parse_count("n_draws", raw)?,
            None => defaults.n_draws,
        },
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ScenarioConfig) -> Result<(), ConfigError> {
    cfg.validate().map_err(|e| {
        let message = e.to_string();
        let key = KEYS
            .iter()
            .find(|k| message.contains(*k))
            .map_or("config", |k| *k);
        err(key, message)
    })
}
