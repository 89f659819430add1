//! Flat key=value experiment configuration with one `[experiment]` section
//! and optional per-model sections.
//!
//! ```text
//! # comment
//! [experiment]
//! seed = 42
//! reps = 100
//! models = conjugate_normal, mvn_ig
//! estimators = hybrid, hme, bse
//! out = results.csv
//!
//! [mvn_ig]
//! n_obs = 100
//! n_mcmc = 45
//! dim = 19
//! ```
//!
//! Unknown sections, unknown keys, unknown model or estimator names, and
//! malformed values are all configuration errors (exit code 1), reported
//! with their line number.

use std::collections::BTreeMap;

use crate::registry::{estimator_index, model_defaults, ESTIMATORS};
use crate::{BenchError, Result};

/// Per-model overrides; unset fields fall back to registry defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelSettings {
    pub n_obs: Option<usize>,
    pub n_mcmc: Option<usize>,
    pub dim: Option<usize>,
    pub delta: Option<f64>,
    pub block: Option<usize>,
    /// Path to an edge-list file for `hiw_graphical`.
    pub graph: Option<String>,
}

/// A fully parsed experiment description.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub reps: usize,
    pub models: Vec<String>,
    /// Estimators to run, stored in canonical order.
    pub estimators: Vec<String>,
    pub out: Option<String>,
    pub model_settings: BTreeMap<String, ModelSettings>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            reps: 100,
            models: Vec::new(),
            estimators: ESTIMATORS.iter().map(|s| s.to_string()).collect(),
            out: None,
            model_settings: BTreeMap::new(),
        }
    }
}

fn bad(line: usize, what: impl core::fmt::Display) -> BenchError {
    BenchError::Config(format!("line {line}: {what}"))
}

fn parse_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_num<T: core::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| bad(line, format!("value {value:?} is not valid for key {key:?}")))
}

/// Parses configuration text into an [`ExperimentConfig`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| bad(line_no, "unterminated section header"))?
                .trim();
            if name != "experiment" && model_defaults(name).is_none() {
                return Err(bad(line_no, format!("unknown section {name:?}")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(line_no, format!("expected key = value, got {line:?}")))?;
        let key = key.trim();
        let value = value.trim();
        let section = section
            .as_deref()
            .ok_or_else(|| bad(line_no, "key outside any section"))?;
        if section == "experiment" {
            match key {
                "seed" => cfg.seed = parse_num(line_no, key, value)?,
                "reps" => cfg.reps = parse_num(line_no, key, value)?,
                "models" => cfg.models = parse_list(value),
                "estimators" => cfg.estimators = parse_list(value),
                "out" => cfg.out = Some(value.to_string()),
                _ => return Err(bad(line_no, format!("unknown experiment key {key:?}"))),
            }
        } else {
            let entry = cfg.model_settings.entry(section.to_string()).or_default();
            match key {
                "n_obs" => entry.n_obs = Some(parse_num(line_no, key, value)?),
                "n_mcmc" => entry.n_mcmc = Some(parse_num(line_no, key, value)?),
                "dim" => entry.dim = Some(parse_num(line_no, key, value)?),
                "delta" => entry.delta = Some(parse_num(line_no, key, value)?),
                "block" => entry.block = Some(parse_num(line_no, key, value)?),
                "graph" => entry.graph = Some(value.to_string()),
                _ => {
                    return Err(bad(
                        line_no,
                        format!("unknown key {key:?} in section {section:?}"),
                    ))
                }
            }
        }
    }
    if cfg.models.is_empty() {
        return Err(BenchError::Config(
            "the [experiment] section must list at least one model".into(),
        ));
    }
    for m in &cfg.models {
        if model_defaults(m).is_none() {
            return Err(BenchError::Config(format!("unknown model {m:?}")));
        }
    }
    if cfg.estimators.is_empty() {
        return Err(BenchError::Config(
            "the estimator list must not be empty".into(),
        ));
    }
    for e in &cfg.estimators {
        if estimator_index(e).is_none() {
            return Err(BenchError::Config(format!("unknown estimator {e:?}")));
        }
    }
    cfg.estimators
        .sort_by_key(|e| estimator_index(e).expect("validated above"));
    cfg.estimators.dedup();
    if cfg.reps == 0 {
        return Err(BenchError::Config("reps must be at least 1".into()));
    }
    Ok(cfg)
}
