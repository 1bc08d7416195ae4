//! `key = value` configuration files for [`GenConfig`].
//!
//! ```text
//! # comment
//! seed = 7
//! target_edges = 100000
//! distractor_ratio = 0.1
//! star_density = 0.01
//! type_mix = 30, 25, 5, 30, 10
//! ```
//!
//! `edges` is accepted for `target_edges`. Missing keys keep their defaults.

use std::str::FromStr;

use thiserror::Error;

use super::GenConfig;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ConfigParseError {
    pub line: usize,
    pub msg: String,
}

fn number<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, ConfigParseError> {
    v.parse().map_err(|_| ConfigParseError {
        line,
        msg: format!("invalid value `{v}` for `{key}`"),
    })
}

impl FromStr for GenConfig {
    type Err = ConfigParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut cfg = GenConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigParseError {
                line,
                msg: format!("expected `key = value`, found `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed" => cfg.seed = number(line, key, value)?,
                "target_edges" | "edges" => cfg.target_edges = number(line, key, value)?,
                "distractor_ratio" => cfg.distractor_ratio = number(line, key, value)?,
                "star_density" => cfg.star_density = number(line, key, value)?,
                "type_mix" => {
                    let parts: Vec<f64> = value
                        .split(',')
                        .map(|w| number(line, key, w.trim()))
                        .collect::<Result<_, _>>()?;
                    cfg.type_mix = parts.try_into().map_err(|_| ConfigParseError {
                        line,
                        msg: "type_mix needs five weights (types 1 to 5)".into(),
                    })?;
                }
                _ => {
                    return Err(ConfigParseError {
                        line,
                        msg: format!("unknown key `{key}`"),
                    })
                }
            }
        }
        Ok(cfg)
    }
}
