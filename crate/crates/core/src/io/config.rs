//! `key = value` run configuration files.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::orchestrator::SearchConfig;
use crate::{Error, Result, Scalar};

/// Keys accepted in a configuration file, in the order they are written.
pub const CONFIG_KEYS: [&str; 21] = [
    "mode",
    "iterations",
    "emitters",
    "repeats",
    "sigma",
    "seed",
    "ladder_size",
    "include_bots",
    "target_flaws",
    "x_bins",
    "y_bins",
    "offset",
    "init_levels_per_policy",
    "metrics_stride",
    "batch_size",
    "workers",
    "team_size",
    "episode_length",
    "offsides",
    "tackle_prob",
    "intercept_prob",
];

fn parsed<V: FromStr>(key: &str, value: &str) -> Result<V> {
    value.parse().map_err(|_| Error::ConfigKey {
        key: key.into(),
        message: format!("cannot parse `{value}`"),
    })
}

fn set<T: Scalar>(c: &mut SearchConfig<T>, key: &str, v: &str) -> Result<()> {
    match key {
        "mode" => c.mode = parsed(key, v)?,
        "iterations" => c.iterations = parsed(key, v)?,
        "emitters" => c.emitters = parsed(key, v)?,
        "repeats" => c.repeats = parsed(key, v)?,
        "sigma" => c.sigma = parsed(key, v)?,
        "seed" => c.seed = parsed(key, v)?,
        "ladder_size" => c.ladder_size = parsed(key, v)?,
        "include_bots" => c.include_bots = parsed(key, v)?,
        "target_flaws" => c.target_flaws = parsed(key, v)?,
        "x_bins" => c.x_bins = parsed(key, v)?,
        "y_bins" => c.y_bins = parsed(key, v)?,
        "offset" => c.offset = parsed(key, v)?,
        "init_levels_per_policy" => c.init_levels_per_policy = parsed(key, v)?,
        "metrics_stride" => c.metrics_stride = parsed(key, v)?,
        "batch_size" => c.batch_size = if v == "auto" { None } else { Some(parsed(key, v)?) },
        "workers" => c.workers = parsed(key, v)?,
        "team_size" => c.match_config.team_size = parsed(key, v)?,
        "episode_length" => c.match_config.episode_length = parsed(key, v)?,
        "offsides" => c.match_config.offsides_enabled = parsed(key, v)?,
        "tackle_prob" => c.match_config.tackle_prob = parsed(key, v)?,
        "intercept_prob" => c.match_config.intercept_prob = parsed(key, v)?,
        _ => {
            return Err(Error::ConfigKey {
                key: key.into(),
                message: "unknown key".into(),
            })
        }
    }
    Ok(())
}

/// Applies `key = value` assignments on top of `base`. Later assignments win.
pub fn apply_config<T: Scalar>(base: SearchConfig<T>, text: &str) -> Result<SearchConfig<T>> {
    let mut config = base;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Malformed {
            line: n + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        set(&mut config, key.trim(), value.trim())?;
    }
    Ok(config)
}

/// Parses and validates configuration text; missing keys take their defaults.
pub fn parse_config_str<T: Scalar>(text: &str) -> Result<SearchConfig<T>> {
    let config = apply_config(SearchConfig::default(), text)?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config<T: Scalar>(path: &Path) -> Result<SearchConfig<T>> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

/// Every key with its current value.
pub fn config_to_string<T: Scalar>(c: &SearchConfig<T>) -> String {
    let mut s = String::new();
    for key in CONFIG_KEYS {
        let value = match key {
            "mode" => c.mode.to_string(),
            "iterations" => c.iterations.to_string(),
            "emitters" => c.emitters.to_string(),
            "repeats" => c.repeats.to_string(),
            "sigma" => c.sigma.to_string(),
            "seed" => c.seed.to_string(),
            "ladder_size" => c.ladder_size.to_string(),
            "include_bots" => c.include_bots.to_string(),
            "target_flaws" => c.target_flaws.to_string(),
            "x_bins" => c.x_bins.to_string(),
            "y_bins" => c.y_bins.to_string(),
            "offset" => c.offset.to_string(),
            "init_levels_per_policy" => c.init_levels_per_policy.to_string(),
            "metrics_stride" => c.metrics_stride.to_string(),
            "batch_size" => c.batch_size.map_or("auto".into(), |b| b.to_string()),
            "workers" => c.workers.to_string(),
            "team_size" => c.match_config.team_size.to_string(),
            "episode_length" => c.match_config.episode_length.to_string(),
            "offsides" => c.match_config.offsides_enabled.to_string(),
            "tackle_prob" => c.match_config.tackle_prob.to_string(),
            "intercept_prob" => c.match_config.intercept_prob.to_string(),
            _ => unreachable!("key list and match arms agree"),
        };
        let _ = writeln!(s, "{key} = {value}");
    }
    s
}

pub fn save_config<T: Scalar>(c: &SearchConfig<T>, path: &Path) -> Result<()> {
    std::fs::write(path, config_to_string(c))?;
    Ok(())
}
