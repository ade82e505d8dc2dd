//! Flat `key = value` run configuration with `#` comments.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::acquisition::AcquisitionKind;
use crate::bo::BoConfig;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("config line {line}: {message}")]
pub struct ConfigFileError {
    /// 1-based line number; 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

/// Parsed configuration. `seed` is `None` when the file has no `seed` key,
/// in which case `config.seed` is 0 and callers may substitute their own.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfigFile {
    pub config: BoConfig,
    pub seed: Option<u64>,
}

impl Default for RunConfigFile {
    fn default() -> Self {
        Self {
            config: BoConfig::default(),
            seed: None,
        }
    }
}

pub const KEYS: [&str; 18] = [
    "budget",
    "n_init",
    "seed",
    "acquisition",
    "xi",
    "beta",
    "feasibility_weighting",
    "n_candidates",
    "n_refine_starts",
    "gp_restarts",
    "min_improvement",
    "stall_patience",
    "density",
    "youngs_modulus",
    "poisson_ratio",
    "yield_strength",
    "area",
    "total_load",
];

fn parse_num<V: std::str::FromStr>(key: &str, value: &str) -> Result<V, String> {
    value
        .parse()
        .map_err(|_| format!("`{key}` expects a number, got `{value}`"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("`{key}` expects true or false, got `{value}`")),
    }
}

fn apply(file: &mut RunConfigFile, key: &str, value: &str) -> Result<(), String> {
    let c = &mut file.config;
    match key {
        "budget" => c.budget = parse_num(key, value)?,
        "n_init" => c.n_init = parse_num(key, value)?,
        "seed" => {
            let s = parse_num(key, value)?;
            c.seed = s;
            file.seed = Some(s);
        }
        "acquisition" => c.acquisition.kind = value.parse::<AcquisitionKind>()?,
        "xi" => c.acquisition.xi = parse_num(key, value)?,
        "beta" => c.acquisition.beta = parse_num(key, value)?,
        "feasibility_weighting" => c.acquisition.feasibility_weighting = parse_bool(key, value)?,
        "n_candidates" => c.acquisition.n_candidates = parse_num(key, value)?,
        "n_refine_starts" => c.acquisition.n_refine_starts = parse_num(key, value)?,
        "gp_restarts" => c.gp_restarts = parse_num(key, value)?,
        "min_improvement" => c.min_improvement = parse_num(key, value)?,
        "stall_patience" => c.stall_patience = parse_num(key, value)?,
        "density" => c.material.density = parse_num(key, value)?,
        "youngs_modulus" => c.material.youngs_modulus = parse_num(key, value)?,
        "poisson_ratio" => c.material.poisson_ratio = parse_num(key, value)?,
        "yield_strength" => c.material.yield_strength = parse_num(key, value)?,
        "area" => c.section.area = parse_num(key, value)?,
        "total_load" => c.total_load = parse_num(key, value)?,
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}

/// Parses and validates a configuration. Keys not present keep their defaults.
pub fn parse(text: &str) -> Result<RunConfigFile, ConfigFileError> {
    let mut file = RunConfigFile::default();
    let mut lines: HashMap<&str, usize> = HashMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigFileError {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if let Some(first) = lines.insert(key, line) {
            return Err(ConfigFileError {
                line,
                message: format!("duplicate key `{key}` (first set on line {first})"),
            });
        }
        apply(&mut file, key, value).map_err(|message| ConfigFileError { line, message })?;
    }
    file.config.validate().map_err(|e| {
        let key = match e.field {
            "acquisition" => "xi",
            other => other,
        };
        ConfigFileError {
            line: lines.get(key).copied().unwrap_or(0),
            message: e.to_string(),
        }
    })?;
    Ok(file)
}

/// Renders every key so that `parse(render(c)) == c`.
pub fn render(file: &RunConfigFile) -> String {
    let c = &file.config;
    let a = &c.acquisition;
    let mut s = String::new();
    let mut kv = |key: &str, value: String, unit: &str| {
        if unit.is_empty() {
            let _ = writeln!(s, "{key} = {value}");
        } else {
            let _ = writeln!(s, "{key} = {value}  # {unit}");
        }
    };
    kv("budget", c.budget.to_string(), "evaluations");
    kv("n_init", c.n_init.to_string(), "");
    if let Some(seed) = file.seed {
        kv("seed", seed.to_string(), "");
    }
    kv("acquisition", a.kind.to_string(), "ei | pi | lcb");
    kv("xi", a.xi.to_string(), "standardized units");
    kv("beta", a.beta.to_string(), "");
    kv("feasibility_weighting", a.feasibility_weighting.to_string(), "");
    kv("n_candidates", a.n_candidates.to_string(), "");
    kv("n_refine_starts", a.n_refine_starts.to_string(), "");
    kv("gp_restarts", c.gp_restarts.to_string(), "");
    kv("min_improvement", c.min_improvement.to_string(), "kg");
    kv("stall_patience", c.stall_patience.to_string(), "0 disables early stopping");
    kv("density", c.material.density.to_string(), "kg/mm^3");
    kv("youngs_modulus", c.material.youngs_modulus.to_string(), "MPa");
    kv("poisson_ratio", c.material.poisson_ratio.to_string(), "");
    kv("yield_strength", c.material.yield_strength.to_string(), "MPa");
    kv("area", c.section.area.to_string(), "mm^2");
    kv("total_load", c.total_load.to_string(), "N");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_round_trip() {
        let f = RunConfigFile::default();
        assert_eq!(parse(&render(&f)).unwrap(), f);
    }

    #[test]
    fn comments_and_blanks() {
        let f = parse("# header\n\nbudget = 20 # evals\nseed=3\n").unwrap();
        assert_eq!(f.config.budget, 20);
        assert_eq!(f.seed, Some(3));
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let e = parse("budget = 20\ncolour = red\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("colour"));
    }

    #[test]
    fn malformed_lines() {
        assert_eq!(parse("budget 20").unwrap_err().line, 1);
        assert_eq!(parse("\nbudget = twenty").unwrap_err().line, 2);
        assert_eq!(parse("budget = 1\nbudget = 2").unwrap_err().line, 2);
        assert_eq!(parse("acquisition = foo").unwrap_err().line, 1);
    }

    #[test]
    fn validation_points_at_offending_line() {
        let e = parse("budget = 5\nn_init = 10\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("n_init"));
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(
            budget in 2usize..500,
            init_frac in 0.0..1.0f64,
            seed in proptest::option::of(any::<u64>()),
            xi in 0.0..1.0f64,
            beta in 0.01..10.0f64,
            weighting in any::<bool>(),
            kind in 0usize..3,
            area in 1.0..5000.0f64,
            load in 0.0..1e6f64,
            yield_strength in 1.0..1000.0f64,
            patience in 0usize..20,
        ) {
            let mut f = RunConfigFile::default();
            let c = &mut f.config;
            c.budget = budget;
            c.n_init = 1 + ((budget - 1) as f64 * init_frac) as usize;
            c.acquisition.xi = xi;
            c.acquisition.beta = beta;
            c.acquisition.feasibility_weighting = weighting;
            c.acquisition.kind = [AcquisitionKind::Ei, AcquisitionKind::Pi, AcquisitionKind::Lcb][kind];
            c.section.area = area;
            c.total_load = load;
            c.material.yield_strength = yield_strength;
            c.stall_patience = patience;
            if let Some(s) = seed {
                c.seed = s;
            }
            f.seed = seed;
            prop_assert_eq!(parse(&render(&f)).unwrap(), f);
        }
    }
}
