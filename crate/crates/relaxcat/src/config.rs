//! Flat `key = value` run-configuration format with dotted section
//! prefixes (`mood.eps1 = 1e-3`). Unknown keys are rejected, `#` starts a
//! comment, later assignments win. The parser is total: any byte sequence
//! yields a typed result, never a panic.

use crate::error::ConfigError;
use crate::scheme::SchemeSpec;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub case: Option<String>,
    pub scheme: Option<SchemeSpec>,
    pub schemes: Vec<SchemeSpec>,
    pub n_cells: Option<usize>,
    pub cfl: Option<f64>,
    pub fixed_dt: Option<f64>,
    pub eps: Option<f64>,
    pub eps_list: Vec<f64>,
    pub grids: Vec<usize>,
    pub reference_n: Option<usize>,
    pub repeats: Option<usize>,
    pub out_dir: Option<String>,
    pub mood_enabled: Option<bool>,
    pub mood_eps1: Option<f64>,
    pub mood_eps2: Option<f64>,
    pub a_values: Vec<f64>,
    pub k_samples: Option<usize>,
    pub mu_tol: Option<f64>,
}

fn bad(line: usize, key: &str, what: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        line,
        key: key.to_string(),
        what: what.into(),
    }
}

fn positive_f64(line: usize, key: &str, raw: &str) -> Result<f64, ConfigError> {
    let v: f64 = raw
        .parse()
        .map_err(|_| bad(line, key, format!("`{raw}` is not a number")))?;
    if !v.is_finite() || v <= 0.0 {
        return Err(bad(
            line,
            key,
            format!("must be positive and finite, got {raw}"),
        ));
    }
    Ok(v)
}

fn positive_usize(line: usize, key: &str, raw: &str) -> Result<usize, ConfigError> {
    let v: usize = raw
        .parse()
        .map_err(|_| bad(line, key, format!("`{raw}` is not a positive integer")))?;
    if v == 0 {
        return Err(bad(line, key, "must be at least 1"));
    }
    Ok(v)
}

fn parse_bool(line: usize, key: &str, raw: &str) -> Result<bool, ConfigError> {
    match raw {
        "true" | "on" => Ok(true),
        "false" | "off" => Ok(false),
        _ => Err(bad(
            line,
            key,
            format!("expected true/false/on/off, got `{raw}`"),
        )),
    }
}

fn scheme_spec(raw: &str) -> Result<SchemeSpec, ConfigError> {
    SchemeSpec::parse(raw).ok_or_else(|| ConfigError::UnknownScheme(raw.to_string()))
}

fn list<T>(
    line: usize,
    key: &str,
    raw: &str,
    item: impl Fn(usize, &str, &str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(bad(line, key, "empty list entry"));
        }
        out.push(item(line, key, part)?);
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped
            .split_once('=')
            .ok_or(ConfigError::MissingSeparator { line })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "case" => cfg.case = Some(value.to_string()),
            "scheme" => cfg.scheme = Some(scheme_spec(value)?),
            "schemes" => {
                cfg.schemes = list(line, key, value, |_, _, v| scheme_spec(v))?;
            }
            "n_cells" => cfg.n_cells = Some(positive_usize(line, key, value)?),
            "cfl" => cfg.cfl = Some(positive_f64(line, key, value)?),
            "fixed_dt" => cfg.fixed_dt = Some(positive_f64(line, key, value)?),
            "eps" => cfg.eps = Some(positive_f64(line, key, value)?),
            "eps_list" => cfg.eps_list = list(line, key, value, positive_f64)?,
            "grids" => cfg.grids = list(line, key, value, positive_usize)?,
            "reference_n" => cfg.reference_n = Some(positive_usize(line, key, value)?),
            "repeats" => cfg.repeats = Some(positive_usize(line, key, value)?),
            "out_dir" => cfg.out_dir = Some(value.to_string()),
            "mood.enabled" => cfg.mood_enabled = Some(parse_bool(line, key, value)?),
            "mood.eps1" => cfg.mood_eps1 = Some(positive_f64(line, key, value)?),
            "mood.eps2" => cfg.mood_eps2 = Some(positive_f64(line, key, value)?),
            "stability.a_values" => {
                let values = list(line, key, value, positive_f64)?;
                for &a in &values {
                    if a >= 1.0 {
                        return Err(bad(line, key, format!("slopes must lie in (0,1), got {a}")));
                    }
                }
                cfg.a_values = values;
            }
            "stability.k_samples" => cfg.k_samples = Some(positive_usize(line, key, value)?),
            "stability.mu_tol" => cfg.mu_tol = Some(positive_f64(line, key, value)?),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
    }
    if cfg.cfl.is_some() && cfg.fixed_dt.is_some() {
        return Err(ConfigError::Invalid(
            "cfl and fixed_dt are mutually exclusive".to_string(),
        ));
    }
    Ok(cfg)
}
