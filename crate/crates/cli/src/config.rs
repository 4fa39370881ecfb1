//! Run configuration: JSON file, command-line overrides, per-command schema.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sinf::arith::{parse_rational, Rational};
use sinf::special::{GridSpec, SpectralParam};
use sinf::zmeasure::ZParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinsConfig {
    /// `[lo, hi, count]` on the negative side.
    pub negative: (f64, f64, usize),
    pub positive: (f64, f64, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nodes: usize,
    pub lo: f64,
    pub hi: f64,
    pub per_panel: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        GridConfig { nodes: g.nodes, lo: g.lo, hi: g.hi, per_panel: g.per_panel }
    }
}

impl From<GridConfig> for GridSpec {
    fn from(g: GridConfig) -> Self {
        GridSpec { nodes: g.nodes, lo: g.lo, hi: g.hi, per_panel: g.per_panel }
    }
}

/// Everything a command may read. Unset fields are omitted from the header.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<BinsConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// Where the artifact goes; not part of what it records.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_samples: Option<usize>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn cfg_err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: ExperimentConfig) -> Self {
        macro_rules! pick {
            ($($f:ident),*) => { ExperimentConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(command, z, t, xi, n, sample_count, seed, order, route, points, bins, grid, mode, out, max_n, max_nodes, max_samples)
    }

    /// Names of the fields that are set.
    pub fn present(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Rejects fields the command does not read.
    pub fn check_schema(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        const ALWAYS: [&str; 4] = ["command", "seed", "mode", "out"];
        let extra: Vec<String> = self.present().into_iter().filter(|k| !ALWAYS.contains(&k.as_str()) && !allowed.contains(&k.as_str())).collect();
        if extra.is_empty() {
            Ok(())
        } else {
            cfg_err(format!(
                "'{}' does not accept: {} (accepted: {})",
                self.command.as_deref().unwrap_or("?"),
                extra.join(", "),
                allowed.join(", ")
            ))
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Float)
    }

    pub fn require<T: Clone>(&self, v: &Option<T>, name: &str) -> Result<T, ConfigError> {
        v.clone().ok_or_else(|| ConfigError(format!("'{}' requires {name}", self.command.as_deref().unwrap_or("?"))))
    }

    fn z_parts(&self) -> Result<(String, String), ConfigError> {
        split_complex(&self.require(&self.z, "z")?)
    }

    pub fn z_f64(&self) -> Result<ZParams<f64>, ConfigError> {
        let (re, im) = self.z_parts()?;
        let z = ZParams::new(parse_f64(&re)?, parse_f64(&im)?);
        self.check_t(z.t())?;
        Ok(z)
    }

    pub fn z_exact(&self) -> Result<ZParams<Rational>, ConfigError> {
        let (re, im) = self.z_parts()?;
        let z = ZParams::new(parse_exact(&re)?, parse_exact(&im)?);
        if let Some(t) = &self.t {
            if parse_exact(t)? != z.t() {
                return cfg_err(format!("t = {t} is not |z|² = {}", z.t()));
            }
        }
        Ok(z)
    }

    pub fn spectral(&self) -> Result<SpectralParam, ConfigError> {
        let z = self.z_f64()?;
        SpectralParam::new(z.re, z.im).map_err(|e| ConfigError(e.to_string()))
    }

    fn check_t(&self, t: f64) -> Result<(), ConfigError> {
        if let Some(s) = &self.t {
            let given = parse_f64(s)?;
            if (given - t).abs() > 1e-12 * t.max(1.0) {
                return cfg_err(format!("t = {s} is not |z|² = {t}"));
            }
        }
        Ok(())
    }

    /// `t` directly, or `|z|²` when only `z` is given.
    pub fn t_f64(&self) -> Result<f64, ConfigError> {
        match (&self.t, &self.z) {
            (Some(t), None) => parse_f64(t),
            (_, Some(_)) => Ok(self.z_f64()?.t()),
            (None, None) => cfg_err(format!("'{}' requires t or z", self.command.as_deref().unwrap_or("?"))),
        }
    }

    pub fn t_exact(&self) -> Result<Rational, ConfigError> {
        match (&self.t, &self.z) {
            (Some(t), None) => parse_exact(t),
            (_, Some(_)) => Ok(self.z_exact()?.t()),
            (None, None) => cfg_err(format!("'{}' requires t or z", self.command.as_deref().unwrap_or("?"))),
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, ConfigError> {
    if s.contains('/') {
        return parse_exact(s).map(|r| sinf::arith::ratio_to_f64(&r));
    }
    s.trim().parse().map_err(|_| ConfigError(format!("bad number '{s}'")))
}

fn parse_exact(s: &str) -> Result<Rational, ConfigError> {
    parse_rational(s).map_err(|e| ConfigError(e.to_string()))
}

/// Splits `a`, `a+bi`, `a-bi` or `bi` into real and imaginary strings.
pub fn split_complex(s: &str) -> Result<(String, String), ConfigError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return Ok((s, "0".into()));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].to_string(), body[k..].to_string()),
        None => ("0".to_string(), body.to_string()),
    };
    let im = match im.as_str() {
        "" | "+" => "1".to_string(),
        "-" => "-1".to_string(),
        _ => im.strip_prefix('+').unwrap_or(&im).to_string(),
    };
    if re.is_empty() {
        return cfg_err(format!("bad complex number '{s}'"));
    }
    Ok((re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(s: &str) -> (String, String) {
        split_complex(s).unwrap()
    }

    #[test]
    fn complex_forms() {
        assert_eq!(split("0.5"), ("0.5".into(), "0".into()));
        assert_eq!(split("0.3+0.2i"), ("0.3".into(), "0.2".into()));
        assert_eq!(split("1/3-2/5i"), ("1/3".into(), "-2/5".into()));
        assert_eq!(split("2i"), ("0".into(), "2".into()));
        assert_eq!(split("1+i"), ("1".into(), "1".into()));
        assert_eq!(split("1e-3-1e-2i"), ("1e-3".into(), "-1e-2".into()));
    }

    #[test]
    fn t_must_match_z() {
        let c = ExperimentConfig { command: Some("x".into()), z: Some("1/2".into()), t: Some("1/3".into()), ..Default::default() };
        assert!(c.z_exact().is_err());
        assert!(c.z_f64().is_err());
        let c = ExperimentConfig { t: Some("1/4".into()), ..c };
        assert_eq!(c.z_exact().unwrap().t(), Rational::new(1.into(), 4.into()));
    }

    #[test]
    fn schema_rejects_foreign_fields() {
        let c = ExperimentConfig { command: Some("kernel q".into()), z: Some("0.3".into()), xi: Some(0.5), ..Default::default() };
        assert!(c.check_schema(&["z"]).is_err());
        assert!(c.check_schema(&["z", "xi"]).is_ok());
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = ExperimentConfig { n: Some(5), seed: Some(1), ..Default::default() };
        let flags = ExperimentConfig { n: Some(7), ..Default::default() };
        let c = file.overlay(flags);
        assert_eq!((c.n, c.seed), (Some(7), Some(1)));
    }
}
