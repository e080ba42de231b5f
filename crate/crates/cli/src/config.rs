use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use scl_core::bench::{Example, Method, DEFAULT_DT};
use scl_core::plant::Example3Scenario;
use serde::Deserialize;

/// Default output directory when neither `--out`, the config file nor
/// `SCL_LAB_OUT` name one.
pub const DEFAULT_OUT: &str = "scl-lab-out";
pub const OUT_ENV: &str = "SCL_LAB_OUT";

/// JSON form of a run; every field is optional here and has a matching flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub example: Option<String>,
    pub method: Option<String>,
    pub scenario: Option<String>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub x0: Option<Vec<f64>>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields set in `flags` replace those read from the file.
    pub fn overlay(self, flags: RunConfigFile) -> Self {
        Self {
            example: flags.example.or(self.example),
            method: flags.method.or(self.method),
            scenario: flags.scenario.or(self.scenario),
            dt: flags.dt.or(self.dt),
            t_end: flags.t_end.or(self.t_end),
            output_dir: flags.output_dir.or(self.output_dir),
            x0: flags.x0.or(self.x0),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub example: Example,
    pub method: Method,
    pub scenario: Option<Example3Scenario>,
    pub dt: f64,
    pub t_end: Option<f64>,
    pub output_dir: PathBuf,
    pub x0: Option<Vec<f64>>,
}

pub fn output_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn check_dt(dt: f64) -> Result<f64> {
    if !(dt.is_finite() && dt > 0.0 && dt <= 0.1) {
        bail!("dt must lie in (0, 0.1], got {dt}");
    }
    Ok(dt)
}

impl TryFrom<RunConfigFile> for RunConfig {
    type Error = anyhow::Error;

    fn try_from(f: RunConfigFile) -> Result<Self> {
        let example: Example = f
            .example
            .context("missing example (--example ex1|ex2|ex3)")?
            .parse()
            .map_err(anyhow::Error::msg)?;
        let method: Method = f
            .method
            .context("missing method (--method sclc|jlc|flc|rflc|adrc)")?
            .parse()
            .map_err(anyhow::Error::msg)?;
        let scenario = f
            .scenario
            .map(|s| s.parse::<Example3Scenario>().map_err(anyhow::Error::msg))
            .transpose()?;
        let dt = check_dt(f.dt.unwrap_or(DEFAULT_DT))?;
        if let Some(t) = f.t_end {
            if !(t.is_finite() && t > 0.0) {
                bail!("t_end must be positive, got {t}");
            }
        }
        if let Some(x0) = &f.x0 {
            if x0.iter().any(|v| !v.is_finite()) {
                bail!("x0 must be finite");
            }
        }
        Ok(Self {
            example,
            method,
            scenario,
            dt,
            t_end: f.t_end,
            output_dir: output_dir(f.output_dir),
            x0: f.x0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: RunConfigFile =
            serde_json::from_str(r#"{"example":"ex3","method":"jlc","scenario":"ii","dt":0.002}"#).unwrap();
        let flags = RunConfigFile { method: Some("sclc".into()), ..Default::default() };
        let cfg = RunConfig::try_from(file.overlay(flags)).unwrap();
        assert_eq!(cfg.method, Method::Sclc);
        assert_eq!(cfg.example, Example::Ex3);
        assert_eq!(cfg.scenario, Some(Example3Scenario::II));
        assert_eq!(cfg.dt, 0.002);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(serde_json::from_str::<RunConfigFile>(r#"{"exmple":"ex1"}"#).is_err());
        let bad = RunConfigFile { example: Some("ex1".into()), method: Some("sclc".into()), dt: Some(-1.0), ..Default::default() };
        assert!(RunConfig::try_from(bad).is_err());
        let missing = RunConfigFile { example: Some("ex1".into()), ..Default::default() };
        assert!(RunConfig::try_from(missing).is_err());
    }
}
