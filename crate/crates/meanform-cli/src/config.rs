//! Run configuration: an optional JSON config file, the thread-count
//! environment override, and validation of both. Command-line flags take
//! precedence over config values; `MEANFORM_THREADS` beats the config's
//! thread count.

use serde::Deserialize;
use std::fs;
use std::path::Path;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV_VAR: &str = "MEANFORM_THREADS";

/// Output format for tabular subcommands; object-shaped outputs (polar
/// factors, reports) are always JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Tolerance overrides; every present value must be positive and finite.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Stopping tolerance for mean-transform iteration.
    pub stop: Option<f64>,
    /// Residual tolerance for operator-class predicates.
    pub class: Option<f64>,
}

/// Optional run configuration (`--config file.json`). Unknown keys are
/// rejected so typos fail loudly instead of silently using defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    /// Iteration cap: matrix iterate traces and shift radius windows.
    pub n_max: Option<usize>,
    /// Index cap for shift weight scans.
    pub i_max: Option<usize>,
    /// Angular sample count for numerical-range boundaries.
    pub range_points: Option<usize>,
    /// Output format for tabular subcommands.
    pub format: Option<OutputFormat>,
    /// Base seed for verification suites.
    pub seed: Option<u64>,
    /// Worker thread count (at least 1); unset means all available cores.
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Loads and validates a config file.
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text =
            fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        config.validate().map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), String> {
        for (name, value) in [
            ("tolerances.stop", self.tolerances.stop),
            ("tolerances.class", self.tolerances.class),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(format!("{name} must be positive and finite, got {v}"));
                }
            }
        }
        if self.threads == Some(0) {
            return Err("threads must be at least 1".to_string());
        }
        if self.range_points == Some(0) {
            return Err("range_points must be at least 1".to_string());
        }
        Ok(())
    }

    /// Thread count to install in the worker pool: the environment variable
    /// beats the config value; `None` keeps every available core.
    pub fn resolve_threads(&self) -> Result<Option<usize>, String> {
        match std::env::var(THREADS_ENV_VAR) {
            Ok(text) => match text.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Ok(Some(n)),
                _ => Err(format!(
                    "{THREADS_ENV_VAR} must be an integer >= 1, got {text:?}"
                )),
            },
            Err(std::env::VarError::NotPresent) => Ok(self.threads),
            Err(e) => Err(format!("{THREADS_ENV_VAR}: {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_valid_and_all_defaults() {
        let config: RunConfig = serde_json::from_str("{}").unwrap();
        config.validate().unwrap();
        assert!(config.format.is_none());
        assert!(config.tolerances.stop.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<RunConfig>("{\"n_maxx\": 3}").unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn nonpositive_tolerances_are_rejected() {
        let config: RunConfig =
            serde_json::from_str("{\"tolerances\": {\"stop\": 0.0}}").unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn zero_threads_are_rejected() {
        let config: RunConfig = serde_json::from_str("{\"threads\": 0}").unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn formats_parse_case_sensitively() {
        let config: RunConfig = serde_json::from_str("{\"format\": \"json\"}").unwrap();
        assert_eq!(config.format, Some(OutputFormat::Json));
        assert!(serde_json::from_str::<RunConfig>("{\"format\": \"JSON\"}").is_err());
    }
}
