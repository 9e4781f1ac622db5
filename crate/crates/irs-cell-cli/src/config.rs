//! Flat key-value configuration file, overridden by flags.
//!
//! Format: one `key = value` per line, `#` starts a comment, blank lines
//! ignored. Values take the same unit suffixes as the flags. The file is
//! looked up from `--config` or the `IRSCELL_CONFIG` environment variable;
//! absent both, built-in defaults apply.
//!
//! ```text
//! # cell electrical identity
//! l1 = 2.5nH
//! l2 = 0.4nH
//! r  = 4
//! window_min = 0.47pF
//! window_max = 2.35pF
//! format = csv
//! ```

use std::path::{Path, PathBuf};

use irs_cell::{CapacitanceWindow, UnitCellParams};

use crate::units::{parse_quantity, Dimension};

/// Environment variable naming the config file.
pub const CONFIG_ENV_VAR: &str = "IRSCELL_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Resolved defaults for a CLI invocation.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub params: UnitCellParams,
    pub window: CapacitanceWindow,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    /// Equivalence-sweep tolerance overrides for `verify`.
    pub phase_tol: f64,
    pub magnitude_tol: f64,
    pub round_trip_tol: f64,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            params: UnitCellParams::default(),
            window: CapacitanceWindow::default(),
            format: OutputFormat::Csv,
            output: None,
            phase_tol: 1e-9,
            magnitude_tol: 1e-9,
            round_trip_tol: 1e-6,
        }
    }
}

impl CliConfig {
    /// Load from an explicit path, else from `IRSCELL_CONFIG`, else
    /// defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self, String> {
        let path = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV_VAR).map(PathBuf::from),
        };
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                Self::parse(&text).map_err(|e| format!("config {}: {e}", p.display()))
            }
            None => Ok(Self::default()),
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let quantity =
                |dim| parse_quantity(value, dim).map_err(|e| format!("line {}: {e}", lineno + 1));
            match key {
                "l1" => cfg.params.l1 = quantity(Dimension::Inductance)?,
                "l2" => cfg.params.l2 = quantity(Dimension::Inductance)?,
                "r" => cfg.params.r = quantity(Dimension::Resistance)?,
                "z0" => cfg.params.z0 = quantity(Dimension::Resistance)?,
                "window_min" => cfg.window.min = quantity(Dimension::Capacitance)?,
                "window_max" => cfg.window.max = quantity(Dimension::Capacitance)?,
                "phase_tol" => cfg.phase_tol = quantity(Dimension::Dimensionless)?,
                "magnitude_tol" => cfg.magnitude_tol = quantity(Dimension::Dimensionless)?,
                "round_trip_tol" => cfg.round_trip_tol = quantity(Dimension::Dimensionless)?,
                "format" => {
                    cfg.format = match value.to_ascii_lowercase().as_str() {
                        "csv" => OutputFormat::Csv,
                        "json" => OutputFormat::Json,
                        other => {
                            return Err(format!("line {}: unknown format '{other}'", lineno + 1))
                        }
                    }
                }
                "output" => cfg.output = Some(PathBuf::from(value)),
                other => return Err(format!("line {}: unknown key '{other}'", lineno + 1)),
            }
        }
        cfg.params
            .validate()
            .map_err(|e| format!("invalid parameters: {e}"))?;
        CapacitanceWindow::new(cfg.window.min, cfg.window.max)
            .map_err(|e| format!("invalid window: {e}"))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_blanks() {
        let cfg = CliConfig::parse(
            "# cell\nl1 = 2.5nH\n\nl2=0.4nH # top layer\nr = 4\nformat = json\nwindow_max = 3pF\n",
        )
        .unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 4.0 * f64::EPSILON * b;
        assert!(close(cfg.params.l1, 2.5e-9));
        assert!(close(cfg.params.l2, 0.4e-9));
        assert_eq!(cfg.params.r, 4.0);
        assert_eq!(cfg.format, OutputFormat::Json);
        assert!(close(cfg.window.max, 3e-12));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(CliConfig::parse("l3 = 1nH\n").is_err());
        assert!(CliConfig::parse("l1 = fast\n").is_err());
        assert!(CliConfig::parse("l1\n").is_err());
        assert!(CliConfig::parse("window_min = 3pF\nwindow_max = 1pF\n").is_err());
    }
}
