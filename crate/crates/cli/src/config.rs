//! Run configuration: `key = value` file merged under command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use dressed_core::FINE_STRUCTURE;

pub const CONFIG_ENV: &str = "DRESSED_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Config file of `key = value` lines (default: $DRESSED_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Electron mass; all other inputs and outputs are in units of it.
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    /// Coupling e² (default 1/137.035999).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Output format (default: csv for profiles, json for summaries).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: stdout).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Relative tolerance for adaptive quadratures that accept one.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Polar nodes of the mode-sum grid (cloud).
    #[arg(long, global = true)]
    pub n_theta: Option<usize>,
    /// Azimuthal nodes of the mode-sum grid (cloud).
    #[arg(long, global = true)]
    pub n_phi: Option<usize>,
    /// Radial cutoff of the mode sums, units of m (cloud).
    #[arg(long, global = true)]
    pub q_max: Option<f64>,
    /// Polar nodes of the emission sphere (spectrum).
    #[arg(long, global = true)]
    pub sphere_polar: Option<usize>,
    /// Azimuthal nodes of the emission sphere (spectrum).
    #[arg(long, global = true)]
    pub sphere_phi: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mass: f64,
    pub alpha: f64,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub rel_tol: Option<f64>,
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
    pub q_max: Option<f64>,
    pub sphere_polar: Option<usize>,
    pub sphere_phi: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            alpha: FINE_STRUCTURE,
            format: None,
            output: None,
            rel_tol: None,
            n_theta: None,
            n_phi: None,
            q_max: None,
            sphere_polar: None,
            sphere_phi: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Syntax {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn parse_file(path: &Path) -> Result<BTreeMap<String, (usize, String)>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| ConfigError::Syntax {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected `key = value`, found `{line}`")))?;
        let key = key.trim().replace('-', "_");
        if out.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
            return Err(syntax(format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

impl RunConfig {
    /// File values (explicit path, else `$DRESSED_CONFIG`) overridden by flags.
    pub fn resolve(args: &GlobalArgs) -> Result<Self, ConfigError> {
        let path = args
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let mut cfg = RunConfig::default();
        if let Some(path) = path {
            for (key, (line, value)) in parse_file(&path)? {
                let bad = |message: String| ConfigError::Syntax {
                    path: path.clone(),
                    line,
                    message,
                };
                let real = |v: &str| v.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")));
                let count = |v: &str| v.parse::<usize>().map_err(|e| bad(format!("{key}: {e}")));
                match key.as_str() {
                    "mass" => cfg.mass = real(&value)?,
                    "alpha" => cfg.alpha = real(&value)?,
                    "format" => {
                        cfg.format = Some(Format::from_str(&value, true).map_err(bad)?)
                    }
                    "output" => cfg.output = Some(PathBuf::from(&value)),
                    "rel_tol" => cfg.rel_tol = Some(real(&value)?),
                    "n_theta" => cfg.n_theta = Some(count(&value)?),
                    "n_phi" => cfg.n_phi = Some(count(&value)?),
                    "q_max" => cfg.q_max = Some(real(&value)?),
                    "sphere_polar" => cfg.sphere_polar = Some(count(&value)?),
                    "sphere_phi" => cfg.sphere_phi = Some(count(&value)?),
                    _ => return Err(bad(format!("unknown key `{key}`"))),
                }
            }
        }
        if let Some(v) = args.mass {
            cfg.mass = v;
        }
        if let Some(v) = args.alpha {
            cfg.alpha = v;
        }
        cfg.format = args.format.or(cfg.format);
        cfg.output = args.output.clone().or(cfg.output);
        cfg.rel_tol = args.rel_tol.or(cfg.rel_tol);
        cfg.n_theta = args.n_theta.or(cfg.n_theta);
        cfg.n_phi = args.n_phi.or(cfg.n_phi);
        cfg.q_max = args.q_max.or(cfg.q_max);
        cfg.sphere_polar = args.sphere_polar.or(cfg.sphere_polar);
        cfg.sphere_phi = args.sphere_phi.or(cfg.sphere_phi);
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")))
            }
        };
        positive("mass", self.mass)?;
        positive("alpha", self.alpha)?;
        if let Some(v) = self.rel_tol {
            positive("rel_tol", v)?;
        }
        if let Some(v) = self.q_max {
            positive("q_max", v)?;
        }
        for (name, v) in [
            ("n_theta", self.n_theta),
            ("n_phi", self.n_phi),
            ("sphere_polar", self.sphere_polar),
            ("sphere_phi", self.sphere_phi),
        ] {
            if v == Some(0) {
                return Err(ConfigError::Invalid(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flags_override_file() {
        let f = file("# comment\nmass = 2.0\nalpha = 0.01  # inline\nformat = json\n");
        let args = GlobalArgs {
            config: Some(f.path().to_path_buf()),
            mass: Some(3.0),
            ..GlobalArgs::default()
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert_eq!(cfg.mass, 3.0);
        assert_eq!(cfg.alpha, 0.01);
        assert_eq!(cfg.format, Some(Format::Json));
    }

    #[test]
    fn unknown_and_invalid_keys_are_rejected() {
        for text in ["colour = red\n", "mass = -1\n", "mass 2\n", "n_phi = 0\n", "mass = 1\nmass = 2\n"] {
            let f = file(text);
            let args = GlobalArgs {
                config: Some(f.path().to_path_buf()),
                ..GlobalArgs::default()
            };
            assert!(RunConfig::resolve(&args).is_err(), "{text}");
        }
    }
}
