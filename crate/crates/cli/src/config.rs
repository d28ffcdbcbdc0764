//! Run configuration: `key = value` file merged with command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Keys recognised in a config file.
pub const KEYS: [&str; 4] = ["prec", "tol", "seed", "json"];

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    /// q-adic truncation for the exact series commands, working bits for the
    /// numerical ones.
    pub prec: Option<u32>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub json: Option<PathBuf>,
}

impl RunConfig {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| format!("line {}: expected 'key = value', got '{raw}'", i + 1))?;
            let bad = |e: &dyn std::fmt::Display| format!("line {}: {key}: {e}", i + 1);
            match key {
                "prec" => cfg.prec = Some(value.parse().map_err(|e| bad(&e))?),
                "tol" => cfg.tol = Some(value.parse().map_err(|e| bad(&e))?),
                "seed" => cfg.seed = Some(value.parse().map_err(|e| bad(&e))?),
                "json" => cfg.json = Some(PathBuf::from(value)),
                _ => return Err(format!("line {}: unknown key '{key}' (known: {})", i + 1, KEYS.join(", "))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Values set in `over` win.
    pub fn merged(self, over: RunConfig) -> Self {
        RunConfig {
            prec: over.prec.or(self.prec),
            tol: over.tol.or(self.tol),
            seed: over.seed.or(self.seed),
            json: over.json.or(self.json),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("tol must be positive, got {t}"));
            }
        }
        if self.prec == Some(0) {
            return Err("prec must be positive".into());
        }
        Ok(())
    }

    /// Working precision in bits for numerical commands.
    pub fn bits(&self) -> Result<u32, String> {
        match self.prec {
            None => Ok(128),
            Some(b) if b >= 64 => Ok(b),
            Some(b) => Err(format!("working precision must be at least 64 bits, got {b}")),
        }
    }

    /// q-adic truncation for series builders.
    pub fn truncation(&self, default: u32) -> u32 {
        self.prec.unwrap_or(default)
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn seed_or(&self, default: u64) -> u64 {
        self.seed.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let cfg = RunConfig::parse("# acceptance run\nprec = 192\ntol=1e-9  # tighter\n\nseed = 4\n").unwrap();
        assert_eq!(cfg.prec, Some(192));
        assert_eq!(cfg.tol, Some(1e-9));
        let over = RunConfig { seed: Some(9), ..Default::default() };
        let m = cfg.merged(over);
        assert_eq!((m.prec, m.seed), (Some(192), Some(9)));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(RunConfig::parse("bits = 3").is_err());
        assert!(RunConfig::parse("prec 3").is_err());
        assert!(RunConfig::parse("tol = -1").is_err());
        assert!(RunConfig::parse("seed = x").is_err());
    }

    #[test]
    fn bit_floor() {
        assert_eq!(RunConfig::default().bits(), Ok(128));
        assert!(RunConfig { prec: Some(32), ..Default::default() }.bits().is_err());
    }
}
