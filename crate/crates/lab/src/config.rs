//! Experiment configuration, read from TOML or JSON.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use graphon_signal::Tolerances;
use serde::{Deserialize, Serialize};

/// Everything a suite run depends on. A config plus the binary version fixes
/// the contents of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    pub seed: u64,
    /// Number of seeded cases; 0 picks the suite default.
    pub cases: usize,
    /// Largest part count for generated instances; 0 picks the suite default.
    pub n: usize,
    /// Signal channel counts to cycle through; empty picks the suite default.
    pub d: Vec<usize>,
    /// Restrict generated kernels to one class (`graphon`, `general_kernel`, ...).
    pub class: Option<String>,
    pub r: f64,
    pub k_grid: Vec<usize>,
    pub trials: usize,
    pub steps: Vec<usize>,
    pub restarts: usize,
    pub tol_profile: String,
    pub tolerances: Option<Tolerances>,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            suite: String::new(),
            seed: 0,
            cases: 0,
            n: 0,
            d: Vec::new(),
            class: None,
            r: 1.0,
            k_grid: Vec::new(),
            trials: 0,
            steps: Vec::new(),
            restarts: 0,
            tol_profile: "default".into(),
            tolerances: None,
            output: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn for_suite(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            ..Self::default()
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
            Some("toml") | None => toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
            Some(other) => bail!("unsupported config extension .{other}; use .toml or .json"),
        };
        Ok(cfg)
    }

    /// Explicit overrides win over the named profile.
    pub fn tolerances(&self) -> Result<Tolerances> {
        if let Some(t) = self.tolerances {
            return Ok(t);
        }
        Tolerances::profile(&self.tol_profile)
            .with_context(|| format!("unknown tolerance profile {:?}", self.tol_profile))
    }

    pub fn cases_or(&self, default: usize) -> usize {
        if self.cases == 0 {
            default
        } else {
            self.cases
        }
    }

    pub fn n_or(&self, default: usize) -> usize {
        if self.n == 0 {
            default
        } else {
            self.n
        }
    }

    pub fn d_or(&self, default: &[usize]) -> Vec<usize> {
        if self.d.is_empty() {
            default.to_vec()
        } else {
            self.d.clone()
        }
    }

    pub fn trials_or(&self, default: usize) -> usize {
        if self.trials == 0 {
            default
        } else {
            self.trials
        }
    }

    pub fn restarts_or(&self, default: usize) -> usize {
        if self.restarts == 0 {
            default
        } else {
            self.restarts
        }
    }

    pub fn k_grid_or(&self, default: &[usize]) -> Vec<usize> {
        if self.k_grid.is_empty() {
            default.to_vec()
        } else {
            self.k_grid.clone()
        }
    }

    pub fn steps_or(&self, default: &[usize]) -> Vec<usize> {
        if self.steps.is_empty() {
            default.to_vec()
        } else {
            self.steps.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let t: ExperimentConfig = toml::from_str("suite = \"norm-chain\"\nseed = 7\nd = [1, 2]\n").unwrap();
        let j: ExperimentConfig = serde_json::from_str(r#"{"suite":"norm-chain","seed":7,"d":[1,2]}"#).unwrap();
        assert_eq!(t, j);
        assert_eq!(t.cases_or(1000), 1000);
        assert!(toml::from_str::<ExperimentConfig>("bogus = 1").is_err());
    }

    #[test]
    fn tolerance_profiles() {
        let mut c = ExperimentConfig::default();
        assert_eq!(c.tolerances().unwrap(), Tolerances::default());
        c.tol_profile = "nope".into();
        assert!(c.tolerances().is_err());
    }
}
