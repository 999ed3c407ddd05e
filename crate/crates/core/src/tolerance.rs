//! Numeric tolerances shared by every module.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Mass sums and equal-mass comparisons of partitions.
    pub mass: f64,
    /// Recomputing a norm from its witness sets.
    pub recompute: f64,
    /// Slack allowed in inequality chains and bound checks.
    pub chain_slack: f64,
    /// Graph path vs. step path of an MPNN forward pass.
    pub commute: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mass: 1e-12,
            recompute: 1e-12,
            chain_slack: 1e-9,
            commute: 1e-12,
        }
    }
}

impl Tolerances {
    /// Named presets: `default`, `strict` and `loose`.
    pub fn profile(name: &str) -> Option<Self> {
        let base = Self::default();
        match name {
            "default" => Some(base),
            "strict" => Some(Self {
                chain_slack: 1e-12,
                ..base
            }),
            "loose" => Some(Self {
                mass: 1e-9,
                recompute: 1e-9,
                chain_slack: 1e-6,
                commute: 1e-9,
            }),
            _ => None,
        }
    }
}
