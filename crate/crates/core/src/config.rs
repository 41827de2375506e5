use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selection::CandidateOrder;

/// How the willing-to-pay subpopulation is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WillingnessMode {
    /// Every agent is independently willing with probability `omega`.
    #[default]
    Bernoulli,
    /// Exactly `round(omega * N)` agents, chosen uniformly, are willing.
    Exact,
}

/// Parameters of one simulated scenario. Every field has a default, so a JSON
/// document only needs to name the fields it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Mean of the initial interest distribution.
    pub mu: f64,
    /// Standard deviation of the initial interest distribution.
    pub sigma: f64,
    /// Fraction of the population willing to pay.
    pub omega: f64,
    /// Probability that an agent is active when the campaign reaches it.
    pub activeness: f64,
    /// Probability that a non-buyer lowers a follower's interest.
    pub gamma: f64,
    /// Influence increment applied when an influencer engages a follower.
    pub c: f64,
    /// Hiring budget.
    pub rho: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub willingness_mode: WillingnessMode,
    pub candidate_order: CandidateOrder,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            mu: 0.5,
            sigma: 0.2,
            omega: 0.5,
            activeness: 0.9,
            gamma: 0.01,
            c: 0.7,
            rho: 68.0,
            trials: 10,
            master_seed: 0,
            willingness_mode: WillingnessMode::default(),
            candidate_order: CandidateOrder::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: ScenarioConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// Checks every field and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut probability = |name: &str, v: f64| {
            if !(0.0..=1.0).contains(&v) {
                problems.push(format!("{name} must lie in [0, 1], got {v}"));
            }
        };
        probability("omega", self.omega);
        probability("activeness", self.activeness);
        probability("gamma", self.gamma);
        probability("c", self.c);
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            problems.push(format!("mu must lie in (0, 1], got {}", self.mu));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            problems.push(format!("sigma must be a finite non-negative number, got {}", self.sigma));
        }
        if self.rho.is_nan() || self.rho < 0.0 {
            problems.push(format!("rho must be non-negative, got {}", self.rho));
        }
        if self.trials == 0 {
            problems.push("trials must be at least 1".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }
}
