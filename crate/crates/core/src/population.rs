//! Per-agent attributes and their initialisation.

use std::fmt;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::{ScenarioConfig, WillingnessMode};
use crate::error::{Error, Result};
use crate::graph::{SocialGraph, VertexId};

/// Influencer class by follower count relative to the largest account.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Tier {
    Celebrity = 1,
    Mega = 2,
    Macro = 3,
    MidTier = 4,
    Micro = 5,
    Nano = 6,
}

impl Tier {
    pub const ALL: [Tier; 6] = [
        Tier::Celebrity,
        Tier::Mega,
        Tier::Macro,
        Tier::MidTier,
        Tier::Micro,
        Tier::Nano,
    ];

    pub fn level(self) -> u8 {
        self as u8
    }

    pub fn from_level(level: u8) -> Option<Tier> {
        Tier::ALL.get(usize::from(level).checked_sub(1)?).copied()
    }

    /// Engagement rate in percent.
    pub fn engagement_rate(self) -> f64 {
        match self {
            Tier::Celebrity => 1.0,
            Tier::Mega => 5.0,
            Tier::Macro => 12.0,
            Tier::MidTier => 18.0,
            Tier::Micro => 25.0,
            Tier::Nano => 30.0,
        }
    }

    /// Inclusive lower bound of the tier's normalized-outdegree range, in percent.
    pub fn lower_bound(self) -> u32 {
        match self {
            Tier::Celebrity => 90,
            Tier::Mega => 50,
            Tier::Macro => 25,
            Tier::MidTier => 12,
            Tier::Micro => 6,
            Tier::Nano => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::Celebrity => "celebrity",
            Tier::Mega => "mega",
            Tier::Macro => "macro",
            Tier::MidTier => "mid-tier",
            Tier::Micro => "micro",
            Tier::Nano => "nano",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.level())
    }
}

impl From<Tier> for u8 {
    fn from(t: Tier) -> u8 {
        t.level()
    }
}

impl TryFrom<u8> for Tier {
    type Error = String;

    fn try_from(level: u8) -> Result<Self, String> {
        Tier::from_level(level).ok_or_else(|| format!("tier must be 1..=6, got {level}"))
    }
}

/// Tier and engagement rate for a normalized outdegree `nu` in percent.
/// Ranges include their lower bound; the top tier also includes 100.
pub fn assign_tier(nu: f64) -> Result<(Tier, f64)> {
    if !(0.0..=100.0).contains(&nu) {
        return Err(Error::InvalidParameter(format!(
            "normalized outdegree {nu} is outside [0, 100]"
        )));
    }
    let tier = Tier::ALL
        .into_iter()
        .find(|t| nu >= f64::from(t.lower_bound()))
        .unwrap_or(Tier::Nano);
    Ok((tier, tier.engagement_rate()))
}

/// Integer form of [`assign_tier`] that avoids rounding at range boundaries:
/// `followers / max_outdegree >= bound / 100` is tested as a cross product.
pub fn tier_for_outdegree(followers: usize, max_outdegree: usize) -> Result<Tier> {
    if max_outdegree == 0 {
        return Err(Error::DegenerateGraph);
    }
    if followers > max_outdegree {
        return Err(Error::InvalidParameter(format!(
            "outdegree {followers} exceeds maximum {max_outdegree}"
        )));
    }
    let scaled = followers as u128 * 100;
    Ok(Tier::ALL
        .into_iter()
        .find(|t| scaled >= u128::from(t.lower_bound()) * max_outdegree as u128)
        .unwrap_or(Tier::Nano))
}

/// Cost of hiring an agent with `followers` followers: 10 per 1000 followers.
pub fn hiring_cost(followers: usize) -> f64 {
    followers as f64 / 100.0
}

/// Draws from `Normal(mu, sigma^2)` restricted to `[0, 1]` by rejection.
pub fn sample_truncated_interest<R: Rng + ?Sized>(mu: f64, sigma: f64, rng: &mut R) -> f64 {
    if sigma == 0.0 {
        return mu.clamp(0.0, 1.0);
    }
    let normal = Normal::new(mu, sigma).expect("sigma is finite and positive");
    loop {
        let x = normal.sample(rng);
        if (0.0..=1.0).contains(&x) {
            return x;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    /// Probability of being interested in the product; stays in `[0, 1]`.
    pub interest: f64,
    pub willing: bool,
    pub active_prob: f64,
    pub tier: Tier,
    /// Percent probability of engaging a follower when advertising.
    pub engagement_rate: f64,
    pub hiring_cost: f64,
    pub bought: bool,
    pub exposed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    agents: Vec<AgentState>,
}

impl Population {
    pub fn from_agents(agents: Vec<AgentState>) -> Self {
        Population { agents }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn agent(&self, v: VertexId) -> &AgentState {
        &self.agents[v]
    }

    pub fn agent_mut(&mut self, v: VertexId) -> &mut AgentState {
        &mut self.agents[v]
    }

    pub fn tier_members(&self, tier: Tier) -> Vec<VertexId> {
        self.agents
            .iter()
            .enumerate()
            .filter(|(_, a)| a.tier == tier)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn willing_count(&self) -> usize {
        self.agents.iter().filter(|a| a.willing).count()
    }
}

/// Draws a fresh population for `graph`. Random draws happen in a fixed order:
/// all interests in vertex order, then willingness.
pub fn init_population<R: Rng + ?Sized>(
    graph: &SocialGraph,
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<Population> {
    let n = graph.vertex_count();
    let max = graph.max_outdegree();
    if max == 0 {
        return Err(Error::DegenerateGraph);
    }
    let mut agents = Vec::with_capacity(n);
    for v in 0..n {
        let followers = graph.outdegree(v);
        let tier = tier_for_outdegree(followers, max)?;
        agents.push(AgentState {
            interest: sample_truncated_interest(config.mu, config.sigma, rng),
            willing: false,
            active_prob: config.activeness,
            tier,
            engagement_rate: tier.engagement_rate(),
            hiring_cost: hiring_cost(followers),
            bought: false,
            exposed: false,
        });
    }
    match config.willingness_mode {
        WillingnessMode::Bernoulli => {
            for agent in &mut agents {
                agent.willing = rng.random_bool(config.omega);
            }
        }
        WillingnessMode::Exact => {
            let count = ((config.omega * n as f64).round() as usize).min(n);
            for v in index::sample(rng, n, count) {
                agents[v].willing = true;
            }
        }
    }
    Ok(Population { agents })
}
