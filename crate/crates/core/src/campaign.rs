//! Breadth-first campaign propagation.
//!
//! Seeds sit at depth 0. When an agent `x` at depth `d` is dequeued, each of
//! its followers `f` is handled in follower order:
//!
//! 1. `x` may engage `f` (probability `eps_x / 100`), raising the run-private
//!    weight of `x -> f` by `c`, capped at 1.
//! 2. `f` is marked exposed.
//! 3. If `f` has not bought and is willing, it is active with probability `a`;
//!    an active `f` buys with probability `interest_f * w(x, f) / (d + 1)^2`.
//! 4. An active `f` then updates the interest of its own followers: upward
//!    for every follower if it bought, downward for each follower with
//!    probability `gamma` if it did not.
//! 5. A buyer is enqueued at depth `d + 1`.
//!
//! Random draws are consumed in exactly that order (engagement, activeness,
//! decision, then one gate per follower of a non-buyer), so a run is a pure
//! function of its inputs and RNG stream. Seeds are skipped when they appear
//! as followers: they never buy and count towards neither reach nor buyers.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::graph::{SocialGraph, VertexId};
use crate::population::Population;

/// Depth attenuation coefficient `d^-2`.
pub fn attenuation(d: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    Ok(alpha(d))
}

#[inline]
fn alpha(d: u32) -> f64 {
    let d = f64::from(d);
    1.0 / (d * d)
}

/// Probability that an agent with interest `lambda` buys when reached over an
/// edge of weight `w` at depth `d`.
pub fn purchase_probability(lambda: f64, w: f64, d: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) || !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidParameter(format!(
            "interest {lambda} and weight {w} must lie in [0, 1]"
        )));
    }
    Ok(lambda * w * attenuation(d)?)
}

/// Influencer engagement: with probability `epsilon / 100` the weight grows by
/// `c`, saturating at 1.
pub fn apply_engagement<R: Rng + ?Sized>(w: f64, epsilon: f64, c: f64, rng: &mut R) -> f64 {
    if rng.random_bool(epsilon / 100.0) {
        (w + c).min(1.0)
    } else {
        w
    }
}

/// Interest update of one follower after its followee decided. A buyer raises
/// it by `w * lambda` (capped at 1); a non-buyer lowers it by `w * lambda` with
/// probability `gamma`. The gate is drawn only for non-buyers.
pub fn propagate_interest<R: Rng + ?Sized>(
    follower_lambda: f64,
    w: f64,
    buyer: bool,
    gamma: f64,
    rng: &mut R,
) -> f64 {
    if buyer {
        (follower_lambda + w * follower_lambda).min(1.0)
    } else if rng.random_bool(gamma) {
        (follower_lambda - w * follower_lambda).max(0.0)
    } else {
        follower_lambda
    }
}

/// Weights modified during one run, keyed by edge index. The base graph is
/// never written.
#[derive(Debug, Default)]
pub struct WeightOverlay {
    changed: HashMap<usize, f64>,
}

impl WeightOverlay {
    pub fn get(&self, graph: &SocialGraph, edge: usize) -> f64 {
        self.changed.get(&edge).copied().unwrap_or_else(|| graph.weight(edge))
    }

    pub fn set(&mut self, edge: usize, w: f64) {
        self.changed.insert(edge, w);
    }

    pub fn len(&self) -> usize {
        self.changed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.changed.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub seeds: Vec<VertexId>,
    /// Buyers in purchase order.
    pub buyers: Vec<VertexId>,
    /// Distinct non-seed agents exposed at least once.
    pub reach: usize,
    pub seed_hiring_cost: f64,
    /// Purchase depth → number of buyers.
    pub depth_histogram: BTreeMap<u32, usize>,
    /// Number of queue dequeues.
    pub steps: usize,
}

impl CampaignResult {
    pub fn buyer_count(&self) -> usize {
        self.buyers.len()
    }

    pub fn summary(&self, graph: &SocialGraph) -> CampaignSummary {
        CampaignSummary {
            buyer_count: self.buyer_count(),
            reach: self.reach,
            seed_hiring_cost: self.seed_hiring_cost,
            depth_histogram: self.depth_histogram.clone(),
            seeds: self.seeds.iter().map(|&v| graph.label(v)).collect(),
        }
    }
}

/// JSON form of a [`CampaignResult`]; seeds carry their original ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub buyer_count: usize,
    pub reach: usize,
    pub seed_hiring_cost: f64,
    pub depth_histogram: BTreeMap<u32, usize>,
    pub seeds: Vec<u64>,
}

/// Runs one campaign. `population` is consumed by the run in the sense that
/// interests and bought/exposed flags are updated in place; pass a freshly
/// initialised population for every trial. Duplicate seeds are ignored.
pub fn run_campaign<R: Rng + ?Sized>(
    graph: &SocialGraph,
    population: &mut Population,
    seeds: &[VertexId],
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<CampaignResult> {
    if population.len() != graph.vertex_count() {
        return Err(Error::SizeMismatch {
            population: population.len(),
            graph: graph.vertex_count(),
        });
    }
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    if let Some(&bad) = seeds.iter().find(|&&s| !graph.contains(s)) {
        return Err(Error::InvalidVertex(bad));
    }

    let mut is_seed = vec![false; graph.vertex_count()];
    let mut queue: VecDeque<(VertexId, u32)> = VecDeque::new();
    let mut unique_seeds = Vec::with_capacity(seeds.len());
    let mut seed_hiring_cost = 0.0;
    for &s in seeds {
        if !is_seed[s] {
            is_seed[s] = true;
            unique_seeds.push(s);
            seed_hiring_cost += population.agent(s).hiring_cost;
            queue.push_back((s, 0));
        }
    }

    let mut overlay = WeightOverlay::default();
    let mut buyers = Vec::new();
    let mut depth_histogram = BTreeMap::new();
    let mut reach = 0usize;
    let mut steps = 0usize;

    while let Some((x, depth)) = queue.pop_front() {
        steps += 1;
        let epsilon = population.agent(x).engagement_rate;
        let next_depth = depth + 1;
        let attenuation = alpha(next_depth);

        for e in graph.edge_range(x) {
            let f = graph.edge_target(e);
            if is_seed[f] {
                continue;
            }

            let base = overlay.get(graph, e);
            let w = apply_engagement(base, epsilon, config.c, rng);
            if w != base {
                overlay.set(e, w);
            }

            let agent = population.agent_mut(f);
            if !agent.exposed {
                agent.exposed = true;
                reach += 1;
            }
            if agent.bought || !agent.willing {
                continue;
            }
            if !rng.random_bool(agent.active_prob) {
                continue;
            }
            let bought = rng.random_bool(agent.interest * w * attenuation);

            for g in graph.edge_range(f) {
                let w_fg = overlay.get(graph, g);
                let follower = population.agent_mut(graph.edge_target(g));
                follower.interest =
                    propagate_interest(follower.interest, w_fg, bought, config.gamma, rng);
            }

            if bought {
                population.agent_mut(f).bought = true;
                buyers.push(f);
                *depth_histogram.entry(next_depth).or_insert(0) += 1;
                queue.push_back((f, next_depth));
            }
        }
    }

    Ok(CampaignResult {
        seeds: unique_seeds,
        buyers,
        reach,
        seed_hiring_cost,
        depth_histogram,
        steps,
    })
}
