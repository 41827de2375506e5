//! Seed-set construction for one influencer tier.
//!
//! Only agents with at least one follower are candidates: an agent nobody
//! follows cannot advertise, and with a zero hiring cost it would otherwise
//! always fit the budget.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{SocialGraph, VertexId};
use crate::population::{Population, Tier};

/// Slack for comparing sums of hiring costs against a budget.
const COST_EPSILON: f64 = 1e-9;

/// Order in which tier members are considered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateOrder {
    /// Uniformly shuffled.
    #[default]
    Random,
    /// Descending outdegree, ties by vertex id.
    LargestFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluencerSet {
    pub tier: Tier,
    /// Members in selection order.
    pub members: Vec<VertexId>,
    pub size: usize,
    pub total_hiring_cost: f64,
    /// Followers of any member, excluding the members themselves.
    pub unique_followers: usize,
}

impl InfluencerSet {
    fn build(graph: &SocialGraph, population: &Population, tier: Tier, members: Vec<VertexId>) -> Self {
        let total_hiring_cost = members.iter().map(|&v| population.agent(v).hiring_cost).sum();
        InfluencerSet {
            tier,
            size: members.len(),
            unique_followers: unique_followers(graph, &members),
            total_hiring_cost,
            members,
        }
    }
}

/// Size of the union of the members' follower sets, members excluded.
pub fn unique_followers(graph: &SocialGraph, members: &[VertexId]) -> usize {
    let mut covered = vec![false; graph.vertex_count()];
    for &m in members {
        for &f in graph.followers(m) {
            covered[f as usize] = true;
        }
    }
    for &m in members {
        covered[m] = false;
    }
    covered.iter().filter(|&&c| c).count()
}

fn candidates<R: Rng + ?Sized>(
    graph: &SocialGraph,
    population: &Population,
    tier: Tier,
    order: CandidateOrder,
    rng: &mut R,
) -> Result<Vec<VertexId>> {
    if population.len() != graph.vertex_count() {
        return Err(Error::SizeMismatch {
            population: population.len(),
            graph: graph.vertex_count(),
        });
    }
    let mut pool: Vec<VertexId> = population
        .tier_members(tier)
        .into_iter()
        .filter(|&v| graph.outdegree(v) > 0)
        .collect();
    if pool.is_empty() {
        return Err(Error::EmptyTier(tier));
    }
    match order {
        CandidateOrder::Random => pool.shuffle(rng),
        CandidateOrder::LargestFirst => {
            pool.sort_by_key(|&v| (std::cmp::Reverse(graph.outdegree(v)), v))
        }
    }
    Ok(pool)
}

/// A single tier member: the first candidate in `order`.
pub fn select_individual<R: Rng + ?Sized>(
    graph: &SocialGraph,
    population: &Population,
    tier: Tier,
    order: CandidateOrder,
    rng: &mut R,
) -> Result<InfluencerSet> {
    let pool = candidates(graph, population, tier, order, rng)?;
    Ok(InfluencerSet::build(graph, population, tier, vec![pool[0]]))
}

/// Hires tier members in candidate order, skipping any whose cost would push
/// the total over `rho`. Pass `f64::INFINITY` to hire the whole tier.
pub fn select_by_budget<R: Rng + ?Sized>(
    graph: &SocialGraph,
    population: &Population,
    tier: Tier,
    rho: f64,
    order: CandidateOrder,
    rng: &mut R,
) -> Result<InfluencerSet> {
    if rho.is_nan() || rho <= 0.0 {
        return Err(Error::InvalidParameter(format!("budget must be positive, got {rho}")));
    }
    let pool = candidates(graph, population, tier, order, rng)?;
    let cheapest = pool
        .iter()
        .map(|&v| population.agent(v).hiring_cost)
        .fold(f64::INFINITY, f64::min);
    if cheapest > rho + COST_EPSILON {
        return Err(Error::BudgetTooSmall {
            tier,
            cheapest,
            budget: rho,
        });
    }

    let mut spent = 0.0;
    let mut members = Vec::new();
    for v in pool {
        let cost = population.agent(v).hiring_cost;
        if spent + cost <= rho + COST_EPSILON {
            spent += cost;
            members.push(v);
        }
    }
    Ok(InfluencerSet::build(graph, population, tier, members))
}

/// Adds tier members in candidate order until their unique followers reach
/// `ceil(target * (1 - tolerance))`. The final member may overshoot `target`.
pub fn select_by_unique_followers<R: Rng + ?Sized>(
    graph: &SocialGraph,
    population: &Population,
    tier: Tier,
    target: usize,
    tolerance: f64,
    order: CandidateOrder,
    rng: &mut R,
) -> Result<InfluencerSet> {
    if target == 0 {
        return Err(Error::InvalidParameter("follower target must be positive".into()));
    }
    if !(0.0..1.0).contains(&tolerance) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must lie in [0, 1), got {tolerance}"
        )));
    }
    let needed = (target as f64 * (1.0 - tolerance) - COST_EPSILON).ceil() as usize;
    let pool = candidates(graph, population, tier, order, rng)?;

    let mut covered = vec![false; graph.vertex_count()];
    let mut is_member = vec![false; graph.vertex_count()];
    let mut unique = 0usize;
    let mut members = Vec::new();
    for v in pool {
        if covered[v] {
            unique -= 1;
        }
        is_member[v] = true;
        members.push(v);
        for &f in graph.followers(v) {
            let f = f as usize;
            if !covered[f] {
                covered[f] = true;
                if !is_member[f] {
                    unique += 1;
                }
            }
        }
        if unique >= needed {
            return Ok(InfluencerSet::build(graph, population, tier, members));
        }
    }
    Err(Error::TierExhausted {
        tier,
        reached: unique,
        needed,
    })
}
