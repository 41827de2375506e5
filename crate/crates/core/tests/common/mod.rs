#![allow(dead_code)]

pub mod properties;

use std::collections::VecDeque;

use infsim_core::rng::{stream, SimRng};
use infsim_core::{init_population, run_campaign, ScenarioConfig, SocialGraph, VertexId};
use rand::{Rng, SeedableRng};

/// Scenario in which buying depends only on interest, weight, activeness and
/// depth: everyone is willing, engagement cannot change a weight (`c = 0`)
/// and nobody loses interest (`gamma = 0`). Interest starts at exactly `mu`.
pub fn oracle_config(mu: f64, activeness: f64) -> ScenarioConfig {
    ScenarioConfig {
        mu,
        sigma: 0.0,
        omega: 1.0,
        activeness,
        gamma: 0.0,
        c: 0.0,
        ..ScenarioConfig::default()
    }
}

/// First two moments of the buyer count, obtained by walking every branch of
/// the cascade under [`oracle_config`].
pub fn exact_buyer_moments(
    n: usize,
    edges: &[(usize, usize, f64)],
    seeds: &[usize],
    mu: f64,
    activeness: f64,
) -> (f64, f64) {
    let mut adjacency = vec![Vec::new(); n];
    for &(x, y, w) in edges {
        adjacency[x].push((y, w));
    }
    for list in &mut adjacency {
        list.sort_by_key(|&(y, _)| y);
    }
    let mut is_seed = vec![false; n];
    for &s in seeds {
        is_seed[s] = true;
    }
    let state = Branch {
        queue: seeds.iter().map(|&s| (s, 0)).collect(),
        current: None,
        bought: vec![false; n],
        interest: vec![mu; n],
        buyers: 0,
    };
    let mut moments = (0.0, 0.0);
    explore(&adjacency, &is_seed, activeness, state, 1.0, &mut moments);
    moments
}

#[derive(Clone)]
struct Branch {
    queue: VecDeque<(usize, u32)>,
    /// Agent being processed, its depth, and the next follower index.
    current: Option<(usize, u32, usize)>,
    bought: Vec<bool>,
    interest: Vec<f64>,
    buyers: usize,
}

fn explore(
    adjacency: &[Vec<(usize, f64)>],
    is_seed: &[bool],
    activeness: f64,
    mut state: Branch,
    mut p: f64,
    moments: &mut (f64, f64),
) {
    loop {
        let (x, d, i) = match state.current {
            Some((x, d, i)) if i < adjacency[x].len() => (x, d, i),
            _ => match state.queue.pop_front() {
                Some((x, d)) => {
                    state.current = Some((x, d, 0));
                    continue;
                }
                None => {
                    let b = state.buyers as f64;
                    moments.0 += p * b;
                    moments.1 += p * b * b;
                    return;
                }
            },
        };
        state.current = Some((x, d, i + 1));
        let (f, w) = adjacency[x][i];
        if is_seed[f] || state.bought[f] {
            continue;
        }
        let depth = f64::from(d + 1);
        let q = activeness * state.interest[f] * w / (depth * depth);
        if q > 0.0 {
            let mut buy = state.clone();
            buy.bought[f] = true;
            buy.buyers += 1;
            for &(g, w_fg) in &adjacency[f] {
                let l = buy.interest[g];
                buy.interest[g] = (l + w_fg * l).min(1.0);
            }
            buy.queue.push_back((f, d + 1));
            explore(adjacency, is_seed, activeness, buy, p * q, moments);
        }
        if q >= 1.0 {
            return;
        }
        p *= 1.0 - q;
    }
}

/// Mean buyer count over `trials` independent simulated campaigns.
pub fn simulated_mean_buyers(
    graph: &SocialGraph,
    seeds: &[VertexId],
    config: &ScenarioConfig,
    trials: u64,
    master: u64,
) -> f64 {
    let mut total = 0usize;
    for t in 0..trials {
        let mut rng = stream(master, &[t]);
        let mut pop = init_population(graph, config, &mut rng).unwrap();
        total += run_campaign(graph, &mut pop, seeds, config, &mut rng).unwrap().buyer_count();
    }
    total as f64 / trials as f64
}

/// Random graph on `n` vertices where each ordered pair is an edge with
/// probability `density`, weights uniform in `[0.2, 1)`. Vertex 0 always has
/// at least one follower.
pub fn random_small_graph(seed: u64, n: usize, density: f64) -> Vec<(usize, usize, f64)> {
    let mut rng = SimRng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x != y && (rng.random_bool(density) || (x == 0 && y == 1)) {
                edges.push((x, y, rng.random_range(0.2..1.0)));
            }
        }
    }
    edges
}

/// Directed preferential attachment: each new vertex follows `m` distinct
/// earlier vertices picked with probability proportional to follower count
/// plus one. Produces a heavy-tailed outdegree distribution with every tier
/// populated, unlike a small-world lattice.
pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> SocialGraph {
    let mut rng = SimRng::seed_from_u64(seed);
    let mut urn: Vec<u32> = (0..=m as u32).collect();
    let mut pairs = Vec::with_capacity(n * m);
    for v in (m + 1)..n {
        let mut picked: Vec<u32> = Vec::with_capacity(m);
        while picked.len() < m {
            let x = urn[rng.random_range(0..urn.len())];
            if !picked.contains(&x) {
                picked.push(x);
            }
        }
        for &x in &picked {
            pairs.push((x, v as u32));
            urn.push(x);
        }
        urn.push(v as u32);
    }
    SocialGraph::from_edges(n, pairs, &mut rng).unwrap().0
}
