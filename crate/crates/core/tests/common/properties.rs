//! Model invariants as proptest properties, runnable from `#[test]`s and from
//! the acceptance harness alike.

use std::collections::HashSet;

use infsim_core::campaign::{apply_engagement, propagate_interest};
use infsim_core::rng::SimRng;
use infsim_core::selection::{select_by_budget, select_by_unique_followers, unique_followers};
use infsim_core::{init_population, run_campaign, CandidateOrder, ScenarioConfig, SocialGraph, Tier};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::SeedableRng;

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

pub fn graph_strategy() -> impl Strategy<Value = SocialGraph> {
    (2usize..40).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, 0.0..=1.0f64), 1..n * 4).prop_map(move |raw| {
            let mut seen = HashSet::new();
            let edges: Vec<_> = std::iter::once((0, 1, 0.5))
                .chain(raw)
                .filter(|&(x, y, _)| x != y && seen.insert((x, y)))
                .collect();
            SocialGraph::from_weighted_edges(n, edges).unwrap()
        })
    })
}

pub fn config_strategy() -> impl Strategy<Value = ScenarioConfig> {
    (
        0.01..=1.0f64,
        0.0..0.5f64,
        0.0..=1.0f64,
        0.0..=1.0f64,
        0.0..=1.0f64,
        0.0..=1.0f64,
    )
        .prop_map(|(mu, sigma, omega, activeness, gamma, c)| ScenarioConfig {
            mu,
            sigma,
            omega,
            activeness,
            gamma,
            c,
            ..ScenarioConfig::default()
        })
}

type Outcome = Result<(), String>;

fn finish<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Outcome {
    r.map_err(|e| e.to_string())
}

pub fn engagement_stays_in_unit_interval(cases: u32) -> Outcome {
    let s = (0.0..=1.0f64, 0.0..=100.0f64, 0.0..=1.0f64, any::<u64>());
    finish(runner(cases).run(&s, |(w, eps, c, seed)| {
        let out = apply_engagement(w, eps, c, &mut SimRng::seed_from_u64(seed));
        prop_assert!((0.0..=1.0).contains(&out));
        prop_assert!(out >= w);
        Ok(())
    }))
}

pub fn interest_stays_in_unit_interval(cases: u32) -> Outcome {
    let s = (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, any::<bool>(), any::<u64>());
    finish(runner(cases).run(&s, |(l, w, gamma, buyer, seed)| {
        let out = propagate_interest(l, w, buyer, gamma, &mut SimRng::seed_from_u64(seed));
        prop_assert!((0.0..=1.0).contains(&out));
        if buyer {
            prop_assert!(out >= l)
        } else {
            prop_assert!(out <= l)
        }
        Ok(())
    }))
}

/// Clamping, buyers never exceed reach, every agent is enqueued at most once,
/// base weights are untouched and the cascade terminates within `n` steps.
pub fn campaign_invariants(cases: u32) -> Outcome {
    let s = (
        graph_strategy(),
        config_strategy(),
        any::<u64>(),
        proptest::collection::vec(any::<prop::sample::Index>(), 1..4),
    );
    finish(runner(cases).run(&s, |(graph, config, seed, picks)| {
        let n = graph.vertex_count();
        let seeds: Vec<usize> = picks.iter().map(|i| i.index(n)).collect();
        let base_weights = graph.weights().to_vec();
        let mut rng = SimRng::seed_from_u64(seed);
        let mut pop = init_population(&graph, &config, &mut rng).unwrap();
        let willing: Vec<bool> = pop.agents().iter().map(|a| a.willing).collect();
        let result = run_campaign(&graph, &mut pop, &seeds, &config, &mut rng).unwrap();

        prop_assert!(pop.agents().iter().all(|a| (0.0..=1.0).contains(&a.interest)));
        prop_assert!(result.buyer_count() <= result.reach);
        prop_assert!(result.reach <= n - result.seeds.len());

        let distinct: HashSet<_> = result.buyers.iter().collect();
        prop_assert_eq!(distinct.len(), result.buyer_count());
        prop_assert_eq!(result.steps, result.seeds.len() + result.buyer_count());
        prop_assert!(result.steps <= n);
        prop_assert_eq!(result.depth_histogram.values().sum::<usize>(), result.buyer_count());

        for &b in &result.buyers {
            prop_assert!(!result.seeds.contains(&b));
            prop_assert!(willing[b]);
            prop_assert!(pop.agent(b).bought && pop.agent(b).exposed);
        }
        prop_assert_eq!(pop.agents().iter().filter(|a| a.exposed).count(), result.reach);
        prop_assert_eq!(graph.weights(), &base_weights[..]);
        Ok(())
    }))
}

pub fn campaign_is_a_function_of_its_seed(cases: u32) -> Outcome {
    let s = (graph_strategy(), config_strategy(), any::<u64>());
    finish(runner(cases).run(&s, |(graph, config, seed)| {
        let run = || {
            let mut rng = SimRng::seed_from_u64(seed);
            let mut pop = init_population(&graph, &config, &mut rng).unwrap();
            let result = run_campaign(&graph, &mut pop, &[0], &config, &mut rng).unwrap();
            (result, pop)
        };
        prop_assert_eq!(run(), run());
        Ok(())
    }))
}

pub fn budget_sets_fit_the_budget(cases: u32) -> Outcome {
    let s = (graph_strategy(), 0.01..2.0f64, any::<u64>(), any::<bool>());
    finish(runner(cases).run(&s, |(graph, rho, seed, largest_first)| {
        let pop = init_population(&graph, &ScenarioConfig::default(), &mut SimRng::seed_from_u64(seed)).unwrap();
        let order = if largest_first { CandidateOrder::LargestFirst } else { CandidateOrder::Random };
        for tier in Tier::ALL {
            if let Ok(set) = select_by_budget(&graph, &pop, tier, rho, order, &mut SimRng::seed_from_u64(seed)) {
                prop_assert!(set.size >= 1);
                prop_assert!(set.total_hiring_cost <= rho + 1e-9);
                prop_assert!(set.members.iter().all(|&v| pop.agent(v).tier == tier && graph.outdegree(v) > 0));
            }
        }
        Ok(())
    }))
}

/// The set reaches the follower target, and would not without its last member.
pub fn follower_sets_reach_their_target(cases: u32) -> Outcome {
    let s = (graph_strategy(), 1usize..20, 0.0..0.5f64, any::<u64>());
    finish(runner(cases).run(&s, |(graph, target, tolerance, seed)| {
        let pop = init_population(&graph, &ScenarioConfig::default(), &mut SimRng::seed_from_u64(seed)).unwrap();
        let needed = target as f64 * (1.0 - tolerance);
        for tier in Tier::ALL {
            let mut rng = SimRng::seed_from_u64(seed);
            if let Ok(set) = select_by_unique_followers(&graph, &pop, tier, target, tolerance, CandidateOrder::Random, &mut rng) {
                prop_assert!(set.unique_followers as f64 >= needed.ceil() - 1e-9);
                let without_last = unique_followers(&graph, &set.members[..set.size - 1]);
                prop_assert!((without_last as f64) < needed || set.size == 1);
            }
        }
        Ok(())
    }))
}

/// Within one budget, celebrities are hired in fewer numbers than
/// nano-influencers because each costs more.
pub fn cheaper_tiers_need_larger_sets(cases: u32) -> Outcome {
    let s = (60usize..200, 1usize..4, any::<u64>());
    finish(runner(cases).run(&s, |(n, hubs, seed)| {
        // `hubs` accounts followed by everyone else, plus a ring.
        let mut edges = Vec::new();
        for h in 0..hubs {
            for f in hubs..n {
                edges.push((h, f, 0.5));
            }
        }
        for v in hubs..n {
            edges.push((v, hubs + (v - hubs + 1) % (n - hubs), 0.5));
        }
        let graph = SocialGraph::from_weighted_edges(n, edges).unwrap();
        let pop = init_population(&graph, &ScenarioConfig::default(), &mut SimRng::seed_from_u64(seed)).unwrap();
        let rho = hubs as f64 * (n - hubs) as f64 / 100.0;
        let mut rng = SimRng::seed_from_u64(seed);
        let celeb = select_by_budget(&graph, &pop, Tier::Celebrity, rho, CandidateOrder::Random, &mut rng).unwrap();
        let nano = select_by_budget(&graph, &pop, Tier::Nano, rho, CandidateOrder::Random, &mut rng).unwrap();
        prop_assert_eq!(celeb.size, hubs);
        prop_assert!(nano.size > celeb.size);
        Ok(())
    }))
}

type Property = fn(u32) -> Outcome;

/// Every property with its case count.
pub const SUITE: [(&str, Property, u32); 7] = [
    ("engagement clamp", engagement_stays_in_unit_interval, 1024),
    ("interest clamp", interest_stays_in_unit_interval, 1024),
    ("campaign invariants", campaign_invariants, 512),
    ("determinism", campaign_is_a_function_of_its_seed, 256),
    ("budget sets", budget_sets_fit_the_budget, 256),
    ("follower sets", follower_sets_reach_their_target, 256),
    ("set sizes by tier", cheaper_tiers_need_larger_sets, 64),
];
