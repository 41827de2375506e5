//! Experiment drivers: individual and set validation, situational comparisons
//! under a hiring budget, and the (interest, willingness) sweep.
//!
//! Every selection and every trial draws from its own stream derived from the
//! master seed, the experiment family, the scenario parameters, the tier and
//! the trial index. Work is spread over a rayon pool and gathered by index, so
//! results are identical for any number of threads.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::campaign::run_campaign;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::graph::{SocialGraph, VertexId};
use crate::metrics::{aggregate, AggregateMetrics, CampaignMetrics, MetricsRow, Moments};
use crate::population::{init_population, Population, Tier};
use crate::rng::{domain, stream};
use crate::selection::{select_by_budget, select_by_unique_followers, select_individual, InfluencerSet};

const INDIVIDUAL: u64 = 1;
const SETS: u64 = 2;
/// Shared by situational runs and sweep cells, so a sweep cell reproduces the
/// situational run with the same parameters.
const BUDGET: u64 = 3;

/// Follower-count tolerance used by set validation unless overridden.
pub const DEFAULT_SET_TOLERANCE: f64 = 0.05;

/// Thread count for experiment pools; `0` means one per available core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Parallelism(pub usize);

impl Parallelism {
    fn install<T: Send>(self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.0)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
        Ok(pool.install(f))
    }
}

fn scenario_keys(family: u64, config: &ScenarioConfig, tier: Tier) -> [u64; 5] {
    [
        family,
        config.mu.to_bits(),
        config.omega.to_bits(),
        config.rho.to_bits(),
        u64::from(tier.level()),
    ]
}

/// Population whose static attributes (tier, hiring cost) drive selection.
fn selection_population(graph: &SocialGraph, config: &ScenarioConfig) -> Result<Population> {
    init_population(graph, config, &mut stream(config.master_seed, &[domain::SELECTION]))
}

fn selection_rng(config: &ScenarioConfig, keys: &[u64]) -> crate::rng::SimRng {
    let mut path = vec![domain::SELECTION];
    path.extend_from_slice(keys);
    stream(config.master_seed, &path)
}

/// One trial: fresh population and campaign on the trial's own stream.
fn run_trial(
    graph: &SocialGraph,
    config: &ScenarioConfig,
    seeds: &[VertexId],
    keys: &[u64],
    trial: usize,
) -> Result<CampaignMetrics> {
    let mut path = vec![domain::TRIAL];
    path.extend_from_slice(keys);
    path.push(trial as u64);
    let mut rng = stream(config.master_seed, &path);
    let mut population = init_population(graph, config, &mut rng)?;
    let result = run_campaign(graph, &mut population, seeds, config, &mut rng)?;
    Ok(CampaignMetrics::from(&result))
}

/// Runs `config.trials` trials for each job and aggregates them per job.
/// Jobs are `(seed set, stream keys)`; output order follows input order.
fn run_jobs(
    graph: &SocialGraph,
    config: &ScenarioConfig,
    jobs: &[(&[VertexId], [u64; 5])],
    parallelism: Parallelism,
) -> Result<Vec<AggregateMetrics>> {
    let trials = config.trials;
    let flat: Vec<Result<CampaignMetrics>> = parallelism.install(|| {
        (0..jobs.len() * trials)
            .into_par_iter()
            .map(|i| {
                let (seeds, keys) = &jobs[i / trials];
                run_trial(graph, config, seeds, keys, i % trials)
            })
            .collect()
    })?;
    let flat = flat.into_iter().collect::<Result<Vec<_>>>()?;
    flat.chunks(trials).map(aggregate).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualRow {
    pub tier: Tier,
    pub influencer: VertexId,
    pub followers: usize,
    pub hiring_cost: f64,
    pub buyers: Moments,
    pub reach: Moments,
}

/// One randomly chosen member of each tier runs a campaign alone.
pub fn run_individual_validation(
    graph: &SocialGraph,
    config: &ScenarioConfig,
    parallelism: Parallelism,
) -> Result<Vec<IndividualRow>> {
    config.validate()?;
    let static_pop = selection_population(graph, config)?;
    let picks = Tier::ALL
        .into_iter()
        .map(|tier| {
            let keys = scenario_keys(INDIVIDUAL, config, tier);
            let set = select_individual(graph, &static_pop, tier, config.candidate_order, &mut selection_rng(config, &keys))?;
            Ok((set, keys))
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(&[VertexId], [u64; 5])> = picks.iter().map(|(s, k)| (&s.members[..], *k)).collect();
    let aggs = run_jobs(graph, config, &jobs, parallelism)?;
    Ok(picks
        .iter()
        .zip(aggs)
        .map(|((set, _), agg)| IndividualRow {
            tier: set.tier,
            influencer: set.members[0],
            followers: set.unique_followers,
            hiring_cost: set.total_hiring_cost,
            buyers: agg.buyers,
            reach: agg.reach,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetRow {
    pub set: InfluencerSet,
    pub aggregate: AggregateMetrics,
}

/// Per tier, a set whose members jointly have about `target` unique followers.
pub fn run_set_validation(
    graph: &SocialGraph,
    config: &ScenarioConfig,
    target: usize,
    tolerance: f64,
    parallelism: Parallelism,
) -> Result<Vec<SetRow>> {
    config.validate()?;
    let static_pop = selection_population(graph, config)?;
    let sets = Tier::ALL
        .into_iter()
        .map(|tier| {
            let mut keys = scenario_keys(SETS, config, tier);
            keys[3] = target as u64;
            let set = select_by_unique_followers(
                graph,
                &static_pop,
                tier,
                target,
                tolerance,
                config.candidate_order,
                &mut selection_rng(config, &keys),
            )?;
            Ok((set, keys))
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(&[VertexId], [u64; 5])> = sets.iter().map(|(s, k)| (&s.members[..], *k)).collect();
    let aggs = run_jobs(graph, config, &jobs, parallelism)?;
    Ok(sets
        .into_iter()
        .zip(aggs)
        .map(|((set, _), aggregate)| SetRow { set, aggregate })
        .collect())
}

/// Outcome for one tier of a budget-constrained scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierOutcome {
    pub tier: Tier,
    pub set: Option<InfluencerSet>,
    pub aggregate: Option<AggregateMetrics>,
    /// Why the tier was skipped, if it was.
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SituationalReport {
    pub mu: f64,
    pub omega: f64,
    pub rho: f64,
    pub tiers: Vec<TierOutcome>,
}

impl SituationalReport {
    pub fn tier(&self, tier: Tier) -> Option<&TierOutcome> {
        self.tiers.iter().find(|t| t.tier == tier)
    }

    /// Rows for the tiers that ran.
    pub fn rows(&self) -> Vec<MetricsRow> {
        self.tiers
            .iter()
            .filter_map(|t| {
                let (set, agg) = (t.set.as_ref()?, t.aggregate.as_ref()?);
                Some(MetricsRow::new(self.mu, self.omega, t.tier, set.size, set.total_hiring_cost, agg))
            })
            .collect()
    }
}

fn budget_sets(
    graph: &SocialGraph,
    static_pop: &Population,
    config: &ScenarioConfig,
    tiers: &[Tier],
) -> Vec<(Tier, [u64; 5], Result<InfluencerSet>)> {
    tiers
        .iter()
        .map(|&tier| {
            let keys = scenario_keys(BUDGET, config, tier);
            let set = select_by_budget(
                graph,
                static_pop,
                tier,
                config.rho,
                config.candidate_order,
                &mut selection_rng(config, &keys),
            );
            (tier, keys, set)
        })
        .collect()
}

/// Each tier hires within `config.rho`; tiers whose set cannot be formed are
/// reported as skipped.
pub fn run_situational(
    graph: &SocialGraph,
    config: &ScenarioConfig,
    parallelism: Parallelism,
) -> Result<SituationalReport> {
    config.validate()?;
    let static_pop = selection_population(graph, config)?;
    let sets = budget_sets(graph, &static_pop, config, &Tier::ALL);
    let jobs: Vec<(&[VertexId], [u64; 5])> = sets
        .iter()
        .filter_map(|(_, keys, set)| set.as_ref().ok().map(|s| (&s.members[..], *keys)))
        .collect();
    let mut aggs = run_jobs(graph, config, &jobs, parallelism)?.into_iter();
    let tiers = sets
        .into_iter()
        .map(|(tier, _, set)| match set {
            Ok(set) => TierOutcome {
                tier,
                set: Some(set),
                aggregate: aggs.next(),
                skipped: None,
            },
            Err(e) => TierOutcome {
                tier,
                set: None,
                aggregate: None,
                skipped: Some(e.to_string()),
            },
        })
        .collect();
    Ok(SituationalReport {
        mu: config.mu,
        omega: config.omega,
        rho: config.rho,
        tiers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Ok,
    NoCustomersTier1,
    NoCustomersTier6,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub mu: f64,
    pub omega: f64,
    /// Mean acquisition cost of celebrities minus that of nano-influencers.
    pub delta_cac: Option<f64>,
    /// Mean conversion ratio of celebrities minus that of nano-influencers.
    pub delta_cr: Option<f64>,
    pub status: CellStatus,
}

impl SweepCell {
    fn from_aggregates(mu: f64, omega: f64, celebrity: &AggregateMetrics, nano: &AggregateMetrics) -> Self {
        let status = match (celebrity.cac, nano.cac) {
            (Some(_), Some(_)) => CellStatus::Ok,
            (None, Some(_)) => CellStatus::NoCustomersTier1,
            (Some(_), None) => CellStatus::NoCustomersTier6,
            (None, None) => CellStatus::Both,
        };
        let diff = |a: Option<Moments>, b: Option<Moments>| Some(a?.mean - b?.mean);
        SweepCell {
            mu,
            omega,
            delta_cac: diff(celebrity.cac, nano.cac),
            delta_cr: diff(celebrity.conversion_ratio, nano.conversion_ratio),
            status,
        }
    }
}

/// Cells indexed `[mu index][omega index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub mu_axis: Vec<f64>,
    pub omega_axis: Vec<f64>,
    pub cells: Vec<Vec<SweepCell>>,
}

/// `numerator / denominator` for `numerator` in `1..=denominator`, so
/// `uniform_axis(10)` is 0.1, 0.2, ..., 1.0 without accumulated error.
pub fn uniform_axis(denominator: u32) -> Vec<f64> {
    (1..=denominator).map(|i| f64::from(i) / f64::from(denominator)).collect()
}

/// Interest means 0.1 to 1.0 in steps of 0.1.
pub fn default_mu_axis() -> Vec<f64> {
    uniform_axis(10)
}

/// Willingness fractions 0.05 to 1.0 in steps of 0.05.
pub fn default_omega_axis() -> Vec<f64> {
    uniform_axis(20)
}

/// Sweeps interest mean against willingness, comparing celebrity and
/// nano-influencer sets hired within `config.rho` in every cell.
pub fn run_sweep(
    graph: &SocialGraph,
    config: &ScenarioConfig,
    mu_axis: &[f64],
    omega_axis: &[f64],
    parallelism: Parallelism,
) -> Result<SweepGrid> {
    if mu_axis.is_empty() || omega_axis.is_empty() {
        return Err(Error::InvalidParameter("sweep axes must be non-empty".into()));
    }
    let cell_configs: Vec<ScenarioConfig> = mu_axis
        .iter()
        .flat_map(|&mu| {
            omega_axis.iter().map(move |&omega| ScenarioConfig {
                mu,
                omega,
                ..config.clone()
            })
        })
        .collect();
    for c in &cell_configs {
        c.validate()?;
    }

    let static_pop = selection_population(graph, config)?;
    const PAIR: [Tier; 2] = [Tier::Celebrity, Tier::Nano];
    let mut sets = Vec::with_capacity(cell_configs.len());
    for c in &cell_configs {
        for (_, keys, set) in budget_sets(graph, &static_pop, c, &PAIR) {
            sets.push((set?, keys));
        }
    }

    let trials = config.trials;
    let per_cell = PAIR.len() * trials;
    let flat: Vec<Result<CampaignMetrics>> = parallelism.install(|| {
        (0..cell_configs.len() * per_cell)
            .into_par_iter()
            .map(|i| {
                let cell = i / per_cell;
                let job = i / trials;
                let (set, keys) = &sets[job];
                run_trial(graph, &cell_configs[cell], &set.members, keys, i % trials)
            })
            .collect()
    })?;
    let flat = flat.into_iter().collect::<Result<Vec<_>>>()?;
    let aggs = flat.chunks(trials).map(aggregate).collect::<Result<Vec<_>>>()?;

    let cells = cell_configs
        .iter()
        .zip(aggs.chunks(PAIR.len()))
        .map(|(c, pair)| SweepCell::from_aggregates(c.mu, c.omega, &pair[0], &pair[1]))
        .collect::<Vec<_>>()
        .chunks(omega_axis.len())
        .map(<[SweepCell]>::to_vec)
        .collect();
    Ok(SweepGrid {
        mu_axis: mu_axis.to_vec(),
        omega_axis: omega_axis.to_vec(),
        cells,
    })
}

impl SweepGrid {
    pub fn iter(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().flatten()
    }

    /// Long-form CSV, one row per cell, `mu`-major.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for cell in self.iter() {
            writer.serialize(cell)?;
        }
        writer.flush().map_err(|source| Error::Io {
            path: Default::default(),
            source,
        })?;
        Ok(())
    }

    /// Inverse of [`SweepGrid::write_csv`]. Axes are recovered from the order
    /// in which values first appear.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let cells: Vec<SweepCell> = csv::Reader::from_reader(input)
            .deserialize()
            .collect::<Result<_, _>>()?;
        let mut mu_axis: Vec<f64> = Vec::new();
        let mut omega_axis: Vec<f64> = Vec::new();
        for c in &cells {
            if !mu_axis.contains(&c.mu) {
                mu_axis.push(c.mu);
            }
            if !omega_axis.contains(&c.omega) {
                omega_axis.push(c.omega);
            }
        }
        if cells.is_empty() || cells.len() != mu_axis.len() * omega_axis.len() {
            return Err(Error::InvalidParameter(format!(
                "{} cells do not form a {}x{} grid",
                cells.len(),
                mu_axis.len(),
                omega_axis.len()
            )));
        }
        for (i, c) in cells.iter().enumerate() {
            if c.mu != mu_axis[i / omega_axis.len()] || c.omega != omega_axis[i % omega_axis.len()] {
                return Err(Error::InvalidParameter(format!("cell {i} is out of grid order")));
            }
        }
        let grid = cells.chunks(omega_axis.len()).map(<[SweepCell]>::to_vec).collect();
        Ok(SweepGrid {
            mu_axis,
            omega_axis,
            cells: grid,
        })
    }
}
