mod manifest;
mod source;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use infsim_core::experiments::{
    run_individual_validation, run_set_validation, run_situational, run_sweep, uniform_axis, CellStatus,
    Parallelism, DEFAULT_SET_TOLERANCE,
};
use infsim_core::graph::generate_small_world;
use infsim_core::metrics::write_metrics_csv;
use infsim_core::rng::{domain, stream};
use infsim_core::{Orientation, ScenarioConfig, SmallWorldOrientation, SocialGraph};
use serde::Serialize;

use manifest::RunManifest;
use source::GraphSource;

#[derive(Parser)]
#[command(name = "infsim", version, about = "Simulate influencer marketing campaigns on follower graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load an edge list and report its statistics.
    Ingest(GraphArgs),
    /// Write a Watts-Strogatz small-world graph as an edge list.
    Generate(GenerateArgs),
    /// Campaign by one influencer from each tier.
    ValidateIndividual(ScenarioArgs),
    /// Campaign by a set from each tier with a common follower count.
    ValidateSets(SetArgs),
    /// Compare tiers hiring within one budget.
    Situational(ScenarioArgs),
    /// Celebrity minus nano-influencer metrics over an interest/willingness grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge-list path, or ws:N:K:P[:both-directions|random-single].
    #[arg(long)]
    graph: GraphSource,
    /// `reversed` when a line "a b" means a follows b.
    #[arg(long, default_value = "as-is")]
    orientation: Orientation,
    /// Master seed for weights and all simulation randomness.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// JSON scenario file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct SetArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Unique followers each tier's set should reach.
    #[arg(long, default_value_t = 3383)]
    target: usize,
    #[arg(long, default_value_t = DEFAULT_SET_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Interest means 1/steps, 2/steps, ..., 1.
    #[arg(long, default_value_t = 10)]
    mu_steps: u32,
    /// Willingness fractions 1/steps, 2/steps, ..., 1.
    #[arg(long, default_value_t = 20)]
    omega_steps: u32,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value = "both-directions")]
    lattice_orientation: SmallWorldOrientation,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

impl ScenarioArgs {
    /// Defaults, then the JSON file, then flags.
    fn resolve(&self) -> anyhow::Result<ScenarioConfig> {
        let mut config = match &self.config {
            Some(path) => ScenarioConfig::from_json_file(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(v) = self.graph.seed {
            config.master_seed = v;
        }
        if let Some(v) = self.trials {
            config.trials = v;
        }
        if let Some(v) = self.mu {
            config.mu = v;
        }
        if let Some(v) = self.omega {
            config.omega = v;
        }
        if let Some(v) = self.rho {
            config.rho = v;
        }
        config.validate()?;
        Ok(config)
    }
}

struct Run {
    graph: SocialGraph,
    config: ScenarioConfig,
    manifest: RunManifest,
    out_dir: PathBuf,
}

impl Run {
    fn start(command: &str, args: &ScenarioArgs) -> anyhow::Result<Run> {
        let started = Instant::now();
        let config = args.resolve()?;
        let (graph, _) = args.graph.graph.load(args.graph.orientation, config.master_seed)?;
        log::info!("graph {}: {:?}", args.graph.graph, graph.stats());
        let out_dir = prepare_out_dir(&args.graph.out_dir)?;
        let manifest = RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            graph_source: args.graph.graph.to_string(),
            orientation: args.graph.orientation.to_string(),
            graph: graph.stats(),
            seed: config.master_seed,
            jobs: args.jobs,
            config: config.clone(),
            extra: serde_json::Value::Null,
            outputs: Vec::new(),
            duration_secs: 0.0,
            started: Some(started),
        };
        Ok(Run {
            graph,
            config,
            manifest,
            out_dir,
        })
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> anyhow::Result<()> {
        let path = self.out_dir.join(name);
        write_csv(&path, rows)?;
        self.manifest.outputs.push(path);
        Ok(())
    }

    fn finish(self) -> anyhow::Result<()> {
        let path = self.manifest.write(&self.out_dir)?;
        log::info!("wrote {}", path.display());
        Ok(())
    }
}

fn prepare_out_dir(dir: &Path) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.to_path_buf())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = csv::Writer::from_writer(file);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct IndividualRecord {
    tier: u8,
    influencer: u64,
    followers: usize,
    hiring_cost: f64,
    mean_psi: f64,
    var_psi: f64,
    mean_chi: f64,
    var_chi: f64,
}

#[derive(Serialize)]
struct SetRecord {
    tier: u8,
    n: usize,
    unique_followers: usize,
    eta: f64,
    mean_psi: f64,
    mean_chi: f64,
    mean_cac: Option<f64>,
    mean_cr: Option<f64>,
    excluded_trials: usize,
}

#[derive(Serialize)]
struct HistogramRecord {
    outdegree: usize,
    count: usize,
}

fn ingest(args: GraphArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let seed = args.seed.unwrap_or(0);
    let (graph, report) = args.graph.load(args.orientation, seed)?;
    let stats = graph.stats();
    let out_dir = prepare_out_dir(&args.out_dir)?;

    let stats_path = out_dir.join("graph_stats.json");
    let summary = serde_json::json!({ "stats": stats, "ingest": report });
    fs::write(&stats_path, serde_json::to_string_pretty(&summary)? + "\n")?;
    let histogram_path = out_dir.join("outdegree_histogram.csv");
    let histogram: Vec<HistogramRecord> = graph
        .outdegree_histogram()
        .into_iter()
        .map(|(outdegree, count)| HistogramRecord { outdegree, count })
        .collect();
    write_csv(&histogram_path, &histogram)?;

    println!("{}", serde_json::to_string(&stats)?);
    RunManifest {
        command: "ingest".into(),
        version: env!("CARGO_PKG_VERSION"),
        graph_source: args.graph.to_string(),
        orientation: args.orientation.to_string(),
        graph: stats,
        seed,
        jobs: 1,
        config: ScenarioConfig::default(),
        extra: serde_json::json!({ "ingest": report }),
        outputs: vec![stats_path, histogram_path],
        duration_secs: 0.0,
        started: Some(started),
    }
    .write(&out_dir)?;
    Ok(())
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let mut rng = stream(args.seed, &[domain::GRAPH_WEIGHTS]);
    let graph = generate_small_world(args.n, args.k, args.p, args.lattice_orientation, &mut rng)?;
    let out_dir = prepare_out_dir(&args.out_dir)?;
    let path = out_dir.join("edges.txt");
    let mut out = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(
        out,
        "# Watts-Strogatz n={} k={} p={} {} seed={}; \"x y\" means y follows x",
        args.n, args.k, args.p, args.lattice_orientation, args.seed
    )?;
    for (x, y, _) in graph.edges() {
        writeln!(out, "{x} {y}")?;
    }
    out.flush()?;

    let source = GraphSource::SmallWorld {
        n: args.n,
        k: args.k,
        p: args.p,
        orientation: args.lattice_orientation,
    };
    println!("{}", serde_json::to_string(&graph.stats())?);
    RunManifest {
        command: "generate".into(),
        version: env!("CARGO_PKG_VERSION"),
        graph_source: source.to_string(),
        orientation: Orientation::AsIs.to_string(),
        graph: graph.stats(),
        seed: args.seed,
        jobs: 1,
        config: ScenarioConfig::default(),
        extra: serde_json::Value::Null,
        outputs: vec![path],
        duration_secs: 0.0,
        started: Some(started),
    }
    .write(&out_dir)?;
    Ok(())
}

fn validate_individual(args: ScenarioArgs) -> anyhow::Result<()> {
    let mut run = Run::start("validate-individual", &args)?;
    let rows = run_individual_validation(&run.graph, &run.config, Parallelism(args.jobs))?;
    let records: Vec<IndividualRecord> = rows
        .iter()
        .map(|r| IndividualRecord {
            tier: r.tier.level(),
            influencer: run.graph.label(r.influencer),
            followers: r.followers,
            hiring_cost: r.hiring_cost,
            mean_psi: r.buyers.mean,
            var_psi: r.buyers.variance,
            mean_chi: r.reach.mean,
            var_chi: r.reach.variance,
        })
        .collect();
    for r in &records {
        println!("tier {} influencer {} followers {} buyers {:.2}", r.tier, r.influencer, r.followers, r.mean_psi);
    }
    run.csv("individual.csv", &records)?;
    run.finish()
}

fn validate_sets(args: SetArgs) -> anyhow::Result<()> {
    let mut run = Run::start("validate-sets", &args.scenario)?;
    let rows = run_set_validation(&run.graph, &run.config, args.target, args.tolerance, Parallelism(args.scenario.jobs))?;
    let records: Vec<SetRecord> = rows
        .iter()
        .map(|r| SetRecord {
            tier: r.set.tier.level(),
            n: r.set.size,
            unique_followers: r.set.unique_followers,
            eta: r.set.total_hiring_cost,
            mean_psi: r.aggregate.buyers.mean,
            mean_chi: r.aggregate.reach.mean,
            mean_cac: r.aggregate.cac.map(|m| m.mean),
            mean_cr: r.aggregate.conversion_ratio.map(|m| m.mean),
            excluded_trials: r.aggregate.cac_excluded,
        })
        .collect();
    for r in &records {
        println!("tier {} n {} followers {} cost {:.2} buyers {:.2}", r.tier, r.n, r.unique_followers, r.eta, r.mean_psi);
    }
    run.manifest.extra = serde_json::json!({ "target": args.target, "tolerance": args.tolerance });
    run.csv("sets.csv", &records)?;
    run.finish()
}

fn situational(args: ScenarioArgs) -> anyhow::Result<()> {
    let mut run = Run::start("situational", &args)?;
    let report = run_situational(&run.graph, &run.config, Parallelism(args.jobs))?;
    let skipped: Vec<_> = report
        .tiers
        .iter()
        .filter_map(|t| {
            let reason = t.skipped.as_ref()?;
            log::warn!("tier {} skipped: {reason}", t.tier);
            Some(serde_json::json!({ "tier": t.tier, "reason": reason }))
        })
        .collect();
    let rows = report.rows();
    for r in &rows {
        println!(
            "tier {} n {} cost {:.2} buyers {:.2} cac {} cr {}",
            r.tier,
            r.n,
            r.eta,
            r.mean_psi,
            fmt_opt(r.mean_cac),
            fmt_opt(r.mean_cr)
        );
    }
    let path = run.out_dir.join("situational.csv");
    write_metrics_csv(&rows, File::create(&path).with_context(|| format!("creating {}", path.display()))?)?;
    run.manifest.outputs.push(path);
    run.manifest.extra = serde_json::json!({ "skipped_tiers": skipped });
    run.finish()
}

fn sweep(args: SweepArgs) -> anyhow::Result<()> {
    let mut run = Run::start("sweep", &args.scenario)?;
    let (mu_axis, omega_axis) = (uniform_axis(args.mu_steps), uniform_axis(args.omega_steps));
    let grid = run_sweep(&run.graph, &run.config, &mu_axis, &omega_axis, Parallelism(args.scenario.jobs))?;
    let count = |s: CellStatus| grid.iter().filter(|c| c.status == s).count();
    let statuses = serde_json::json!({
        "ok": count(CellStatus::Ok),
        "no-customers-tier1": count(CellStatus::NoCustomersTier1),
        "no-customers-tier6": count(CellStatus::NoCustomersTier6),
        "both": count(CellStatus::Both),
    });
    println!("{statuses}");
    let path = run.out_dir.join("sweep.csv");
    grid.write_csv(File::create(&path).with_context(|| format!("creating {}", path.display()))?)?;
    run.manifest.outputs.push(path);
    run.manifest.extra = serde_json::json!({
        "mu_axis": mu_axis,
        "omega_axis": omega_axis,
        "cell_status": statuses,
    });
    run.finish()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.4}"))
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Ingest(a) => ingest(a),
        Command::Generate(a) => generate(a),
        Command::ValidateIndividual(a) => validate_individual(a),
        Command::ValidateSets(a) => validate_sets(a),
        Command::Situational(a) => situational(a),
        Command::Sweep(a) => sweep(a),
    }
}
