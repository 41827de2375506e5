//! Agent-based simulation of influencer marketing campaigns.
//!
//! A campaign starts from a set of hired influencers and spreads breadth-first
//! over a weighted follower graph. Each exposed follower may buy the product
//! depending on its interest, the influence of the agent that reached it and
//! the hop distance from the seed set. Buyers then pass the campaign on to
//! their own followers.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: the immutable follower graph, edge-list ingestion and the
//!   Watts–Strogatz generator.
//! * [`population`]: per-agent attributes (interest, willingness, tier,
//!   engagement rate, hiring cost).
//! * [`campaign`]: the propagation itself.
//! * [`selection`]: building seed sets per influencer tier.
//! * [`metrics`]: customer acquisition cost, conversion ratio and trial
//!   aggregation.
//! * [`experiments`]: validation, situational and sweep experiment drivers.

pub mod campaign;
pub mod config;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod metrics;
pub mod population;
pub mod rng;
pub mod selection;

pub use campaign::{run_campaign, CampaignResult};
pub use config::{ScenarioConfig, WillingnessMode};
pub use error::{Error, Result};
pub use graph::{GraphStats, Orientation, SmallWorldOrientation, SocialGraph, VertexId};
pub use metrics::{AggregateMetrics, CampaignMetrics};
pub use population::{init_population, AgentState, Population, Tier};
pub use selection::{CandidateOrder, InfluencerSet};
