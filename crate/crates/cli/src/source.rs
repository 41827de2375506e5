use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use infsim_core::graph::{generate_small_world, load_edge_list_with_report, IngestReport};
use infsim_core::rng::{domain, stream};
use infsim_core::{Orientation, SmallWorldOrientation, SocialGraph};

/// Where a graph comes from: an edge-list file or a generated small world,
/// written `ws:N:K:P[:orientation]`.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    SmallWorld {
        n: usize,
        k: usize,
        p: f64,
        orientation: SmallWorldOrientation,
    },
}

impl FromStr for GraphSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let Some(params) = s.strip_prefix("ws:") else {
            return Ok(GraphSource::File(PathBuf::from(s)));
        };
        let parts: Vec<&str> = params.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            bail!("expected ws:N:K:P[:orientation], got {s:?}");
        }
        Ok(GraphSource::SmallWorld {
            n: parts[0].parse().with_context(|| format!("bad vertex count in {s:?}"))?,
            k: parts[1].parse().with_context(|| format!("bad neighbour count in {s:?}"))?,
            p: parts[2].parse().with_context(|| format!("bad rewiring probability in {s:?}"))?,
            orientation: match parts.get(3) {
                Some(o) => o.parse()?,
                None => SmallWorldOrientation::default(),
            },
        })
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::File(path) => write!(f, "{}", path.display()),
            GraphSource::SmallWorld { n, k, p, orientation } => write!(f, "ws:{n}:{k}:{p}:{orientation}"),
        }
    }
}

impl GraphSource {
    /// Builds the graph. Edge weights (and rewiring, for generated graphs)
    /// come from a stream derived from `seed`.
    pub fn load(&self, orientation: Orientation, seed: u64) -> anyhow::Result<(SocialGraph, Option<IngestReport>)> {
        let mut rng = stream(seed, &[domain::GRAPH_WEIGHTS]);
        match self {
            GraphSource::File(path) => {
                let (graph, report) = load_edge_list_with_report(path, orientation, &mut rng)?;
                Ok((graph, Some(report)))
            }
            GraphSource::SmallWorld { n, k, p, orientation: o } => {
                let graph = generate_small_world(*n, *k, *p, *o, &mut rng)?;
                let graph = match orientation {
                    Orientation::AsIs => graph,
                    Orientation::Reversed => graph.reversed(),
                };
                Ok((graph, None))
            }
        }
    }
}
