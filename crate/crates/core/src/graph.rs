//! Weighted directed follower graph.
//!
//! An edge `x -> y` means that `y` follows `x`; its weight is the probability
//! that `x` persuades `y`. The graph is stored in compressed sparse row form:
//! the followers of `x` occupy `offsets[x]..offsets[x + 1]` of the target and
//! weight arrays, sorted by follower id.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense vertex index in `0..vertex_count`.
pub type VertexId = usize;

/// How the two columns of an edge-list line map onto influence edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `a b` becomes the edge `a -> b` (b follows a).
    #[default]
    AsIs,
    /// `a b` becomes the edge `b -> a`; use this for files where `a b` means
    /// "a follows b".
    Reversed,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::AsIs => "as-is",
            Orientation::Reversed => "reversed",
        })
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-is" => Ok(Orientation::AsIs),
            "reversed" => Ok(Orientation::Reversed),
            other => Err(Error::InvalidParameter(format!(
                "unknown orientation {other:?} (expected as-is or reversed)"
            ))),
        }
    }
}

/// How undirected Watts–Strogatz edges become directed influence edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmallWorldOrientation {
    /// Each undirected edge yields both directed edges.
    #[default]
    BothDirections,
    /// Each undirected edge yields one directed edge, direction by fair coin.
    RandomSingle,
}

impl fmt::Display for SmallWorldOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmallWorldOrientation::BothDirections => "both-directions",
            SmallWorldOrientation::RandomSingle => "random-single",
        })
    }
}

impl FromStr for SmallWorldOrientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both-directions" | "both" => Ok(SmallWorldOrientation::BothDirections),
            "random-single" | "single" => Ok(SmallWorldOrientation::RandomSingle),
            other => Err(Error::InvalidParameter(format!(
                "unknown small-world orientation {other:?} (expected both-directions or random-single)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub max_outdegree: usize,
}

/// Bookkeeping from edge-list ingestion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub edge_lines: usize,
    pub self_loops_skipped: usize,
    pub duplicates_collapsed: usize,
}

#[derive(Debug, Clone)]
pub struct SocialGraph {
    offsets: Vec<usize>,
    followers: Vec<u32>,
    weights: Vec<f64>,
    max_outdegree: usize,
    /// Original ids from an edge-list file, indexed by dense vertex id.
    labels: Option<Vec<u64>>,
}

impl SocialGraph {
    /// Builds a graph from explicitly weighted edges. Self-loops, duplicates,
    /// out-of-range endpoints and weights outside `[0, 1]` are rejected.
    pub fn from_weighted_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, f64)>,
    ) -> Result<Self> {
        let mut edges: Vec<(u32, u32, f64)> = edges
            .into_iter()
            .map(|(x, y, w)| {
                if x >= vertex_count {
                    return Err(Error::InvalidVertex(x));
                }
                if y >= vertex_count {
                    return Err(Error::InvalidVertex(y));
                }
                if x == y {
                    return Err(Error::InvalidParameter(format!("self-loop on vertex {x}")));
                }
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidParameter(format!(
                        "weight {w} on edge {x}->{y} is outside [0, 1]"
                    )));
                }
                Ok((x as u32, y as u32, w))
            })
            .collect::<Result<_>>()?;
        edges.sort_unstable_by_key(|&(x, y, _)| (x, y));
        if let Some(pair) = edges.windows(2).find(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1)) {
            return Err(Error::InvalidParameter(format!(
                "duplicate edge {}->{}",
                pair[0].0, pair[0].1
            )));
        }
        let pairs: Vec<(u32, u32)> = edges.iter().map(|&(x, y, _)| (x, y)).collect();
        let weights = edges.into_iter().map(|(_, _, w)| w).collect();
        Ok(Self::from_sorted_pairs(vertex_count, &pairs, weights, None))
    }

    /// Builds a graph from unweighted pairs, collapsing duplicates and assigning
    /// each surviving edge a weight drawn from `U[0, 1)` in (source, follower)
    /// order. Returns the graph and the number of duplicates collapsed.
    pub fn from_edges<R: Rng + ?Sized>(
        vertex_count: usize,
        mut pairs: Vec<(u32, u32)>,
        rng: &mut R,
    ) -> Result<(Self, usize)> {
        if let Some(&(x, y)) = pairs
            .iter()
            .find(|&&(x, y)| x as usize >= vertex_count || y as usize >= vertex_count)
        {
            return Err(Error::InvalidVertex(x.max(y) as usize));
        }
        if let Some(&(x, _)) = pairs.iter().find(|&&(x, y)| x == y) {
            return Err(Error::InvalidParameter(format!("self-loop on vertex {x}")));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        let duplicates = before - pairs.len();
        let weights = (0..pairs.len()).map(|_| rng.random::<f64>()).collect();
        Ok((Self::from_sorted_pairs(vertex_count, &pairs, weights, None), duplicates))
    }

    fn from_sorted_pairs(
        vertex_count: usize,
        pairs: &[(u32, u32)],
        weights: Vec<f64>,
        labels: Option<Vec<u64>>,
    ) -> Self {
        debug_assert_eq!(pairs.len(), weights.len());
        let mut offsets = vec![0usize; vertex_count + 1];
        for &(x, _) in pairs {
            offsets[x as usize + 1] += 1;
        }
        for v in 0..vertex_count {
            offsets[v + 1] += offsets[v];
        }
        let followers = pairs.iter().map(|&(_, y)| y).collect();
        let max_outdegree = offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        SocialGraph {
            offsets,
            followers,
            weights,
            max_outdegree,
            labels,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.followers.len()
    }

    pub fn max_outdegree(&self) -> usize {
        self.max_outdegree
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.vertex_count()
    }

    /// Number of followers of `v`.
    pub fn outdegree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Indices of the edges leaving `v` in the global edge arrays.
    pub fn edge_range(&self, v: VertexId) -> Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn followers(&self, v: VertexId) -> &[u32] {
        &self.followers[self.edge_range(v)]
    }

    pub fn follower_weights(&self, v: VertexId) -> &[f64] {
        &self.weights[self.edge_range(v)]
    }

    /// Follower of edge `e`.
    pub fn edge_target(&self, e: usize) -> VertexId {
        self.followers[e] as usize
    }

    /// Base weight of edge `e`.
    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the edge `x -> y`, if present.
    pub fn find_edge(&self, x: VertexId, y: VertexId) -> Option<usize> {
        let range = self.edge_range(x);
        self.followers[range.clone()]
            .binary_search(&(y as u32))
            .ok()
            .map(|i| range.start + i)
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        (0..self.vertex_count()).flat_map(move |x| {
            self.edge_range(x)
                .map(move |e| (x, self.followers[e] as usize, self.weights[e]))
        })
    }

    /// Original id of `v` when the graph came from a file, else `v` itself.
    pub fn label(&self, v: VertexId) -> u64 {
        self.labels.as_ref().map_or(v as u64, |l| l[v])
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.vertex_count()];
        for &y in &self.followers {
            deg[y as usize] += 1;
        }
        deg
    }

    /// Outdegree → number of vertices with that outdegree.
    pub fn outdegree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for v in 0..self.vertex_count() {
            *hist.entry(self.outdegree(v)).or_insert(0) += 1;
        }
        hist
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            vertex_count: self.vertex_count(),
            edge_count: self.edge_count(),
            max_outdegree: self.max_outdegree,
        }
    }

    /// Same topology with all edges reversed; weights travel with their edge.
    pub fn reversed(&self) -> SocialGraph {
        let mut edges: Vec<(u32, u32, f64)> =
            self.edges().map(|(x, y, w)| (y as u32, x as u32, w)).collect();
        edges.sort_unstable_by_key(|&(x, y, _)| (x, y));
        let pairs: Vec<(u32, u32)> = edges.iter().map(|&(x, y, _)| (x, y)).collect();
        let weights = edges.into_iter().map(|(_, _, w)| w).collect();
        Self::from_sorted_pairs(self.vertex_count(), &pairs, weights, self.labels.clone())
    }
}

/// Outdegree of `v` as a percentage of the graph's maximum outdegree.
pub fn normalized_outdegree(graph: &SocialGraph, v: VertexId) -> Result<f64> {
    if !graph.contains(v) {
        return Err(Error::InvalidVertex(v));
    }
    if graph.max_outdegree() == 0 {
        return Err(Error::DegenerateGraph);
    }
    Ok(100.0 * graph.outdegree(v) as f64 / graph.max_outdegree() as f64)
}

/// Loads a whitespace-separated edge list; see [`read_edge_list`].
pub fn load_edge_list<R: Rng + ?Sized>(
    path: impl AsRef<Path>,
    orientation: Orientation,
    rng: &mut R,
) -> Result<SocialGraph> {
    load_edge_list_with_report(path, orientation, rng).map(|(g, _)| g)
}

pub fn load_edge_list_with_report<R: Rng + ?Sized>(
    path: impl AsRef<Path>,
    orientation: Orientation,
    rng: &mut R,
) -> Result<(SocialGraph, IngestReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    read_edge_list(BufReader::new(file), orientation, rng).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_owned(),
            source,
        },
        other => other,
    })
}

/// Parses `src dst` integer pairs, one per line. Blank lines and lines starting
/// with `#` are ignored; self-loops are skipped and counted. Vertex ids are
/// remapped to dense indices in ascending order of the original ids.
pub fn read_edge_list<B: BufRead, R: Rng + ?Sized>(
    reader: B,
    orientation: Orientation,
    rng: &mut R,
) -> Result<(SocialGraph, IngestReport)> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut report = IngestReport::default();
    let mut ids: Vec<u64> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: Default::default(),
            source,
        })?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::MalformedLine {
                    line: line_no,
                    message: format!("expected two vertex ids, got {trimmed:?}"),
                })
            }
        };
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| Error::MalformedLine {
                line: line_no,
                message: format!("invalid vertex id {tok:?}"),
            })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        report.edge_lines += 1;
        ids.push(a);
        ids.push(b);
        if a == b {
            report.self_loops_skipped += 1;
            continue;
        }
        raw.push(match orientation {
            Orientation::AsIs => (a, b),
            Orientation::Reversed => (b, a),
        });
    }

    if raw.is_empty() {
        return Err(Error::NoEdges);
    }
    if report.self_loops_skipped > 0 {
        warn!("skipped {} self-loop lines", report.self_loops_skipped);
    }

    ids.sort_unstable();
    ids.dedup();
    if ids.len() > u32::MAX as usize {
        return Err(Error::InvalidParameter("too many vertices".into()));
    }
    let index = |id: u64| ids.binary_search(&id).expect("id was collected") as u32;
    let pairs: Vec<(u32, u32)> = raw.into_iter().map(|(a, b)| (index(a), index(b))).collect();

    let (mut graph, duplicates) = SocialGraph::from_edges(ids.len(), pairs, rng)?;
    report.duplicates_collapsed = duplicates;
    graph.labels = Some(ids);
    Ok((graph, report))
}

/// Watts–Strogatz small-world graph: a ring lattice where each vertex links to
/// its `k / 2` nearest neighbours on either side, after which every lattice
/// edge `(u, u + j)` is rewired with probability `p_rewire` to `(u, w)` for a
/// uniformly random `w` that keeps the graph simple. The undirected result is
/// directed according to `orientation`, then weights are drawn from `U[0, 1)`.
pub fn generate_small_world<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    p_rewire: f64,
    orientation: SmallWorldOrientation,
    rng: &mut R,
) -> Result<SocialGraph> {
    let mut problems = Vec::new();
    if k < 2 {
        problems.push(format!("k must be at least 2, got {k}"));
    }
    if !k.is_multiple_of(2) {
        problems.push(format!("k must be even, got {k}"));
    }
    if n <= k {
        problems.push(format!("n must exceed k, got n={n} k={k}"));
    }
    if !(0.0..=1.0).contains(&p_rewire) {
        problems.push(format!("p_rewire must lie in [0, 1], got {p_rewire}"));
    }
    if n > u32::MAX as usize {
        problems.push(format!("n={n} exceeds the supported vertex count"));
    }
    if !problems.is_empty() {
        return Err(Error::InvalidParameter(problems.join("; ")));
    }

    let key = |a: usize, b: usize| -> u64 {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        ((lo as u64) << 32) | hi as u64
    };
    let half = k / 2;
    let mut undirected: HashSet<u64> = HashSet::with_capacity(n * half);
    let mut degree = vec![k; n];
    for j in 1..=half {
        for u in 0..n {
            undirected.insert(key(u, (u + j) % n));
        }
    }

    if p_rewire > 0.0 {
        for j in 1..=half {
            for u in 0..n {
                if rng.random::<f64>() >= p_rewire {
                    continue;
                }
                let v = (u + j) % n;
                if degree[u] >= n - 1 {
                    continue;
                }
                let w = loop {
                    let w = rng.random_range(0..n);
                    if w != u && !undirected.contains(&key(u, w)) {
                        break w;
                    }
                };
                undirected.remove(&key(u, v));
                undirected.insert(key(u, w));
                degree[v] -= 1;
                degree[w] += 1;
            }
        }
    }

    let mut undirected: Vec<u64> = undirected.into_iter().collect();
    undirected.sort_unstable();
    let split = |e: u64| ((e >> 32) as u32, e as u32);
    let pairs: Vec<(u32, u32)> = match orientation {
        SmallWorldOrientation::BothDirections => undirected
            .into_iter()
            .flat_map(|e| {
                let (a, b) = split(e);
                [(a, b), (b, a)]
            })
            .collect(),
        SmallWorldOrientation::RandomSingle => undirected
            .into_iter()
            .map(|e| {
                let (a, b) = split(e);
                if rng.random::<bool>() {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect(),
    };
    let (graph, duplicates) = SocialGraph::from_edges(n, pairs, rng)?;
    debug_assert_eq!(duplicates, 0);
    Ok(graph)
}
