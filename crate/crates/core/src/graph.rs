//! Raster state spaces.
//!
//! Nodes carry integer raster ids; the engine works on dense indices
//! `0..len()` assigned in ascending id order. Blocked rasters have no
//! effective adjacency: paths never enter or leave them.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type RasterId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("adjacency lists {from} -> {to} but not {to} -> {from}")]
    AsymmetricAdjacency { from: RasterId, to: RasterId },
    #[error("reference to unknown raster {0}")]
    UnknownNodeReference(RasterId),
    #[error("raster {0} is defined twice")]
    DuplicateNode(RasterId),
    #[error("raster {0} lists itself as a neighbor")]
    SelfLoop(RasterId),
    #[error("raster {0} is blocked and cannot start a path")]
    BlockedOrigin(RasterId),
    #[error("target set is empty")]
    EmptyTarget,
    #[error("no path from raster {from} to the target set")]
    Unreachable { from: RasterId },
    #[error("invalid lattice parameters: {0}")]
    InvalidLattice(String),
    #[error("adjacency key `{0}` is not a raster id")]
    BadKey(String),
}

impl GraphError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::AsymmetricAdjacency { .. } => "AsymmetricAdjacency",
            GraphError::UnknownNodeReference(_) => "UnknownNodeReference",
            GraphError::DuplicateNode(_) => "DuplicateNode",
            GraphError::SelfLoop(_) => "SelfLoop",
            GraphError::BlockedOrigin(_) => "BlockedOrigin",
            GraphError::EmptyTarget => "EmptyTarget",
            GraphError::Unreachable { .. } => "Unreachable",
            GraphError::InvalidLattice(_) => "InvalidLattice",
            GraphError::BadKey(_) => "BadKey",
        }
    }
}

/// Display metadata for a raster.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeLabel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeData {
    pub id: RasterId,
    #[serde(flatten)]
    pub label: NodeLabel,
}

/// Graph section of a scenario file. Adjacency may be given as undirected
/// `edges`, as per-node `adjacency` lists (which must be symmetric), or both.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphData {
    pub nodes: Vec<NodeData>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<[RasterId; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub adjacency: BTreeMap<String, Vec<RasterId>>,
    #[serde(default)]
    pub blocked: Vec<RasterId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterGraph {
    ids: Vec<RasterId>,
    index: HashMap<RasterId, usize>,
    adjacency: Vec<Vec<usize>>,
    blocked: Vec<bool>,
    labels: Vec<NodeLabel>,
}

impl RasterGraph {
    /// Builds a graph from undirected edges.
    pub fn from_edges(ids: &[RasterId], edges: &[(RasterId, RasterId)], blocked: &[RasterId]) -> Result<Self, GraphError> {
        let data = GraphData {
            nodes: ids.iter().map(|&id| NodeData { id, label: NodeLabel::default() }).collect(),
            edges: edges.iter().map(|&(a, b)| [a, b]).collect(),
            adjacency: BTreeMap::new(),
            blocked: blocked.to_vec(),
        };
        load_raster_graph(&data)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[RasterId] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> RasterId {
        self.ids[index]
    }

    pub fn index_of(&self, id: RasterId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn is_blocked(&self, index: usize) -> bool {
        self.blocked[index]
    }

    pub fn blocked_ids(&self) -> Vec<RasterId> {
        (0..self.len()).filter(|&i| self.blocked[i]).map(|i| self.ids[i]).collect()
    }

    pub fn label(&self, index: usize) -> &NodeLabel {
        &self.labels[index]
    }

    /// Neighbors usable by a path: empty for blocked nodes, blocked nodes filtered out otherwise.
    pub fn open_neighbors(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        let own = if self.blocked[index] { &[][..] } else { &self.adjacency[index][..] };
        own.iter().copied().filter(move |&m| !self.blocked[m])
    }

    /// Resolves raster ids to indices.
    pub fn indices(&self, ids: &[RasterId]) -> Result<Vec<usize>, GraphError> {
        ids.iter().map(|&id| self.index_of(id).ok_or(GraphError::UnknownNodeReference(id))).collect()
    }

    /// Hop distance from every node to the nearest member of `targets`
    /// (indices), avoiding blocked nodes. Blocked targets are at distance 0
    /// from themselves only.
    pub fn distances_to(&self, targets: &[usize]) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &t in targets {
            if dist[t].is_none() {
                dist[t] = Some(0);
                queue.push_back(t);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for v in self.open_neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Undirected edges as id pairs with the smaller id first.
    pub fn edges(&self) -> Vec<(RasterId, RasterId)> {
        let mut out = Vec::new();
        for (i, nb) in self.adjacency.iter().enumerate() {
            for &j in nb {
                if i < j {
                    out.push((self.ids[i], self.ids[j]));
                }
            }
        }
        out
    }
}

/// Validates graph data and builds the dense representation.
pub fn load_raster_graph(data: &GraphData) -> Result<RasterGraph, GraphError> {
    let mut ids: Vec<RasterId> = data.nodes.iter().map(|n| n.id).collect();
    ids.sort_unstable();
    for w in ids.windows(2) {
        if w[0] == w[1] {
            return Err(GraphError::DuplicateNode(w[0]));
        }
    }
    let index: HashMap<RasterId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let look = |id: RasterId| index.get(&id).copied().ok_or(GraphError::UnknownNodeReference(id));

    let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ids.len()];
    for &[a, b] in &data.edges {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        let (ia, ib) = (look(a)?, look(b)?);
        sets[ia].insert(ib);
        sets[ib].insert(ia);
    }
    let mut listed: BTreeMap<RasterId, BTreeSet<RasterId>> = BTreeMap::new();
    for (key, nbs) in &data.adjacency {
        let from: RasterId = key.trim().parse().map_err(|_| GraphError::BadKey(key.clone()))?;
        look(from)?;
        for &to in nbs {
            if to == from {
                return Err(GraphError::SelfLoop(from));
            }
            look(to)?;
            listed.entry(from).or_default().insert(to);
        }
    }
    for (&from, tos) in &listed {
        for &to in tos {
            if !listed.get(&to).is_some_and(|back| back.contains(&from)) {
                return Err(GraphError::AsymmetricAdjacency { from, to });
            }
            sets[look(from)?].insert(look(to)?);
        }
    }
    let mut blocked = vec![false; ids.len()];
    for &b in &data.blocked {
        blocked[look(b)?] = true;
    }
    let mut labels = vec![NodeLabel::default(); ids.len()];
    for n in &data.nodes {
        labels[index[&n.id]] = n.label.clone();
    }
    Ok(RasterGraph {
        ids,
        index,
        adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        blocked,
        labels,
    })
}

/// Minimum number of transitions from `from` to any raster in `to`, avoiding blocked rasters.
pub fn shortest_hops(graph: &RasterGraph, from: RasterId, to: &[RasterId]) -> Result<u32, GraphError> {
    if to.is_empty() {
        return Err(GraphError::EmptyTarget);
    }
    let fi = graph.index_of(from).ok_or(GraphError::UnknownNodeReference(from))?;
    if graph.is_blocked(fi) {
        return Err(GraphError::BlockedOrigin(from));
    }
    let targets = graph.indices(to)?;
    graph.distances_to(&targets)[fi].ok_or(GraphError::Unreachable { from })
}

/// Parameters of a generated triangular lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub rows: usize,
    pub cols: usize,
    /// Triangle side in nautical miles.
    pub side_length: f64,
    pub period_hours: f64,
    pub speed_knots: f64,
}

impl LatticeSpec {
    /// Side sized to two periods of travel at the given speed.
    pub fn sized_for_speed(rows: usize, cols: usize, speed_knots: f64, period_hours: f64) -> Self {
        Self { rows, cols, side_length: speed_knots * period_hours * 2.0, period_hours, speed_knots }
    }

    pub fn is_speed_consistent(&self) -> bool {
        (self.side_length - self.speed_knots * self.period_hours * 2.0).abs() <= 1e-9 * self.side_length.max(1.0)
    }

    /// Raster id of the triangle at (row, col).
    pub fn id_at(&self, row: usize, col: usize) -> RasterId {
        (row * self.cols + col + 1) as RasterId
    }

    /// Whether the triangle at (row, col) has its apex up (horizontal edge below).
    pub fn points_up(row: usize, col: usize) -> bool {
        (row + col) % 2 == 0
    }
}

/// Triangular lattice numbered row-major from 1, orientation alternating along
/// rows and columns; two triangles are adjacent iff they share an edge.
pub fn generate_lattice(spec: &LatticeSpec, blocked: &[RasterId]) -> Result<RasterGraph, GraphError> {
    if spec.rows == 0 || spec.cols == 0 {
        return Err(GraphError::InvalidLattice("rows and cols must be at least 1".into()));
    }
    if !(spec.side_length > 0.0 && spec.period_hours > 0.0 && spec.speed_knots > 0.0) {
        return Err(GraphError::InvalidLattice("lengths, hours and speed must be positive".into()));
    }
    let mut nodes = Vec::with_capacity(spec.rows * spec.cols);
    let mut edges = Vec::new();
    let h = spec.side_length * 3f64.sqrt() / 2.0;
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            let up = LatticeSpec::points_up(r, c);
            // centroid in nautical miles from the lattice origin, stored for display
            let x = (c as f64 + 1.0) * spec.side_length / 2.0;
            let y = r as f64 * h + if up { 2.0 * h / 3.0 } else { h / 3.0 };
            nodes.push(NodeData {
                id: spec.id_at(r, c),
                label: NodeLabel { region: None, lat: Some(-y), lon: Some(x) },
            });
            if c + 1 < spec.cols {
                edges.push([spec.id_at(r, c), spec.id_at(r, c + 1)]);
            }
            if up && r + 1 < spec.rows {
                edges.push([spec.id_at(r, c), spec.id_at(r + 1, c)]);
            }
        }
    }
    load_raster_graph(&GraphData { nodes, edges, adjacency: BTreeMap::new(), blocked: blocked.to_vec() })
}
