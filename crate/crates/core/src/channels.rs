//! Graph-state channels between an input qubit `I` and an output qubit `O`.
//!
//! Node 0 is always `I` and the last node is always `O`. Channel qubits are
//! labelled `1, 2, …` in the order listed below. Lattice layouts (layout
//! version [`LAYOUT_VERSION`]) for `rows × cols`, with labels running down
//! each column in turn:
//!
//! ```text
//!   square              triangular            hexagonal (brick wall)
//!      1 - 4 - 7           1 - 4 - 7             1 - 4 - 7
//!    / |   |   | \       / | \ | \ | \         / |       | \
//!   I- 2 - 5 - 8 -O     I- 2 - 5 - 8 -O       I- 2 - 5 - 8 -O
//!    \ |   |   | /       \ | \ | \ | /         \     |     /
//!      3 - 6 - 9           3 - 6 - 9             3 - 6 - 9
//! ```
//!
//! * square: nearest neighbours; `I` joins every node of the first column
//!   and `O` every node of the last column.
//! * triangular: square plus the diagonal `(r, c) – (r+1, c+1)`.
//! * hexagonal: all horizontal bonds; the vertical bond `(r, c) – (r+1, c)`
//!   exists iff `r + c` is even.
//! * crazy: `n` columns of `m` qubits, complete bipartite between adjacent
//!   columns, `I` and `O` joined to the whole first and last column.
//! * tree-to-tree: binary trees of the given depth rooted at `I` and at `O`
//!   whose leaves are joined pairwise (depth 2 gives 12 channel qubits).
//! * linear(n): a chain `I – 1 – … – (n−1) – O` with `n` edges.
//! * star(k): centre `1` with leaves `2..=k`, and `I`, `O` attached to the centre.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Result, SpfError};
use crate::pauli::{Letter, PauliOperator};
use crate::state::StabilizerState;

pub const LAYOUT_VERSION: u32 = 1;

pub const INPUT_LABEL: &str = "I";
pub const OUTPUT_LABEL: &str = "O";

/// Undirected graph over labelled nodes, with a layer index per node used to
/// order construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    layers: Vec<usize>,
    adj: Vec<BitSet>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(labels: Vec<String>, layers: Vec<usize>) -> Self {
        let n = labels.len();
        Graph { labels, layers, adj: vec![BitSet::new(); n], edges: Vec::new() }
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn layer(&self, v: usize) -> usize {
        self.layers[v]
    }

    pub fn neighbours(&self, v: usize) -> &BitSet {
        &self.adj[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.num_nodes();
        if u >= n || v >= n {
            return Err(SpfError::InvalidChannel(format!("edge ({u}, {v}) outside {n} nodes")));
        }
        if u == v {
            return Err(SpfError::InvalidChannel(format!("self-loop on {}", self.labels[u])));
        }
        if self.has_edge(u, v) {
            return Err(SpfError::InvalidChannel(format!(
                "duplicate edge {}-{}",
                self.labels[u], self.labels[v]
            )));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.edges.push((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn input(&self) -> usize {
        0
    }

    pub fn output(&self) -> usize {
        self.num_nodes() - 1
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_nodes();
        if n == 0 {
            return true;
        }
        let mut seen = BitSet::singleton(0);
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for w in self.adj[v].iter() {
                if !seen.contains(w) {
                    seen.insert(w);
                    queue.push_back(w);
                }
            }
        }
        seen.len() == n
    }

    /// Channel qubits, i.e. every node except `I` and `O`.
    pub fn channel_qubits(&self) -> BitSet {
        (1..self.num_nodes().saturating_sub(1)).collect()
    }

    /// Edges in construction order: layer by layer, bonds inside a layer
    /// before bonds reaching back to earlier layers.
    pub fn construction_order(&self) -> Vec<(usize, usize)> {
        let mut order = self.edges.clone();
        order.sort_by_key(|&(u, v)| {
            let (lu, lv) = (self.layers[u], self.layers[v]);
            (lu.max(lv), lu != lv, u, v)
        });
        order
    }

    /// Recomputes layers as breadth-first distance from `I`.
    fn layer_by_distance(&mut self) {
        let n = self.num_nodes();
        let mut dist = vec![usize::MAX; n];
        dist[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for w in self.adj[v].iter() {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        let far = dist.iter().filter(|&&d| d != usize::MAX).max().copied().unwrap_or(0);
        self.layers = dist.into_iter().map(|d| if d == usize::MAX { far + 1 } else { d }).collect();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    Square { rows: usize, cols: usize },
    Triangular { rows: usize, cols: usize },
    Hexagonal { rows: usize, cols: usize },
    /// `columns` layers of `per_column` qubits.
    Crazy { columns: usize, per_column: usize },
    TreeToTree { depth: usize },
    Linear { edges: usize },
    Star { leaves: usize },
    /// Free-form graph; node labels must include `I` and `O`.
    Custom { nodes: Vec<String>, edges: Vec<(String, String)> },
    /// Random connected graph on `nodes` vertices (including `I`, `O`) with
    /// `edges` edges and no `I`–`O` edge.
    RandomGnm { nodes: usize, edges: usize, seed: u64 },
}

impl ChannelSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ChannelSpec::Square { .. } => "square",
            ChannelSpec::Triangular { .. } => "triangular",
            ChannelSpec::Hexagonal { .. } => "hexagonal",
            ChannelSpec::Crazy { .. } => "crazy",
            ChannelSpec::TreeToTree { .. } => "tree_to_tree",
            ChannelSpec::Linear { .. } => "linear",
            ChannelSpec::Star { .. } => "star",
            ChannelSpec::Custom { .. } => "custom",
            ChannelSpec::RandomGnm { .. } => "random_gnm",
        }
    }

    pub fn dims(&self) -> Vec<u64> {
        match self {
            ChannelSpec::Square { rows, cols }
            | ChannelSpec::Triangular { rows, cols }
            | ChannelSpec::Hexagonal { rows, cols } => vec![*rows as u64, *cols as u64],
            ChannelSpec::Crazy { columns, per_column } => vec![*columns as u64, *per_column as u64],
            ChannelSpec::TreeToTree { depth } => vec![*depth as u64],
            ChannelSpec::Linear { edges } => vec![*edges as u64],
            ChannelSpec::Star { leaves } => vec![*leaves as u64],
            ChannelSpec::Custom { nodes, edges } => vec![nodes.len() as u64, edges.len() as u64],
            ChannelSpec::RandomGnm { nodes, edges, seed } => vec![*nodes as u64, *edges as u64, *seed],
        }
    }

    /// Dimensions joined with `x`, e.g. `4x4`.
    pub fn dims_string(&self) -> String {
        self.dims().iter().map(u64::to_string).collect::<Vec<_>>().join("x")
    }

    /// Builds a spec from a kind name and its integer dimensions.
    pub fn from_kind(kind: &str, dims: &[usize], seed: u64) -> Result<Self> {
        let need = |k: usize| {
            if dims.len() == k {
                Ok(())
            } else {
                Err(SpfError::InvalidChannel(format!("{kind} takes {k} dimension(s), got {}", dims.len())))
            }
        };
        let spec = match kind {
            "square" | "triangular" | "hexagonal" => {
                // a single size means a square k×k lattice
                let (rows, cols) = match dims {
                    [k] => (*k, *k),
                    [r, c] => (*r, *c),
                    _ => return Err(SpfError::InvalidChannel(format!("{kind} takes 1 or 2 dimensions"))),
                };
                match kind {
                    "square" => ChannelSpec::Square { rows, cols },
                    "triangular" => ChannelSpec::Triangular { rows, cols },
                    _ => ChannelSpec::Hexagonal { rows, cols },
                }
            }
            "crazy" => {
                need(2)?;
                ChannelSpec::Crazy { columns: dims[0], per_column: dims[1] }
            }
            "tree_to_tree" | "tree-to-tree" | "tree" => match dims {
                [] => ChannelSpec::TreeToTree { depth: 2 },
                [d] => ChannelSpec::TreeToTree { depth: *d },
                _ => return Err(SpfError::InvalidChannel("tree_to_tree takes at most 1 dimension".into())),
            },
            "linear" => {
                need(1)?;
                ChannelSpec::Linear { edges: dims[0] }
            }
            "star" => {
                need(1)?;
                ChannelSpec::Star { leaves: dims[0] }
            }
            "random_gnm" | "random" => {
                need(2)?;
                ChannelSpec::RandomGnm { nodes: dims[0], edges: dims[1], seed }
            }
            other => return Err(SpfError::InvalidChannel(format!("unknown channel kind `{other}`"))),
        };
        Ok(spec)
    }

    /// Three disjoint chains of the worked example: `I – 1 – 4 – 7 – O` and
    /// its two siblings through `2, 5, 8` and `3, 6, 9`.
    pub fn parallel_chains(rows: usize, cols: usize) -> Self {
        let label = |r: usize, c: usize| (c * rows + r + 1).to_string();
        let mut nodes = vec![INPUT_LABEL.to_string()];
        for c in 0..cols {
            for r in 0..rows {
                nodes.push(label(r, c));
            }
        }
        nodes.push(OUTPUT_LABEL.to_string());
        let mut edges = Vec::new();
        for r in 0..rows {
            edges.push((INPUT_LABEL.to_string(), label(r, 0)));
            for c in 1..cols {
                edges.push((label(r, c - 1), label(r, c)));
            }
            edges.push((label(r, cols - 1), OUTPUT_LABEL.to_string()));
        }
        ChannelSpec::Custom { nodes, edges }
    }

    pub fn graph(&self) -> Result<Graph> {
        match self {
            ChannelSpec::Square { rows, cols } => lattice(*rows, *cols, LatticeKind::Square),
            ChannelSpec::Triangular { rows, cols } => lattice(*rows, *cols, LatticeKind::Triangular),
            ChannelSpec::Hexagonal { rows, cols } => lattice(*rows, *cols, LatticeKind::Hexagonal),
            ChannelSpec::Crazy { columns, per_column } => crazy(*columns, *per_column),
            ChannelSpec::TreeToTree { depth } => tree_to_tree(*depth),
            ChannelSpec::Linear { edges } => linear(*edges),
            ChannelSpec::Star { leaves } => star(*leaves),
            ChannelSpec::Custom { nodes, edges } => custom(nodes, edges),
            ChannelSpec::RandomGnm { nodes, edges, seed } => random_gnm(*nodes, *edges, *seed),
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind_name(), self.dims_string())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum LatticeKind {
    Square,
    Triangular,
    Hexagonal,
}

fn labelled(channel: usize) -> Vec<String> {
    let mut labels = vec![INPUT_LABEL.to_string()];
    labels.extend((1..=channel).map(|i| i.to_string()));
    labels.push(OUTPUT_LABEL.to_string());
    labels
}

fn positive(dims: &[usize]) -> Result<()> {
    if dims.contains(&0) {
        Err(SpfError::InvalidChannel("dimensions must be positive".into()))
    } else {
        Ok(())
    }
}

fn lattice(rows: usize, cols: usize, kind: LatticeKind) -> Result<Graph> {
    positive(&[rows, cols])?;
    let node = |r: usize, c: usize| c * rows + r + 1;
    let out = rows * cols + 1;
    let mut layers = vec![0];
    for c in 0..cols {
        layers.extend(std::iter::repeat_n(c + 1, rows));
    }
    layers.push(cols + 1);
    let mut g = Graph::new(labelled(rows * cols), layers);
    for c in 0..cols {
        for r in 0..rows {
            let vertical = match kind {
                LatticeKind::Square | LatticeKind::Triangular => true,
                LatticeKind::Hexagonal => (r + c) % 2 == 0,
            };
            if r + 1 < rows && vertical {
                g.add_edge(node(r, c), node(r + 1, c))?;
            }
            if c + 1 < cols {
                g.add_edge(node(r, c), node(r, c + 1))?;
                if kind == LatticeKind::Triangular && r + 1 < rows {
                    g.add_edge(node(r, c), node(r + 1, c + 1))?;
                }
            }
        }
    }
    for r in 0..rows {
        g.add_edge(0, node(r, 0))?;
        g.add_edge(node(r, cols - 1), out)?;
    }
    Ok(g)
}

fn crazy(columns: usize, per_column: usize) -> Result<Graph> {
    positive(&[columns, per_column])?;
    let node = |c: usize, r: usize| c * per_column + r + 1;
    let out = columns * per_column + 1;
    let mut layers = vec![0];
    for c in 0..columns {
        layers.extend(std::iter::repeat_n(c + 1, per_column));
    }
    layers.push(columns + 1);
    let mut g = Graph::new(labelled(columns * per_column), layers);
    for r in 0..per_column {
        g.add_edge(0, node(0, r))?;
        g.add_edge(node(columns - 1, r), out)?;
    }
    for c in 1..columns {
        for a in 0..per_column {
            for b in 0..per_column {
                g.add_edge(node(c - 1, a), node(c, b))?;
            }
        }
    }
    Ok(g)
}

fn tree_to_tree(depth: usize) -> Result<Graph> {
    positive(&[depth])?;
    // per tree: 2 + 4 + … + 2^depth nodes
    let per_tree = (1usize << (depth + 1)) - 2;
    let channel = 2 * per_tree;
    let out = channel + 1;
    let mut layers = vec![0; channel + 2];
    layers[out] = 2 * depth + 1;
    let mut g = Graph::new(labelled(channel), layers);
    // input tree occupies 1..=per_tree breadth-first, output tree the rest
    let build = |root: usize, offset: usize, mirrored: bool, g: &mut Graph| -> Result<Vec<usize>> {
        let mut level = vec![root];
        let mut next_id = offset;
        for d in 1..=depth {
            let mut children = Vec::new();
            for &parent in &level {
                for _ in 0..2 {
                    let child = next_id;
                    next_id += 1;
                    g.layers[child] = if mirrored { 2 * depth + 1 - d } else { d };
                    g.add_edge(parent, child)?;
                    children.push(child);
                }
            }
            level = children;
        }
        Ok(level)
    };
    let left = build(0, 1, false, &mut g)?;
    let right = build(out, per_tree + 1, true, &mut g)?;
    for (a, b) in left.into_iter().zip(right) {
        g.add_edge(a, b)?;
    }
    Ok(g)
}

fn linear(edges: usize) -> Result<Graph> {
    positive(&[edges])?;
    let layers = (0..=edges).collect();
    let mut g = Graph::new(labelled(edges - 1), layers);
    for v in 0..edges {
        g.add_edge(v, v + 1)?;
    }
    Ok(g)
}

fn star(leaves: usize) -> Result<Graph> {
    positive(&[leaves])?;
    let out = leaves + 1;
    let mut layers = vec![2; leaves + 2];
    layers[0] = 0;
    layers[1] = 1;
    layers[out] = 2;
    let mut g = Graph::new(labelled(leaves), layers);
    g.add_edge(0, 1)?;
    for leaf in 2..=leaves {
        g.add_edge(1, leaf)?;
    }
    g.add_edge(1, out)?;
    Ok(g)
}

fn custom(nodes: &[String], edges: &[(String, String)]) -> Result<Graph> {
    let mut order: Vec<String> = vec![INPUT_LABEL.to_string()];
    order.extend(nodes.iter().filter(|l| *l != INPUT_LABEL && *l != OUTPUT_LABEL).cloned());
    order.push(OUTPUT_LABEL.to_string());
    for required in [INPUT_LABEL, OUTPUT_LABEL] {
        if !nodes.iter().any(|l| l == required) {
            return Err(SpfError::InvalidChannel(format!("custom graph lacks node `{required}`")));
        }
    }
    let mut index = FxHashMap::default();
    for (i, l) in order.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(SpfError::InvalidChannel(format!("duplicate node `{l}`")));
        }
    }
    let n = order.len();
    let mut g = Graph::new(order, vec![0; n]);
    for (a, b) in edges {
        let lookup = |l: &String| {
            index.get(l).copied().ok_or_else(|| SpfError::InvalidChannel(format!("edge names unknown node `{l}`")))
        };
        g.add_edge(lookup(a)?, lookup(b)?)?;
    }
    g.layer_by_distance();
    Ok(g)
}

/// Random connected graph with `m` edges on `n` nodes and no `I`–`O` edge,
/// drawn by rejection sampling of uniform edge subsets.
pub fn random_gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    const MAX_ATTEMPTS: usize = 1_000_000;
    if n < 3 {
        return Err(SpfError::InvalidChannel("random graphs need at least 3 nodes".into()));
    }
    let max_edges = n * (n - 1) / 2 - 1;
    if m < n - 1 || m > max_edges {
        return Err(SpfError::InvalidChannel(format!("edge count {m} outside [{}, {max_edges}]", n - 1)));
    }
    let out = n - 1;
    let mut pool: Vec<(usize, usize)> = Vec::with_capacity(max_edges);
    for u in 0..n {
        for v in u + 1..n {
            if !(u == 0 && v == out) {
                pool.push((u, v));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        pool.shuffle(&mut rng);
        let mut chosen = pool[..m].to_vec();
        chosen.sort_unstable();
        let mut g = Graph::new(labelled(n - 2), vec![0; n]);
        for &(u, v) in &chosen {
            g.add_edge(u, v)?;
        }
        if g.is_connected() {
            g.layer_by_distance();
            return Ok(g);
        }
    }
    Err(SpfError::InvalidChannel("no connected sample found".into()))
}

/// Builds the graph state: `I` carries the logical qubit; every other node
/// starts in `|+⟩`; one CZ per edge in construction order.
pub fn build_state(graph: &Graph, max_combo_size: Option<usize>) -> Result<StabilizerState> {
    let mut state = StabilizerState::initialise();
    state.set_max_combo_size(max_combo_size);
    state.apply_h(0usize)?;
    for label in &graph.labels()[1..] {
        let q = state.add_qubit(label)?;
        state.apply_h(q)?;
    }
    for (u, v) in graph.construction_order() {
        state.apply_cz(u, v)?;
    }
    Ok(state)
}

/// A channel graph together with its tracked state.
#[derive(Clone, Debug)]
pub struct ChannelGraph {
    pub spec: ChannelSpec,
    pub graph: Graph,
    pub state: StabilizerState,
}

impl ChannelGraph {
    pub fn input(&self) -> usize {
        self.graph.input()
    }

    pub fn output(&self) -> usize {
        self.graph.output()
    }

    pub fn description(&self) -> ChannelDescription {
        ChannelDescription::new(&self.spec, &self.graph)
    }

    /// Checks `K_v = X_v ∏_{w ~ v} Z_w` for every generator slot.
    pub fn check_graph_state(&self) -> Result<()> {
        check_graph_generators(&self.graph, &self.state)
    }
}

pub fn check_graph_generators(graph: &Graph, state: &StabilizerState) -> Result<()> {
    let n = graph.num_nodes();
    for (slot, &v) in state.slot_qubits().iter().enumerate() {
        let mut expected = PauliOperator::single(n, v, Letter::X)?;
        for w in graph.neighbours(v).iter() {
            expected.set_letter(w, Letter::Z);
        }
        if state.generator(slot)? != &expected {
            return Err(SpfError::Internal(format!(
                "generator of {} is {} instead of {}",
                graph.labels()[v],
                state.generator(slot)?,
                expected
            )));
        }
    }
    Ok(())
}

pub fn build_channel(spec: &ChannelSpec) -> Result<ChannelGraph> {
    build_channel_with_cap(spec, None)
}

pub fn build_channel_with_cap(spec: &ChannelSpec, max_combo_size: Option<usize>) -> Result<ChannelGraph> {
    let graph = spec.graph()?;
    let state = build_state(&graph, max_combo_size)?;
    Ok(ChannelGraph { spec: spec.clone(), graph, state })
}

pub fn random_connected_graph(n: usize, m: usize, seed: u64) -> Result<ChannelGraph> {
    build_channel(&ChannelSpec::RandomGnm { nodes: n, edges: m, seed })
}

/// Serialisable channel description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelDescription {
    pub kind: String,
    pub dims: Vec<u64>,
    pub layout_version: u32,
    pub spec: ChannelSpec,
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl ChannelDescription {
    pub fn new(spec: &ChannelSpec, graph: &Graph) -> Self {
        let labels = graph.labels();
        ChannelDescription {
            kind: spec.kind_name().to_string(),
            dims: spec.dims(),
            layout_version: LAYOUT_VERSION,
            spec: spec.clone(),
            nodes: labels.to_vec(),
            edges: graph.edges().iter().map(|&(u, v)| (labels[u].clone(), labels[v].clone())).collect(),
        }
    }

    /// Rebuilds the graph from the stored node and edge lists.
    pub fn graph(&self) -> Result<Graph> {
        custom(&self.nodes, &self.edges).map(|mut g| {
            // keep the original layering when the spec can rebuild it
            if let Ok(orig) = self.spec.graph() {
                if orig.labels() == g.labels() {
                    g.layers = orig.layers;
                }
            }
            g
        })
    }
}
