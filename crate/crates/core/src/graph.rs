//! Finite simple connected graphs and the structural decompositions used by
//! the certificate engine: tree test, pendant-tree contraction (2-core) and
//! block–cut decomposition.
//!
//! Vertices are 1-indexed throughout. Sub-structures (cores, blocks, pendant
//! trees) are [`Subgraph`]s that keep the original vertex labels.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed input `{content}`: {reason}")]
    Malformed {
        line: usize,
        content: String,
        reason: String,
    },
    #[error("missing header line `n <count>`")]
    MissingHeader,
    #[error("line {line}: duplicate header line")]
    DuplicateHeader { line: usize },
    #[error("vertex count must be positive")]
    EmptyGraph,
    #[error("edge {{{i},{j}}} has an endpoint outside [1, {n}]")]
    OutOfRange { i: usize, j: usize, n: usize },
    #[error("edge {{{i},{j}}} must satisfy i < j")]
    UnorderedEdge { i: usize, j: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{i},{j}}}")]
    DuplicateEdge { i: usize, j: usize },
    #[error("graph is disconnected: vertices {component:?} are unreachable from vertex 1")]
    Disconnected { component: Vec<usize> },
    #[error("invalid JSON graph: {0}")]
    Json(String),
}

/// A finite simple connected graph on vertices `1..=n`.
///
/// Edges are stored as ordered pairs `(i, j)` with `i < j`, sorted
/// lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        let edges = raw.edges.iter().map(|e| (e[0], e[1])).collect::<Vec<_>>();
        Graph::new(raw.n, edges).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

impl Graph {
    /// Builds and validates a graph. Rejects self-loops, duplicates,
    /// out-of-range indices, `i > j` pairs and disconnected inputs.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if i == 0 || j == 0 || i > n || j > n {
                return Err(GraphError::OutOfRange { i, j, n });
            }
            if i > j {
                return Err(GraphError::UnorderedEdge { i, j });
            }
            if !set.insert((i, j)) {
                return Err(GraphError::DuplicateEdge { i, j });
            }
        }
        let g = Graph {
            n,
            edges: set.into_iter().collect(),
        };
        let unreached = g.unreachable_from_first();
        if !unreached.is_empty() {
            return Err(GraphError::Disconnected { component: unreached });
        }
        Ok(g)
    }

    /// Builds a graph from unordered pairs, normalizing each to `i < j`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Graph::new(n, pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }

    /// Adjacency lists indexed by vertex (index 0 unused), neighbors sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(i, j)| i == v || j == v).count()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    pub fn to_subgraph(&self) -> Subgraph {
        Subgraph {
            vertices: (1..=self.n).collect(),
            edges: self.edges.clone(),
        }
    }

    /// The path 1–2–…–n.
    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i, i + 1))).expect("paths are connected")
    }

    /// The cycle 1–2–…–n–1 (n ≥ 3).
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycles need at least three vertices");
        let mut e: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        e.push((1, n));
        Graph::new(n, e).expect("cycles are connected")
    }

    pub fn complete(n: usize) -> Graph {
        let e = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)));
        Graph::new(n, e).expect("complete graphs are connected")
    }

    /// Star with center 1 and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        Graph::new(leaves + 1, (2..=leaves + 1).map(|j| (1, j))).expect("stars are connected")
    }

    fn unreachable_from_first(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n + 1];
        let mut queue = VecDeque::from([1]);
        seen[1] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        (1..=self.n).filter(|&v| !seen[v]).collect()
    }

    /// Breadth-first distances from `source` (index 0 unused).
    pub fn bfs_depths(&self, source: usize) -> Vec<usize> {
        let adj = self.adjacency();
        let mut depth = vec![usize::MAX; self.n + 1];
        depth[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        depth
    }

    /// BFS spanning tree from vertex 1: `parent[v]` for every `v ≠ 1`, in
    /// BFS visiting order.
    pub fn bfs_tree(&self) -> Vec<(usize, usize)> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n + 1];
        seen[1] = true;
        let mut queue = VecDeque::from([1]);
        let mut out = Vec::with_capacity(self.n.saturating_sub(1));
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    out.push((w, v));
                    queue.push_back(w);
                }
            }
        }
        out
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for (i, j) in &self.edges {
            writeln!(f, "e {i} {j}")?;
        }
        Ok(())
    }
}

/// Parses the line-oriented graph format or its JSON equivalent.
///
/// ```text
/// # triangle
/// n 3
/// e 1 2
/// e 1 3
/// e 2 3
/// ```
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str::<Graph>(text).map_err(|e| GraphError::Json(e.to_string()));
    }
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let malformed = |reason: &str| GraphError::Malformed {
            line,
            content: content.to_string(),
            reason: reason.to_string(),
        };
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("n") => {
                if n.is_some() {
                    return Err(GraphError::DuplicateHeader { line });
                }
                let count = tokens
                    .next()
                    .ok_or_else(|| malformed("expected `n <count>`"))?
                    .parse::<usize>()
                    .map_err(|_| malformed("vertex count is not a non-negative integer"))?;
                if tokens.next().is_some() {
                    return Err(malformed("trailing tokens after vertex count"));
                }
                n = Some(count);
            }
            Some("e") => {
                let mut ends = [0usize; 2];
                for slot in &mut ends {
                    *slot = tokens
                        .next()
                        .ok_or_else(|| malformed("expected `e <i> <j>`"))?
                        .parse::<usize>()
                        .map_err(|_| malformed("edge endpoint is not a non-negative integer"))?;
                }
                if tokens.next().is_some() {
                    return Err(malformed("trailing tokens after edge"));
                }
                edges.push((ends[0], ends[1]));
            }
            _ => return Err(malformed("lines must start with `n`, `e` or `#`")),
        }
    }
    let n = n.ok_or(GraphError::MissingHeader)?;
    Graph::new(n, edges)
}

/// A labelled subgraph: sorted vertex labels of some parent graph plus the
/// induced or chosen edges between them (pairs `(i, j)`, `i < j`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Subgraph {
    pub fn new(vertices: impl IntoIterator<Item = usize>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let vertices: BTreeSet<usize> = vertices.into_iter().collect();
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        Subgraph {
            vertices: vertices.into_iter().collect(),
            edges: edges.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Relabels to a [`Graph`] on `1..=len` in label order.
    pub fn to_graph(&self) -> Result<Graph, GraphError> {
        let index: BTreeMap<usize, usize> = self.vertices.iter().enumerate().map(|(k, &v)| (v, k + 1)).collect();
        Graph::new(self.vertices.len(), self.edges.iter().map(|(a, b)| (index[a], index[b])))
    }

    pub fn neighbors(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        adj
    }

    pub fn is_tree(&self) -> bool {
        !self.vertices.is_empty() && self.edges.len() + 1 == self.vertices.len() && self.is_connected()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.first() else {
            return true;
        };
        let adj = self.neighbors();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Whether this is the complete graph on exactly three vertices.
    pub fn is_triangle(&self) -> bool {
        self.vertices.len() == 3 && self.edges.len() == 3
    }
}

/// Tree test for a connected graph: `|E| = n − 1`.
pub fn is_tree(g: &Graph) -> bool {
    g.edge_count() + 1 == g.n()
}

/// Where a vertex ends up after pendant-tree contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Placement {
    Core,
    Pendant { root: usize },
    /// The whole graph is a tree and has no core.
    Tree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendantTree {
    pub root: usize,
    /// The tree including its root.
    pub tree: Subgraph,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionDecomposition {
    /// The 2-core; empty when the graph is a tree.
    pub core: Subgraph,
    pub pendant_forest: Vec<PendantTree>,
    pub vertex_map: BTreeMap<usize, Placement>,
    /// Set when the graph is itself a tree; the forest then holds the whole
    /// tree rooted at vertex 1 and must go through the tree theorem.
    pub is_tree: bool,
}

/// Iterated leaf removal. Every removed vertex is attributed to the unique
/// core vertex its removed component hangs from.
pub fn contract_pendant_trees(g: &Graph) -> ContractionDecomposition {
    let adj = g.adjacency();
    let mut degree: Vec<usize> = (0..=g.n()).map(|v| if v == 0 { 0 } else { adj[v].len() }).collect();
    let mut removed = vec![false; g.n() + 1];
    let mut queue: VecDeque<usize> = (1..=g.n()).filter(|&v| degree[v] <= 1).collect();
    while let Some(v) = queue.pop_front() {
        if removed[v] {
            continue;
        }
        removed[v] = true;
        for &w in &adj[v] {
            if !removed[w] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    queue.push_back(w);
                }
            }
        }
    }

    let core_vertices: Vec<usize> = (1..=g.n()).filter(|&v| !removed[v]).collect();
    if core_vertices.is_empty() {
        let vertex_map = g.vertices().map(|v| (v, Placement::Tree)).collect();
        return ContractionDecomposition {
            core: Subgraph::new([], []),
            pendant_forest: vec![PendantTree {
                root: 1,
                tree: g.to_subgraph(),
            }],
            vertex_map,
            is_tree: true,
        };
    }

    let core = Subgraph::new(
        core_vertices.iter().copied(),
        g.edges().iter().copied().filter(|&(a, b)| !removed[a] && !removed[b]),
    );
    let mut vertex_map: BTreeMap<usize, Placement> = core_vertices.iter().map(|&v| (v, Placement::Core)).collect();

    // Walk outward from every core vertex through removed vertices only.
    let mut forest = Vec::new();
    for &root in &core_vertices {
        let mut verts = vec![root];
        let mut edges = Vec::new();
        let mut queue = VecDeque::new();
        for &w in &adj[root] {
            if removed[w] {
                edges.push((root, w));
                verts.push(w);
                queue.push_back((w, root));
            }
        }
        while let Some((v, parent)) = queue.pop_front() {
            vertex_map.insert(v, Placement::Pendant { root });
            for &w in &adj[v] {
                if w != parent && removed[w] {
                    edges.push((v, w));
                    verts.push(w);
                    queue.push_back((w, v));
                }
            }
        }
        if !edges.is_empty() {
            forest.push(PendantTree {
                root,
                tree: Subgraph::new(verts, edges),
            });
        }
    }

    ContractionDecomposition {
        core,
        pendant_forest: forest,
        vertex_map,
        is_tree: false,
    }
}

/// Adjacency in the block tree: `child` hangs from `parent` at cut vertex `cut`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLink {
    pub parent: usize,
    pub child: usize,
    pub cut: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    /// Maximal 2-connected blocks and bridge edges, ordered by smallest vertex.
    pub blocks: Vec<Subgraph>,
    /// Tree over block indices rooted at block 0, in breadth-first order.
    pub block_tree: Vec<BlockLink>,
    pub cut_vertices: Vec<usize>,
}

/// Biconnected components via Hopcroft–Tarjan with an explicit edge stack.
/// Works on any connected [`Subgraph`]; see [`block_decomposition`].
pub fn block_decomposition_of(sub: &Subgraph) -> BlockDecomposition {
    if sub.vertices.is_empty() {
        return BlockDecomposition {
            blocks: Vec::new(),
            block_tree: Vec::new(),
            cut_vertices: Vec::new(),
        };
    }
    if sub.edges.is_empty() {
        return BlockDecomposition {
            blocks: vec![sub.clone()],
            block_tree: Vec::new(),
            cut_vertices: Vec::new(),
        };
    }
    let adj = sub.neighbors();
    let mut disc: BTreeMap<usize, usize> = BTreeMap::new();
    let mut low: BTreeMap<usize, usize> = BTreeMap::new();
    let mut timer = 0usize;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut raw_blocks: Vec<Subgraph> = Vec::new();
    let mut cuts = BTreeSet::new();

    let root = sub.vertices[0];
    // Frames: (vertex, parent, next neighbor index).
    let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
    disc.insert(root, timer);
    low.insert(root, timer);
    timer += 1;
    let mut root_children = 0usize;

    while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
        let neighbors = &adj[&v];
        if *next < neighbors.len() {
            let w = neighbors[*next];
            *next += 1;
            if Some(w) == parent {
                continue;
            }
            match disc.get(&w) {
                None => {
                    edge_stack.push((v, w));
                    disc.insert(w, timer);
                    low.insert(w, timer);
                    timer += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, Some(v), 0));
                }
                Some(&dw) => {
                    if dw < disc[&v] {
                        edge_stack.push((v, w));
                        let lv = low[&v].min(dw);
                        low.insert(v, lv);
                    }
                }
            }
        } else {
            stack.pop();
            if let Some(p) = parent {
                let lv = low[&v];
                let lp = low[&p].min(lv);
                low.insert(p, lp);
                if lv >= disc[&p] {
                    if p != root {
                        cuts.insert(p);
                    }
                    let mut verts = BTreeSet::new();
                    let mut edges = Vec::new();
                    while let Some(e) = edge_stack.pop() {
                        verts.insert(e.0);
                        verts.insert(e.1);
                        edges.push(e);
                        if e == (p, v) {
                            break;
                        }
                    }
                    raw_blocks.push(Subgraph::new(verts, edges));
                }
            }
        }
    }
    if root_children > 1 {
        cuts.insert(root);
    }

    raw_blocks.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    let block_tree = build_block_tree(&raw_blocks, &cuts);
    BlockDecomposition {
        blocks: raw_blocks,
        block_tree,
        cut_vertices: cuts.into_iter().collect(),
    }
}

pub fn block_decomposition(g: &Graph) -> BlockDecomposition {
    block_decomposition_of(&g.to_subgraph())
}

fn build_block_tree(blocks: &[Subgraph], cuts: &BTreeSet<usize>) -> Vec<BlockLink> {
    let mut by_cut: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, b) in blocks.iter().enumerate() {
        for &v in &b.vertices {
            if cuts.contains(&v) {
                by_cut.entry(v).or_default().push(idx);
            }
        }
    }
    let mut links = Vec::new();
    if blocks.is_empty() {
        return links;
    }
    let mut visited_block = vec![false; blocks.len()];
    let mut visited_cut = BTreeSet::new();
    visited_block[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(b) = queue.pop_front() {
        for &v in &blocks[b].vertices {
            if !cuts.contains(&v) || !visited_cut.insert(v) {
                continue;
            }
            for &other in &by_cut[&v] {
                if !visited_block[other] {
                    visited_block[other] = true;
                    links.push(BlockLink {
                        parent: b,
                        child: other,
                        cut: v,
                    });
                    queue.push_back(other);
                }
            }
        }
    }
    links
}

/// AHU canonical string of a tree rooted at `root`.
fn rooted_code(adj: &[Vec<usize>], root: usize, parent: usize) -> String {
    let mut children: Vec<String> = adj[root]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| rooted_code(adj, w, root))
        .collect();
    children.sort();
    format!("({})", children.concat())
}

/// Isomorphism-invariant code for a tree (rooted at its center or bicenter).
pub fn tree_canonical_code(g: &Graph) -> String {
    let adj = g.adjacency();
    let n = g.n();
    if n == 1 {
        return "()".into();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; n + 1];
    let mut layer: Vec<usize> = (1..=n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            removed[v] = true;
        }
        for &v in &layer {
            for &w in &adj[v] {
                if removed[w] {
                    continue;
                }
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    let centers: Vec<usize> = (1..=n).filter(|&v| !removed[v]).collect();
    centers
        .iter()
        .map(|&c| rooted_code(&adj, c, 0))
        .min()
        .expect("a tree has a center")
}

/// All trees on `n` vertices up to isomorphism, via Prüfer decoding and
/// canonical codes. Practical for `n ≤ 9`.
pub fn nonisomorphic_trees(n: usize) -> Vec<Graph> {
    assert!(n >= 1, "trees need at least one vertex");
    if n <= 2 {
        return vec![Graph::path(n)];
    }
    let mut seen: BTreeMap<String, Graph> = BTreeMap::new();
    let len = n - 2;
    let mut seq = vec![1usize; len];
    loop {
        let t = prufer_decode(n, &seq);
        seen.entry(tree_canonical_code(&t)).or_insert(t);
        // odometer increment
        let mut k = 0;
        loop {
            if k == len {
                return seen.into_values().collect();
            }
            seq[k] += 1;
            if seq[k] <= n {
                break;
            }
            seq[k] = 1;
            k += 1;
        }
    }
}

fn prufer_decode(n: usize, seq: &[usize]) -> Graph {
    let mut degree = vec![1usize; n + 1];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (1..=n).find(|&v| degree[v] == 1).expect("Prüfer sequences always have a leaf");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (1..=n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    Graph::new(n, edges).expect("decoded Prüfer sequence is a tree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_with_tree() -> Graph {
        Graph::new(8, [(1, 2), (1, 3), (3, 4), (4, 5), (4, 6), (6, 7), (7, 8), (6, 8)]).unwrap()
    }

    #[test]
    fn parses_triangle_and_edge() {
        let k3 = parse_graph("n 3\ne 1 2\ne 1 3\ne 2 3\n").unwrap();
        assert_eq!(k3, Graph::complete(3));
        let edge = parse_graph("# smallest\nn 2\ne 1 2").unwrap();
        assert_eq!(edge.edges(), &[(1, 2)]);
        let c4 = parse_graph("n 4\ne 1 2\ne 2 3\ne 3 4\ne 1 4\n").unwrap();
        assert_eq!(c4, Graph::cycle(4));
    }

    #[test]
    fn json_form_is_accepted() {
        let g = parse_graph(r#"{"n": 3, "edges": [[1,2],[1,3],[2,3]]}"#).unwrap();
        assert_eq!(g, Graph::complete(3));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_graph("n 3\ne 1 x"), Err(GraphError::Malformed { line: 2, .. })));
        assert!(matches!(parse_graph("n 2\ne 1 3"), Err(GraphError::OutOfRange { .. })));
        assert!(matches!(parse_graph("n 2\ne 1 2\ne 1 2"), Err(GraphError::DuplicateEdge { .. })));
        assert!(matches!(parse_graph("n 2\ne 2 1"), Err(GraphError::UnorderedEdge { .. })));
        assert!(matches!(parse_graph("n 2\ne 1 1"), Err(GraphError::SelfLoop(1))));
        assert!(matches!(parse_graph("e 1 2"), Err(GraphError::MissingHeader)));
        assert!(matches!(parse_graph("n 2\nn 2"), Err(GraphError::DuplicateHeader { line: 2 })));
        assert_eq!(
            parse_graph("n 4\ne 1 2\ne 3 4"),
            Err(GraphError::Disconnected { component: vec![3, 4] })
        );
        assert!(matches!(parse_graph("n 0"), Err(GraphError::EmptyGraph)));
    }

    #[test]
    fn display_round_trips() {
        let g = triangle_with_tree();
        assert_eq!(parse_graph(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn tree_test() {
        assert!(is_tree(&Graph::path(3)));
        assert!(!is_tree(&Graph::complete(3)));
        let six = Graph::new(6, [(1, 2), (1, 3), (3, 4), (4, 5), (4, 6)]).unwrap();
        assert!(is_tree(&six));
        assert!(is_tree(&Graph::path(4)));
    }

    #[test]
    fn contraction_of_triangle_with_tree() {
        let d = contract_pendant_trees(&triangle_with_tree());
        assert!(!d.is_tree);
        assert_eq!(d.core.vertices, vec![6, 7, 8]);
        assert_eq!(d.core.edges, vec![(6, 7), (6, 8), (7, 8)]);
        assert_eq!(d.pendant_forest.len(), 1);
        let pt = &d.pendant_forest[0];
        assert_eq!(pt.root, 6);
        assert_eq!(pt.tree.vertices, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(pt.tree.vertices.len() - 1, 5);
        assert_eq!(d.vertex_map[&2], Placement::Pendant { root: 6 });
        assert_eq!(d.vertex_map[&7], Placement::Core);
    }

    #[test]
    fn contraction_edge_cases() {
        let d = contract_pendant_trees(&Graph::complete(3));
        assert_eq!(d.core.vertices, vec![1, 2, 3]);
        assert!(d.pendant_forest.is_empty());

        let d = contract_pendant_trees(&Graph::path(3));
        assert!(d.is_tree);
        assert!(d.core.is_empty());
    }

    #[test]
    fn blocks_of_small_graphs() {
        let b = block_decomposition(&Graph::complete(3));
        assert_eq!(b.blocks.len(), 1);
        assert!(b.cut_vertices.is_empty());

        let b = block_decomposition(&Graph::path(3));
        assert_eq!(b.blocks.len(), 2);
        assert_eq!(b.cut_vertices, vec![2]);
        assert_eq!(b.block_tree, vec![BlockLink { parent: 0, child: 1, cut: 2 }]);
    }

    #[test]
    fn star_blocks_form_a_tree() {
        let b = block_decomposition(&Graph::star(4));
        assert_eq!(b.blocks.len(), 4);
        assert_eq!(b.block_tree.len(), 3);
        assert_eq!(b.cut_vertices, vec![1]);
    }

    #[test]
    fn tree_counts_match_known_sequence() {
        let counts: Vec<usize> = (1..=8).map(|n| nonisomorphic_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23]);
    }
}
