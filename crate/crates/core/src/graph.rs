//! Simple undirected graphs with an optional directed edge record.
//!
//! Nodes are dense ids `0..n`. The directed record only feeds in/out degree
//! selection; every structural query runs on the symmetrised edge set.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DegreeKind {
    #[default]
    Total,
    In,
    Out,
}

impl DegreeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DegreeKind::Total => "total",
            DegreeKind::In => "in",
            DegreeKind::Out => "out",
        }
    }
}

impl fmt::Display for DegreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DegreeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(DegreeKind::Total),
            "in" => Ok(DegreeKind::In),
            "out" => Ok(DegreeKind::Out),
            other => Err(Error::Parameter(format!(
                "unknown degree kind `{other}` (expected total, in or out)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeVector {
    pub kind: DegreeKind,
    pub values: Vec<usize>,
}

/// Immutable simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_nodes: usize,
    /// Sorted, `u < v`.
    edges: Vec<(usize, usize)>,
    /// Sorted neighbour lists.
    adjacency: Vec<Vec<usize>>,
    directed_edges: Option<Vec<(usize, usize)>>,
    labels: Vec<String>,
}

impl Graph {
    /// Builds a graph from an undirected edge iterator. Duplicates collapse;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = HashSet::new();
        for (u, v) in edges {
            check_node(u, n_nodes)?;
            check_node(v, n_nodes)?;
            if u == v {
                return Err(Error::Data(format!("self-loop on node {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut edges: Vec<_> = set.into_iter().collect();
        edges.sort_unstable();
        let labels = (0..n_nodes).map(|i| i.to_string()).collect();
        Ok(Self::assemble(n_nodes, edges, None, labels))
    }

    /// Builds a graph that keeps the direction of each input pair for in/out
    /// degree queries.
    pub fn from_directed_edges<I>(n_nodes: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let arcs: Vec<_> = arcs.into_iter().collect();
        let mut g = Self::from_edges(n_nodes, arcs.iter().copied())?;
        g.directed_edges = Some(dedup_arcs(arcs));
        Ok(g)
    }

    fn assemble(
        n_nodes: usize,
        edges: Vec<(usize, usize)>,
        directed_edges: Option<Vec<(usize, usize)>>,
        labels: Vec<String>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); n_nodes];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            n_nodes,
            edges,
            adjacency,
            directed_edges,
            labels,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_nodes {
            return Err(Error::Size(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n_nodes
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn directed_edges(&self) -> Option<&[(usize, usize)]> {
        self.directed_edges.as_deref()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n_nodes && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n_nodes == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n_nodes as f64
        }
    }

    pub fn check_node(&self, u: usize) -> Result<()> {
        check_node(u, self.n_nodes)
    }

    pub fn degrees(&self, kind: DegreeKind) -> Result<DegreeVector> {
        let values = match kind {
            DegreeKind::Total => match &self.directed_edges {
                // in + out; equals the undirected degree unless both
                // directions of a pair were recorded.
                Some(arcs) => {
                    let mut d = vec![0; self.n_nodes];
                    for &(u, v) in arcs {
                        d[u] += 1;
                        d[v] += 1;
                    }
                    d
                }
                None => self.adjacency.iter().map(Vec::len).collect(),
            },
            DegreeKind::In | DegreeKind::Out => {
                let arcs = self
                    .directed_edges
                    .as_ref()
                    .ok_or(Error::UnsupportedDegreeKind(kind.as_str()))?;
                let mut d = vec![0; self.n_nodes];
                for &(u, v) in arcs {
                    if kind == DegreeKind::Out {
                        d[u] += 1;
                    } else {
                        d[v] += 1;
                    }
                }
                d
            }
        };
        Ok(DegreeVector { kind, values })
    }

    /// Undirected degrees.
    pub fn total_degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn common_neighbors(&self, u: usize, v: usize) -> Result<usize> {
        self.check_node(u)?;
        self.check_node(v)?;
        let (a, b) = (&self.adjacency[u], &self.adjacency[v]);
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(count)
    }

    /// Breadth-first hop counts; `None` marks unreachable nodes.
    pub fn shortest_path_lengths(&self, source: usize) -> Result<Vec<Option<usize>>> {
        self.check_node(source)?;
        let mut dist = vec![None; self.n_nodes];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Component id per node, numbered by smallest member.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut comp = vec![usize::MAX; self.n_nodes];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n_nodes {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in &self.adjacency[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    pub fn is_connected(&self) -> bool {
        self.components().0 <= 1
    }

    pub fn require_connected(&self) -> Result<()> {
        match self.components().0 {
            0 | 1 => Ok(()),
            components => Err(Error::Disconnected { components }),
        }
    }

    /// Subgraph induced by `nodes` (kept in the given order). Labels follow
    /// their nodes; the directed record is restricted as well.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        let mut index = vec![usize::MAX; self.n_nodes];
        for (new, &old) in nodes.iter().enumerate() {
            self.check_node(old)?;
            index[old] = new;
        }
        let keep = |&(u, v): &(usize, usize)| index[u] != usize::MAX && index[v] != usize::MAX;
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .filter(|e| keep(e))
            .map(|&(u, v)| (index[u].min(index[v]), index[u].max(index[v])))
            .collect();
        edges.sort_unstable();
        let directed = self.directed_edges.as_ref().map(|arcs| {
            arcs.iter()
                .filter(|e| keep(e))
                .map(|&(u, v)| (index[u], index[v]))
                .collect()
        });
        let labels = nodes.iter().map(|&u| self.labels[u].clone()).collect();
        Ok(Self::assemble(nodes.len(), edges, directed, labels))
    }

    /// Largest connected component (ties go to the component holding the
    /// smallest node id) and the original ids of its nodes.
    pub fn largest_component(&self) -> (Graph, Vec<usize>) {
        let (count, comp) = self.components();
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)));
        let nodes: Vec<usize> = match best {
            Some(b) => (0..self.n_nodes).filter(|&u| comp[u] == b).collect(),
            None => Vec::new(),
        };
        let sub = self
            .induced_subgraph(&nodes)
            .expect("component nodes are in range");
        (sub, nodes)
    }

    /// Parses an edge list: one `u v` pair per line, `#` comments, labels
    /// mapped to ids in first-appearance order.
    pub fn parse_edge_list<'a>(text: &'a str, directed: bool) -> Result<Graph> {
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut labels: Vec<String> = Vec::new();
        let mut arcs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected 2 node tokens, found {}", tokens.len()),
                });
            }
            if tokens[0] == tokens[1] {
                return Err(Error::SelfLoop {
                    line: lineno + 1,
                    label: tokens[0].to_string(),
                });
            }
            let mut id_of = |tok: &'a str| -> usize {
                *ids.entry(tok).or_insert_with(|| {
                    labels.push(tok.to_string());
                    labels.len() - 1
                })
            };
            let u = id_of(tokens[0]);
            let v = id_of(tokens[1]);
            arcs.push((u, v));
        }
        let n = labels.len();
        let g = if directed {
            Graph::from_directed_edges(n, arcs)?
        } else {
            Graph::from_edges(n, arcs)?
        };
        g.with_labels(labels)
    }

    pub fn read_edge_list<R: std::io::Read>(mut reader: R, directed: bool) -> Result<Graph> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| Error::Data(format!("reading edge list: {e}")))?;
        Self::parse_edge_list(&text, directed)
    }

    /// Edge list text using node labels; directed arcs are written when
    /// recorded. Edges are ordered by their later endpoint so that ids
    /// round-trip when every node links to an earlier one.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let pairs: Vec<(usize, usize)> = match &self.directed_edges {
            Some(arcs) => arcs.clone(),
            None => {
                let mut e = self.edges.clone();
                e.sort_unstable_by_key(|&(u, v)| (v, u));
                e
            }
        };
        for (u, v) in pairs {
            out.push_str(&self.labels[u]);
            out.push(' ');
            out.push_str(&self.labels[v]);
            out.push('\n');
        }
        out
    }
}

fn check_node(u: usize, n_nodes: usize) -> Result<()> {
    if u < n_nodes {
        Ok(())
    } else {
        Err(Error::NodeRange { node: u, n_nodes })
    }
}

fn dedup_arcs(arcs: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    let mut seen = HashSet::new();
    arcs.into_iter().filter(|a| seen.insert(*a)).collect()
}

/// Graph with a nonnegative weight on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<F> {
    pub n_nodes: usize,
    /// `(u, v, w)` with `u < v`, sorted by `(u, v)`.
    pub edges: Vec<(usize, usize, F)>,
}

impl<F: Real> WeightedGraph<F> {
    pub fn new(n_nodes: usize, mut edges: Vec<(usize, usize, F)>) -> Result<Self> {
        for e in edges.iter_mut() {
            check_node(e.0, n_nodes)?;
            check_node(e.1, n_nodes)?;
            if e.0 == e.1 {
                return Err(Error::Data(format!("self-loop on node {}", e.0)));
            }
            if !(e.2 >= F::zero()) {
                return Err(Error::Data(format!(
                    "edge ({}, {}) has invalid weight {}",
                    e.0, e.1, e.2
                )));
            }
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        edges.sort_unstable_by_key(|e| (e.0, e.1));
        edges.dedup_by_key(|e| (e.0, e.1));
        Ok(Self { n_nodes, edges })
    }

    pub fn total_weight(&self) -> F {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, F)>> {
        let mut adj = vec![Vec::new(); self.n_nodes];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        adj
    }

    pub fn unweighted(&self) -> Graph {
        Graph::from_edges(self.n_nodes, self.edges.iter().map(|e| (e.0, e.1)))
            .expect("weighted graph edges already validated")
    }
}

/// Minimum spanning tree by Kruskal; equal weights are taken in `(u, v)`
/// order.
pub fn minimum_spanning_tree<F: Real>(wg: &WeightedGraph<F>) -> Result<WeightedGraph<F>> {
    let mut order: Vec<usize> = (0..wg.edges.len()).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&wg.edges[a], &wg.edges[b]);
        ea.2.partial_cmp(&eb.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((ea.0, ea.1).cmp(&(eb.0, eb.1)))
    });
    let mut dsu = DisjointSets::new(wg.n_nodes);
    let mut tree = Vec::with_capacity(wg.n_nodes.saturating_sub(1));
    for idx in order {
        let (u, v, w) = wg.edges[idx];
        if dsu.union(u, v) {
            tree.push((u, v, w));
        }
    }
    if wg.n_nodes > 0 && tree.len() + 1 < wg.n_nodes {
        return Err(Error::Disconnected {
            components: wg.n_nodes - tree.len(),
        });
    }
    tree.sort_unstable_by_key(|e| (e.0, e.1));
    Ok(WeightedGraph {
        n_nodes: wg.n_nodes,
        edges: tree,
    })
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
