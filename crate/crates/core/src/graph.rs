//! Proximity graphs over samples: Spheres-of-Influence, its intersection with
//! the dual Voronoi graph (SIGDV), and component bridging.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};

/// Provenance of an edge in a [`ProximityGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeTag {
    DualVoronoi,
    Sig,
    Sigdv,
    Bridge,
}

impl EdgeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeTag::DualVoronoi => "dual-voronoi",
            EdgeTag::Sig => "sig",
            EdgeTag::Sigdv => "sigdv",
            EdgeTag::Bridge => "bridge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
    pub tag: EdgeTag,
}

/// Weighted undirected simple graph over sample indices `0..n`.
///
/// Edges are keyed by `(min, max)` and iterate in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), (f64, EdgeTag)>,
}

impl ProximityGraph {
    pub fn new(n: usize) -> Self {
        ProximityGraph {
            n,
            edges: BTreeMap::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Inserts edge `{a, b}`. Returns `false` if it was already present, in
    /// which case the existing weight and tag are kept.
    pub fn add_edge(&mut self, a: usize, b: usize, weight: f64, tag: EdgeTag) -> Result<bool> {
        if a == b {
            return Err(Error::invalid(format!("self-loop on node {a}")));
        }
        if a >= self.n || b >= self.n {
            return Err(Error::invalid(format!(
                "edge ({a}, {b}) out of range for {} nodes",
                self.n
            )));
        }
        if !(weight > 0.0) {
            return Err(Error::invalid(format!(
                "edge ({a}, {b}) has non-positive weight {weight}; samples must be distinct"
            )));
        }
        let key = (a.min(b), a.max(b));
        if self.edges.contains_key(&key) {
            return Ok(false);
        }
        self.edges.insert(key, (weight, tag));
        Ok(true)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains_key(&(a.min(b), a.max(b)))
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        self.edges.get(&(a.min(b), a.max(b))).map(|e| e.0)
    }

    pub fn edges(&self) -> impl Iterator<Item = GraphEdge> + '_ {
        self.edges.iter().map(|(&(a, b), &(weight, tag))| GraphEdge { a, b, weight, tag })
    }

    pub fn count_by_tag(&self, tag: EdgeTag) -> usize {
        self.edges.values().filter(|e| e.1 == tag).count()
    }

    /// Adjacency lists sorted ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in self.edges.keys() {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    /// Connected components; labels are numbered in order of lowest member.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let adj = self.adjacency();
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    /// Component members, each list ascending, components ordered by lowest
    /// member.
    pub fn component_members(&self) -> Vec<Vec<usize>> {
        let (count, label) = self.components();
        let mut out = vec![Vec::new(); count];
        for (v, &l) in label.iter().enumerate() {
            out[l].push(v);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().0 == 1
    }

    /// Induced subgraph on `nodes`, re-indexed by position in `nodes`.
    pub fn induced(&self, nodes: &[usize]) -> ProximityGraph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in nodes.iter().enumerate() {
            pos[v] = i;
        }
        let mut g = ProximityGraph::new(nodes.len());
        for (&(a, b), &(w, tag)) in &self.edges {
            if pos[a] != usize::MAX && pos[b] != usize::MAX {
                g.edges
                    .insert((pos[a].min(pos[b]), pos[a].max(pos[b])), (w, tag));
            }
        }
        g
    }
}

/// Distance of every sample to its nearest other sample.
pub fn nearest_neighbor_distances(d: &DistanceMatrix) -> Result<Vec<f64>> {
    let n = d.len();
    if n < 2 {
        return Err(Error::invalid("nearest-neighbour distances need at least two samples"));
    }
    Ok((0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| d.get(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// Spheres-of-Influence graph: `{i, j}` is an edge iff
/// `D[i][j] <= nn(i) + nn(j)` (boundary ties included). Pairs at infinite
/// distance are never joined.
pub fn sig_graph(d: &DistanceMatrix) -> Result<ProximityGraph> {
    let nn = nearest_neighbor_distances(d)?;
    let n = d.len();
    let mut g = ProximityGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let dij = d.get(i, j);
            if dij.is_finite() && dij <= nn[i] + nn[j] {
                g.add_edge(i, j, dij, EdgeTag::Sig)?;
            }
        }
    }
    Ok(g)
}

/// Edge intersection of the dual Voronoi graph and the SIG.
pub fn sigdv_graph(dual: &ProximityGraph, sig: &ProximityGraph) -> Result<ProximityGraph> {
    if dual.node_count() != sig.node_count() {
        return Err(Error::invalid(format!(
            "node count mismatch: dual graph has {}, SIG has {}",
            dual.node_count(),
            sig.node_count()
        )));
    }
    let mut g = ProximityGraph::new(dual.node_count());
    for e in dual.edges() {
        if sig.has_edge(e.a, e.b) {
            g.add_edge(e.a, e.b, e.weight, EdgeTag::Sigdv)?;
        }
    }
    Ok(g)
}

/// Connects all components of `g` with the cheapest set of extra edges: the
/// minimum spanning tree of the component graph, where two components are
/// joined by their closest sample pair. Returns the bridged graph and the
/// added edges (tagged [`EdgeTag::Bridge`]).
pub fn bridge_components(
    g: &ProximityGraph,
    d: &DistanceMatrix,
) -> Result<(ProximityGraph, Vec<GraphEdge>)> {
    if g.node_count() != d.len() {
        return Err(Error::invalid("graph and distance matrix sizes differ"));
    }
    let members = g.component_members();
    let c = members.len();
    let mut out = g.clone();
    if c <= 1 {
        return Ok((out, Vec::new()));
    }
    // Closest realising pair for every component pair; scanning members in
    // ascending order with a strict comparison keeps the lexicographically
    // smallest pair on ties.
    let mut candidates: Vec<(f64, usize, usize, usize, usize)> = Vec::new();
    for ci in 0..c {
        for cj in ci + 1..c {
            let mut best = (f64::INFINITY, usize::MAX, usize::MAX);
            for &u in &members[ci] {
                for &v in &members[cj] {
                    let (a, b) = (u.min(v), u.max(v));
                    let w = d.get(u, v);
                    if w < best.0 || (w == best.0 && (a, b) < (best.1, best.2)) {
                        best = (w, a, b);
                    }
                }
            }
            candidates.push((best.0, best.1, best.2, ci, cj));
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    let mut parent: Vec<usize> = (0..c).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut added = Vec::with_capacity(c - 1);
    for (w, a, b, ci, cj) in candidates {
        let (ri, rj) = (find(&mut parent, ci), find(&mut parent, cj));
        if ri == rj {
            continue;
        }
        if !w.is_finite() {
            return Err(Error::Disconnected(a, b));
        }
        parent[ri] = rj;
        out.add_edge(a, b, w, EdgeTag::Bridge)?;
        added.push(GraphEdge {
            a,
            b,
            weight: w,
            tag: EdgeTag::Bridge,
        });
        if added.len() == c - 1 {
            break;
        }
    }
    Ok((out, added))
}
