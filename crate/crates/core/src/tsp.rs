//! Tour construction: minimum spanning tree over a proximity graph, preorder
//! walk, then 2-opt over the full distance matrix.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::ProximityGraph;

/// Closed tour over samples `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    /// Wraps `order`, checking that it is a permutation of `0..d.len()`.
    pub fn new(order: Vec<usize>, d: &DistanceMatrix) -> Result<Self> {
        let n = d.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::invalid(format!("tour has {} entries for {n} samples", order.len())));
        }
        for &v in &order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::invalid(format!("tour entry {v} is out of range or repeated")));
            }
        }
        let length = d.cycle_length(&order);
        Ok(Tour { order, length })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Consecutive pairs including the closing one, each as `(min, max)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.order.len();
        if n < 2 {
            return Vec::new();
        }
        let m = if n == 2 { 1 } else { n };
        (0..m)
            .map(|k| {
                let (a, b) = (self.order[k], self.order[(k + 1) % n]);
                (a.min(b), a.max(b))
            })
            .collect()
    }
}

/// Tree edge `(a, b, weight)` with `a < b`.
pub type TreeEdge = (usize, usize, f64);

#[derive(PartialEq)]
struct Candidate(f64, usize, usize, usize);

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .total_cmp(&other.0)
            .then((self.1, self.2).cmp(&(other.1, other.2)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Prim's algorithm from sample 0 over the edges of `g`, with weights read
/// from `d`. Among equally light crossing edges the lexicographically
/// smallest `(min, max)` pair wins. Edges are returned in insertion order.
pub fn minimum_spanning_tree(g: &ProximityGraph, d: &DistanceMatrix) -> Result<Vec<TreeEdge>> {
    let n = g.node_count();
    if n != d.len() {
        return Err(Error::invalid("graph and distance matrix sizes differ"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let adj = g.adjacency();
    let mut in_tree = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut tree = Vec::with_capacity(n - 1);
    let push = |v: usize, heap: &mut BinaryHeap<Reverse<Candidate>>, in_tree: &[bool]| {
        for &w in &adj[v] {
            if !in_tree[w] {
                heap.push(Reverse(Candidate(d.get(v, w), v.min(w), v.max(w), w)));
            }
        }
    };
    in_tree[0] = true;
    push(0, &mut heap, &in_tree);
    while let Some(Reverse(Candidate(w, a, b, to))) = heap.pop() {
        if in_tree[to] {
            continue;
        }
        in_tree[to] = true;
        tree.push((a, b, w));
        push(to, &mut heap, &in_tree);
    }
    if tree.len() != n - 1 {
        let components = g.components().0;
        return Err(Error::DisconnectedGraph(components));
    }
    Ok(tree)
}

/// First-visit DFS order of `tree` from `root`, children in ascending order.
pub fn preorder_tour(tree: &[TreeEdge], root: usize, d: &DistanceMatrix) -> Result<Tour> {
    let n = d.len();
    if root >= n.max(1) || tree.len() + 1 != n {
        return Err(Error::invalid("tree does not span the distance matrix"));
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b, _) in tree {
        adj[a].push(b);
        adj[b].push(a);
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut seen[v], true) {
            continue;
        }
        order.push(v);
        stack.extend(adj[v].iter().rev().filter(|&&w| !seen[w]));
    }
    Tour::new(order, d)
}

/// First improving 2-opt move `(i, l)` in lexicographic order: replacing
/// tour edges `(t[i], t[i+1])` and `(t[l], t[l+1])` by `(t[i], t[l])` and
/// `(t[i+1], t[l+1])` shortens the tour by more than `tol`.
fn first_improving(order: &[usize], d: &DistanceMatrix, tol: f64) -> Option<(usize, usize)> {
    let n = order.len();
    for i in 0..n - 2 {
        let (a, b) = (order[i], order[i + 1]);
        let dab = d.get(a, b);
        for l in i + 2..n {
            if i == 0 && l == n - 1 {
                continue;
            }
            let (c, e) = (order[l], order[(l + 1) % n]);
            let gain = dab + d.get(c, e) - d.get(a, c) - d.get(b, e);
            if gain > tol {
                return Some((i, l));
            }
        }
    }
    None
}

/// Applies improving 2-opt swaps until none remains. A swap must shorten
/// the tour by more than `1e-12` times its current length.
pub fn two_opt_refine(tour: Tour, d: &DistanceMatrix) -> Tour {
    let n = tour.order.len();
    if n < 4 {
        return tour;
    }
    let mut order = tour.order;
    let mut length = tour.length;
    while let Some((i, l)) = first_improving(&order, d, 1e-12 * length) {
        let (a, b, c, e) = (order[i], order[i + 1], order[l], order[(l + 1) % n]);
        length -= d.get(a, b) + d.get(c, e) - d.get(a, c) - d.get(b, e);
        order[i + 1..=l].reverse();
    }
    let length = d.cycle_length(&order);
    Tour { order, length }
}

/// True when no 2-opt swap shortens the tour by more than the refinement
/// tolerance.
pub fn is_two_optimal(tour: &Tour, d: &DistanceMatrix) -> bool {
    tour.order.len() < 4 || first_improving(&tour.order, d, 1e-12 * tour.length).is_none()
}

/// Spanning tree of `g`, preorder walk from sample 0, then 2-opt on `d`.
pub fn solve_tsp(g: &ProximityGraph, d: &DistanceMatrix) -> Result<Tour> {
    if d.len() < 3 {
        return Err(Error::invalid(format!(
            "a closed curve needs at least 3 samples, got {}",
            d.len()
        )));
    }
    let tree = minimum_spanning_tree(g, d)?;
    let tour = preorder_tour(&tree, 0, d)?;
    Ok(two_opt_refine(tour, d))
}
