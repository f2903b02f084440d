//! Discrete geodesics on a [`TriMesh`]: shortest paths in the vertex-edge
//! graph, geodesic Voronoi partitions, their dual graphs and pairwise sample
//! distances.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::{EdgeTag, ProximityGraph};
use crate::mesh::TriMesh;
use crate::par::{self, Execution};

/// Label of a vertex that no source reaches.
pub const UNREACHED: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Front {
    dist: f64,
    label: usize,
    vertex: usize,
}

impl Eq for Front {}

impl Ord for Front {
    // Reversed so that `BinaryHeap` pops the smallest (dist, label, vertex).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then(other.label.cmp(&self.label))
            .then(other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Front {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multi-source Dijkstra ordered lexicographically by `(distance, label)`,
/// so every vertex ends up with the lowest-labelled nearest source.
fn propagate(mesh: &TriMesh, seeds: &[(usize, usize)], stop: Option<usize>) -> (Vec<f64>, Vec<usize>, Vec<usize>) {
    let n = mesh.vertex_count();
    let graph = mesh.edge_graph();
    let mut dist = vec![f64::INFINITY; n];
    let mut label = vec![UNREACHED; n];
    let mut pred = vec![UNREACHED; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &(v, l) in seeds {
        dist[v] = 0.0;
        label[v] = l;
        heap.push(Front {
            dist: 0.0,
            label: l,
            vertex: v,
        });
    }
    while let Some(Front { dist: d, label: l, vertex: v }) = heap.pop() {
        if done[v] || d > dist[v] || (d == dist[v] && l != label[v]) {
            continue;
        }
        done[v] = true;
        if stop == Some(v) {
            break;
        }
        for (w, len) in graph.neighbors(v) {
            if done[w] {
                continue;
            }
            let nd = d + len;
            if nd < dist[w] || (nd == dist[w] && l < label[w]) {
                dist[w] = nd;
                label[w] = l;
                pred[w] = v;
                heap.push(Front {
                    dist: nd,
                    label: l,
                    vertex: w,
                });
            }
        }
    }
    (dist, label, pred)
}

/// Shortest-path distances from one vertex to every vertex.
pub fn distances_from(mesh: &TriMesh, source: usize) -> Vec<f64> {
    propagate(mesh, &[(source, 0)], None).0
}

/// Geodesic Voronoi partition of the vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiPartition {
    /// Per vertex, the sample index (position in `sources`) of its cell, or
    /// [`UNREACHED`] on components without a source.
    pub labels: Vec<usize>,
    /// Per vertex, distance to the generator of its cell.
    pub distances: Vec<f64>,
    /// Sample vertex indices.
    pub sources: Vec<usize>,
}

impl VoronoiPartition {
    pub fn label(&self, v: usize) -> Option<usize> {
        let l = self.labels[v];
        (l != UNREACHED).then_some(l)
    }
}

fn check_samples(mesh: &TriMesh, samples: &[usize]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::invalid("source set is empty"));
    }
    let n = mesh.vertex_count();
    if let Some(&s) = samples.iter().find(|&&s| s >= n) {
        return Err(Error::invalid(format!("sample vertex {s} out of range (mesh has {n} vertices)")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!("duplicate sample vertex {}", w[0])));
    }
    Ok(())
}

/// Labels every vertex with its nearest source by simultaneous front
/// propagation from all sources. Ties go to the lower sample index.
pub fn multi_source_propagate(mesh: &TriMesh, sources: &[usize]) -> Result<VoronoiPartition> {
    check_samples(mesh, sources)?;
    let seeds: Vec<(usize, usize)> = sources.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let (distances, labels, _) = propagate(mesh, &seeds, None);
    Ok(VoronoiPartition {
        labels,
        distances,
        sources: sources.to_vec(),
    })
}

/// Dual graph of a Voronoi partition: samples whose cells touch across a
/// mesh edge, or meet in a triangle carrying three distinct labels, are
/// joined. Weights are taken from `d`.
pub fn dual_voronoi_graph(
    partition: &VoronoiPartition,
    mesh: &TriMesh,
    d: &DistanceMatrix,
) -> Result<ProximityGraph> {
    let k = partition.sources.len();
    if d.len() != k || partition.labels.len() != mesh.vertex_count() {
        return Err(Error::invalid("partition, mesh and distance matrix disagree in size"));
    }
    let mut g = ProximityGraph::new(k);
    let link = |a: usize, b: usize, g: &mut ProximityGraph| -> Result<()> {
        if a != b && a != UNREACHED && b != UNREACHED {
            g.add_edge(a, b, d.get(a, b), EdgeTag::DualVoronoi)?;
        }
        Ok(())
    };
    for e in mesh.edges() {
        link(partition.labels[e.a], partition.labels[e.b], &mut g)?;
    }
    for t in mesh.triangles() {
        let [a, b, c] = t.map(|v| partition.labels[v]);
        if a != b && b != c && a != c {
            link(a, b, &mut g)?;
            link(b, c, &mut g)?;
            link(a, c, &mut g)?;
        }
    }
    Ok(g)
}

/// Graph-geodesic distances between all sample pairs, one single-source
/// sweep per sample. Disconnected pairs are an error unless
/// `allow_disconnected`, in which case they stay infinite.
pub fn pairwise_distances(
    mesh: &TriMesh,
    samples: &[usize],
    allow_disconnected: bool,
) -> Result<DistanceMatrix> {
    pairwise_distances_with(mesh, samples, allow_disconnected, Execution::Parallel)
}

/// [`pairwise_distances`] with an explicit scheduling strategy. Workers share
/// the mesh read-only and each produces one row.
pub fn pairwise_distances_with(
    mesh: &TriMesh,
    samples: &[usize],
    allow_disconnected: bool,
    exec: Execution,
) -> Result<DistanceMatrix> {
    check_samples(mesh, samples)?;
    let rows = par::map_slice(samples, exec, |&s| {
        let dist = distances_from(mesh, s);
        samples.iter().map(|&t| dist[t]).collect::<Vec<f64>>()
    });
    let d = DistanceMatrix::from_rows(rows)?;
    if !allow_disconnected {
        if let Some((i, j)) = d.first_infinite_pair() {
            return Err(Error::Disconnected(samples[i], samples[j]));
        }
    }
    Ok(d)
}

/// Vertex path realising the shortest-path distance between `a` and `b`.
pub fn shortest_vertex_path(mesh: &TriMesh, a: usize, b: usize) -> Result<Vec<usize>> {
    let n = mesh.vertex_count();
    if a >= n || b >= n {
        return Err(Error::invalid(format!("vertex out of range ({a}, {b}) for {n} vertices")));
    }
    if a == b {
        return Ok(vec![a]);
    }
    let (dist, _, pred) = propagate(mesh, &[(a, 0)], Some(b));
    if !dist[b].is_finite() {
        return Err(Error::Disconnected(a, b));
    }
    let mut path = vec![b];
    let mut v = b;
    while v != a {
        v = pred[v];
        path.push(v);
    }
    path.reverse();
    Ok(path)
}
