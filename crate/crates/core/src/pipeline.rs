//! End-to-end reconstruction: distances, dual Voronoi graph, SIG, SIGDV,
//! optional bridging and tour extraction, for mesh samples, Euclidean points
//! and rigid motions. Also isoline sample extraction and the MST-chain
//! baseline.

use serde::Serialize;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::geodesic;
use crate::graph::{self, EdgeTag, GraphEdge, ProximityGraph};
use crate::mesh::{validate_manifold, TriMesh};
use crate::metric::{self, MetricPointSet, PoseSet, RigidMotionSample, WitnessParams, WitnessSpace};
use crate::par::Execution;
use crate::tsp::{self, Tour};

/// Whether all samples form one curve or each SIGDV component its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Components are bridged into one graph and one tour is returned.
    Single,
    /// Every SIGDV component is solved on its own.
    #[default]
    Multi,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Options {
    pub mode: Mode,
    /// Proceed on meshes that fail manifold validation.
    pub allow_non_manifold: bool,
    pub exec: Execution,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    /// Closed tours over sample indices (positions in the input list).
    pub tours: Vec<Tour>,
    /// Components too small for a closed curve, as open chains.
    pub chains: Vec<Vec<usize>>,
    pub dual: ProximityGraph,
    pub sig: ProximityGraph,
    /// SIGDV plus any bridge edges.
    pub graph: ProximityGraph,
    pub bridged_edges: Vec<GraphEdge>,
    pub distances: DistanceMatrix,
    pub warnings: Vec<String>,
}

impl ReconstructionResult {
    /// Edge counts of the dual, SIG and final graphs.
    pub fn edge_counts(&self) -> EdgeCounts {
        EdgeCounts {
            dual_voronoi: self.dual.edge_count(),
            sig: self.sig.edge_count(),
            sigdv: self.graph.count_by_tag(EdgeTag::Sigdv),
            bridge: self.graph.count_by_tag(EdgeTag::Bridge),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeCounts {
    pub dual_voronoi: usize,
    pub sig: usize,
    pub sigdv: usize,
    pub bridge: usize,
}

fn check_positive_distances(d: &DistanceMatrix) -> Result<()> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if d.get(i, j) == 0.0 {
                return Err(Error::invalid(format!("samples {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

/// Reconstruction from a distance matrix and a dual Voronoi graph.
pub fn reconstruct_from_graphs(d: DistanceMatrix, dual: ProximityGraph, mode: Mode) -> Result<ReconstructionResult> {
    let n = d.len();
    if n < 3 {
        return Err(Error::invalid(format!("at least 3 samples are needed, got {n}")));
    }
    if dual.node_count() != n {
        return Err(Error::invalid("dual graph and distance matrix sizes differ"));
    }
    check_positive_distances(&d)?;
    let sig = graph::sig_graph(&d)?;
    let sigdv = graph::sigdv_graph(&dual, &sig)?;
    let mut warnings = Vec::new();
    let (graph, bridged_edges, tours, chains) = match mode {
        Mode::Single => {
            let (bridged, added) = graph::bridge_components(&sigdv, &d)?;
            if !added.is_empty() {
                warnings.push(format!(
                    "SIGDV has {} components; joined with {} bridge edges",
                    added.len() + 1,
                    added.len()
                ));
            }
            let tour = tsp::solve_tsp(&bridged, &d)?;
            (bridged, added, vec![tour], Vec::new())
        }
        Mode::Multi => {
            let mut tours = Vec::new();
            let mut chains = Vec::new();
            for members in sigdv.component_members() {
                if members.len() < 3 {
                    warnings.push(format!(
                        "component {:?} has fewer than 3 samples; reported as an open chain",
                        members
                    ));
                    chains.push(members);
                    continue;
                }
                let sub = d.submatrix(&members);
                let t = tsp::solve_tsp(&sigdv.induced(&members), &sub)?;
                tours.push(Tour {
                    order: t.order.iter().map(|&i| members[i]).collect(),
                    length: t.length,
                });
            }
            (sigdv, Vec::new(), tours, chains)
        }
    };
    Ok(ReconstructionResult {
        tours,
        chains,
        dual,
        sig,
        graph,
        bridged_edges,
        distances: d,
        warnings,
    })
}

fn check_mesh(mesh: &TriMesh, opts: &Options) -> Result<()> {
    let report = validate_manifold(mesh);
    if !report.is_manifold && !opts.allow_non_manifold {
        return Err(Error::NonManifold(report.defects.len()));
    }
    Ok(())
}

/// Reconstruction of curves through mesh vertices `samples`.
pub fn reconstruct_mesh(mesh: &TriMesh, samples: &[usize], opts: &Options) -> Result<ReconstructionResult> {
    if samples.len() < 3 {
        return Err(Error::invalid(format!("at least 3 samples are needed, got {}", samples.len())));
    }
    check_mesh(mesh, opts)?;
    let partition = geodesic::multi_source_propagate(mesh, samples)?;
    let d = geodesic::pairwise_distances_with(mesh, samples, opts.mode == Mode::Multi, opts.exec)?;
    let dual = geodesic::dual_voronoi_graph(&partition, mesh, &d)?;
    reconstruct_from_graphs(d, dual, opts.mode)
}

/// Single-curve reconstruction on a mesh.
pub fn reconstruct(mesh: &TriMesh, samples: &[usize], opts: &Options) -> Result<ReconstructionResult> {
    reconstruct_mesh(mesh, samples, &Options { mode: Mode::Single, ..*opts })
}

/// Multi-curve reconstruction on a mesh.
pub fn reconstruct_multi(mesh: &TriMesh, samples: &[usize], opts: &Options) -> Result<ReconstructionResult> {
    reconstruct_mesh(mesh, samples, &Options { mode: Mode::Multi, ..*opts })
}

/// Reconstruction in any metric backend that provides its own dual
/// adjacency, such as planar Euclidean points.
pub fn reconstruct_points<P: MetricPointSet>(points: &P, opts: &Options) -> Result<ReconstructionResult> {
    let dual = points
        .dual_adjacency()
        .ok_or_else(|| Error::invalid("this backend has no dual adjacency; supply witnesses"))??;
    reconstruct_from_graphs(points.distance_matrix(opts.exec), dual, opts.mode)
}

/// Settings for pose-path reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionOptions {
    pub witness: WitnessParams,
    pub space: WitnessSpace,
    pub bisector_tolerance: f64,
}

impl Default for MotionOptions {
    fn default() -> Self {
        MotionOptions {
            witness: WitnessParams::default(),
            space: WitnessSpace::default(),
            bisector_tolerance: metric::DEFAULT_BISECTOR_TOLERANCE,
        }
    }
}

/// Reconstruction of a closed path of rigid motions. Without `witnesses`,
/// they are interpolated between each pose and its nearest poses.
pub fn reconstruct_motion(
    poses: &PoseSet,
    witnesses: Option<&[RigidMotionSample]>,
    motion: &MotionOptions,
    opts: &Options,
) -> Result<ReconstructionResult> {
    if poses.len() < 3 {
        return Err(Error::invalid(format!("at least 3 poses are needed, got {}", poses.len())));
    }
    let d = poses.distance_matrix(opts.exec);
    check_positive_distances(&d)?;
    let generated;
    let witnesses = match witnesses {
        Some(w) => w,
        None => {
            generated = metric::interpolated_pose_witnesses(poses, motion.witness);
            &generated
        }
    };
    let dual = metric::pose_witness_graph(poses, witnesses, motion.space, motion.bisector_tolerance, opts.exec)?;
    reconstruct_from_graphs(d, dual, opts.mode)
}

/// Mesh vertex path of a tour: consecutive samples joined by shortest
/// vertex paths, closed back to the first vertex.
pub fn tour_polyline(mesh: &TriMesh, samples: &[usize], tour: &Tour) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let k = tour.order.len();
    for i in 0..k {
        let (a, b) = (samples[tour.order[i]], samples[tour.order[(i + 1) % k]]);
        let path = geodesic::shortest_vertex_path(mesh, a, b)?;
        out.extend_from_slice(&path[..path.len() - 1]);
    }
    if let Some(&first) = out.first() {
        out.push(first);
    }
    Ok(out)
}

/// Vertices whose field value lies within `tol` of `value`.
pub fn extract_isoline_samples(mesh: &TriMesh, field: &[f64], value: f64, tol: f64) -> Result<Vec<usize>> {
    if field.len() != mesh.vertex_count() {
        return Err(Error::invalid(format!(
            "field has {} values for {} vertices",
            field.len(),
            mesh.vertex_count()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("isoline tolerance must be positive"));
    }
    Ok((0..field.len()).filter(|&v| (field[v] - value).abs() <= tol).collect())
}

/// Outcome of the MST-chain baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineResult {
    pub mst_is_chain: bool,
    /// The chain closed into a tour, when the tree is a path.
    pub tour: Option<Tour>,
    /// Tree vertices of degree three or more.
    pub branching_vertices: Vec<usize>,
    pub mst_weight: f64,
}

/// Minimum spanning tree of the complete graph; succeeds iff it is a path.
pub fn mst_chain_baseline(d: &DistanceMatrix) -> Result<BaselineResult> {
    let n = d.len();
    if n < 3 {
        return Err(Error::invalid(format!("at least 3 samples are needed, got {n}")));
    }
    check_positive_distances(d)?;
    let mut complete = ProximityGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            complete.add_edge(i, j, d.get(i, j), EdgeTag::Sig)?;
        }
    }
    let tree = tsp::minimum_spanning_tree(&complete, d)?;
    let mst_weight = tree.iter().map(|e| e.2).sum();
    let mut adj = vec![Vec::new(); n];
    for &(a, b, _) in &tree {
        adj[a].push(b);
        adj[b].push(a);
    }
    let branching_vertices: Vec<usize> = (0..n).filter(|&v| adj[v].len() > 2).collect();
    if !branching_vertices.is_empty() {
        return Ok(BaselineResult {
            mst_is_chain: false,
            tour: None,
            branching_vertices,
            mst_weight,
        });
    }
    let start = (0..n).find(|&v| adj[v].len() == 1).expect("a path has an endpoint");
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
        order.push(next);
        prev = cur;
        cur = next;
    }
    Ok(BaselineResult {
        mst_is_chain: true,
        tour: Some(Tour::new(order, d)?),
        branching_vertices,
        mst_weight,
    })
}

/// True when `tour` visits `expected` cyclically, in either direction.
pub fn same_cycle(tour: &[usize], expected: &[usize]) -> bool {
    let n = expected.len();
    if tour.len() != n {
        return false;
    }
    if n == 0 {
        return true;
    }
    let Some(shift) = tour.iter().position(|&v| v == expected[0]) else {
        return false;
    };
    let forward = (0..n).all(|k| tour[(shift + k) % n] == expected[k]);
    let backward = (0..n).all(|k| tour[(shift + n - k) % n] == expected[k]);
    forward || backward
}
