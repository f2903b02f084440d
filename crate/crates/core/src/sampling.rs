//! Sampling conditions on closed curves: approximate medial axis and local
//! feature size, ρ-sampling, uniform and non-uniform spacing checks, and
//! subsampling of dense curves into sparse compliant sample sets.

use serde::Serialize;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::geodesic;
use crate::mesh::{dist3, Point3, TriMesh};
use crate::par::Execution;

/// Closed curve given by a dense ordered point list, either in the plane or
/// as a vertex cycle on a mesh. Distances between curve points use the
/// ambient metric of the domain (Euclidean, or mesh graph geodesic).
#[derive(Debug, Clone)]
pub struct DiscreteCurve {
    positions: Vec<Point3>,
    vertices: Option<Vec<usize>>,
    distances: DistanceMatrix,
}

impl DiscreteCurve {
    pub fn planar(points: &[[f64; 2]]) -> Result<Self> {
        let positions: Vec<Point3> = points.iter().map(|p| [p[0], p[1], 0.0]).collect();
        if positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::invalid("curve point is not finite"));
        }
        let distances = DistanceMatrix::from_fn(positions.len(), Execution::Parallel, |i, j| {
            dist3(&positions[i], &positions[j])
        });
        Self::checked(positions, None, distances)
    }

    /// Curve through mesh vertices in cyclic order.
    pub fn on_mesh(mesh: &TriMesh, vertices: &[usize], exec: Execution) -> Result<Self> {
        let distances = geodesic::pairwise_distances_with(mesh, vertices, false, exec)?;
        let positions = vertices.iter().map(|&v| mesh.position(v)).collect();
        Self::checked(positions, Some(vertices.to_vec()), distances)
    }

    fn checked(positions: Vec<Point3>, vertices: Option<Vec<usize>>, distances: DistanceMatrix) -> Result<Self> {
        let n = positions.len();
        if n < 3 {
            return Err(Error::invalid(format!("a closed curve needs at least 3 points, got {n}")));
        }
        for k in 0..n {
            if distances.get(k, (k + 1) % n) == 0.0 {
                return Err(Error::invalid(format!("curve points {k} and {} coincide", (k + 1) % n)));
            }
        }
        Ok(DiscreteCurve {
            positions,
            vertices,
            distances,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    /// Mesh vertices of a mesh-borne curve.
    pub fn vertices(&self) -> Option<&[usize]> {
        self.vertices.as_deref()
    }

    /// Ambient distances between all curve points.
    pub fn distances(&self) -> &DistanceMatrix {
        &self.distances
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances.get(i, j)
    }

    /// `segment_lengths()[k]` is the distance from point `k` to point `k + 1`
    /// (cyclically).
    pub fn segment_lengths(&self) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|k| self.distance(k, (k + 1) % n)).collect()
    }

    /// Distances between the given curve points, in the given order.
    pub fn sample_distances(&self, samples: &[usize]) -> DistanceMatrix {
        self.distances.submatrix(samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisMethod {
    /// Circumcentres of large Delaunay triangles of the dense points.
    PlanarPoles,
    /// Vertices where the nearest-curve-point map jumps along the curve.
    MeshRidges,
}

/// Discrete approximation of the medial axis.
#[derive(Debug, Clone)]
pub struct MedialAxisApprox {
    pub points: Vec<Point3>,
    pub method: AxisMethod,
    /// Geodesic distance of every mesh vertex to the axis (mesh method only).
    field: Option<Vec<f64>>,
}

impl MedialAxisApprox {
    /// Planar axis from explicit points.
    pub fn from_points(points: Vec<Point3>) -> Self {
        MedialAxisApprox {
            points,
            method: AxisMethod::PlanarPoles,
            field: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Approximates the medial axis of one or more dense curves.
///
/// In the plane (`mesh = None`) the axis consists of circumcentres of
/// Delaunay triangles of all curve points whose circumradius exceeds twice
/// the local point spacing. On a mesh it consists of the non-curve vertices
/// at which the nearest curve point changes abruptly: the vertex or two of
/// its neighbours are nearest to points of different curves, or to points of
/// one curve at least a quarter of its length apart.
///
/// Fails with [`Error::CurveTooSparse`] when a segment is longer than a tenth
/// of the feature size the axis implies at its endpoints.
pub fn approximate_medial_axis(curves: &[&DiscreteCurve], mesh: Option<&TriMesh>) -> Result<MedialAxisApprox> {
    if curves.is_empty() {
        return Err(Error::invalid("no curve given"));
    }
    let axis = match mesh {
        None => planar_poles(curves)?,
        Some(mesh) => mesh_ridges(curves, mesh)?,
    };
    if !axis.is_empty() {
        for curve in curves {
            let lfs = distances_to_axis(curve, &axis)?;
            let seg = curve.segment_lengths();
            let n = curve.len();
            for k in 0..n {
                let limit = 0.1 * lfs[k].min(lfs[(k + 1) % n]);
                if seg[k] > limit {
                    return Err(Error::CurveTooSparse { segment: seg[k], limit });
                }
            }
        }
    }
    Ok(axis)
}

fn planar_poles(curves: &[&DiscreteCurve]) -> Result<MedialAxisApprox> {
    if curves.iter().any(|c| c.vertices.is_some()) {
        return Err(Error::invalid("mesh-borne curve given without its mesh"));
    }
    let mut points = Vec::new();
    let mut spacing = Vec::new();
    for c in curves {
        let seg = c.segment_lengths();
        let n = c.len();
        for k in 0..n {
            points.push([c.positions[k][0], c.positions[k][1]]);
            spacing.push(seg[k].max(seg[(k + n - 1) % n]));
        }
    }
    let mut poles = Vec::new();
    for [a, b, c] in crate::delaunay::triangulate(&points).unwrap_or_default() {
        if let Some((centre, r)) = crate::delaunay::circumcircle(points[a], points[b], points[c]) {
            if r > 2.0 * spacing[a].max(spacing[b]).max(spacing[c]) {
                poles.push([centre[0], centre[1], 0.0]);
            }
        }
    }
    Ok(MedialAxisApprox::from_points(poles))
}

fn mesh_ridges(curves: &[&DiscreteCurve], mesh: &TriMesh) -> Result<MedialAxisApprox> {
    // Source k of the propagation belongs to curve `index[k]` at arc length `arc[k]`.
    let mut sources = Vec::new();
    let mut index = Vec::new();
    let mut arc = Vec::new();
    let mut total = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        let verts = c
            .vertices
            .as_ref()
            .ok_or_else(|| Error::invalid("planar curve given with a mesh"))?;
        let seg = c.segment_lengths();
        let mut s = 0.0;
        for (k, &v) in verts.iter().enumerate() {
            sources.push(v);
            index.push(ci);
            arc.push(s);
            s += seg[k];
        }
        total.push(s);
    }
    let partition = geodesic::multi_source_propagate(mesh, &sources)?;
    let mut on_curve = vec![false; mesh.vertex_count()];
    for &v in &sources {
        on_curve[v] = true;
    }
    let far_apart = |a: usize, b: usize| -> bool {
        if index[a] != index[b] {
            return true;
        }
        let len = total[index[a]];
        let gap = (arc[a] - arc[b]).abs();
        gap.min(len - gap) >= 0.25 * len
    };
    let graph = mesh.edge_graph();
    let mut ridge = Vec::new();
    for v in 0..mesh.vertex_count() {
        if on_curve[v] || partition.label(v).is_none() {
            continue;
        }
        let mut labels: Vec<usize> = graph.neighbors(v).filter_map(|(w, _)| partition.label(w)).collect();
        labels.push(partition.labels[v]);
        let hit = (0..labels.len()).any(|i| (i + 1..labels.len()).any(|j| far_apart(labels[i], labels[j])));
        if hit {
            ridge.push(v);
        }
    }
    let field = if ridge.is_empty() {
        None
    } else {
        Some(geodesic::multi_source_propagate(mesh, &ridge)?.distances)
    };
    Ok(MedialAxisApprox {
        points: ridge.iter().map(|&v| mesh.position(v)).collect(),
        method: AxisMethod::MeshRidges,
        field,
    })
}

fn distance_to_axis(curve: &DiscreteCurve, axis: &MedialAxisApprox, i: usize) -> Result<f64> {
    match (&axis.field, &curve.vertices) {
        (Some(field), Some(verts)) => Ok(field[verts[i]]),
        (None, None) => {
            let p = curve.positions[i];
            Ok(axis.points.iter().map(|q| dist3(&p, q)).fold(f64::INFINITY, f64::min))
        }
        _ => Err(Error::invalid("curve and medial axis live in different domains")),
    }
}

fn distances_to_axis(curve: &DiscreteCurve, axis: &MedialAxisApprox) -> Result<Vec<f64>> {
    (0..curve.len()).map(|i| distance_to_axis(curve, axis, i)).collect()
}

/// Feature size of curve point `i`: its distance to the medial axis, clamped
/// above by `injectivity_bound` when one is given.
pub fn local_feature_size(
    curve: &DiscreteCurve,
    i: usize,
    axis: &MedialAxisApprox,
    injectivity_bound: Option<f64>,
) -> Result<f64> {
    if let Some(b) = injectivity_bound {
        if !(b > 0.0) {
            return Err(Error::invalid("injectivity bound must be positive"));
        }
    }
    match (axis.is_empty(), injectivity_bound) {
        (true, None) => Err(Error::UndefinedFeatureSize),
        (true, Some(b)) => Ok(b),
        (false, b) => Ok(distance_to_axis(curve, axis, i)?.min(b.unwrap_or(f64::INFINITY))),
    }
}

/// Per-point feature sizes of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSizes {
    pub values: Vec<f64>,
    pub injectivity_bound: Option<f64>,
}

pub fn local_feature_sizes(
    curve: &DiscreteCurve,
    axis: &MedialAxisApprox,
    injectivity_bound: Option<f64>,
) -> Result<FeatureSizes> {
    let values = (0..curve.len())
        .map(|i| local_feature_size(curve, i, axis, injectivity_bound))
        .collect::<Result<_>>()?;
    Ok(FeatureSizes {
        values,
        injectivity_bound,
    })
}

/// Checks that `samples` visits curve points in cyclic order: strictly
/// increasing except for at most one wrap past the start.
fn check_cyclic_subset(n: usize, samples: &[usize]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::invalid("at least two samples are needed"));
    }
    if let Some(&s) = samples.iter().find(|&&s| s >= n) {
        return Err(Error::invalid(format!("sample {s} out of range for a curve of {n} points")));
    }
    let k = samples.len();
    let descents = (0..k).filter(|&i| samples[(i + 1) % k] <= samples[i]).count();
    if descents != 1 {
        return Err(Error::invalid("samples do not follow the curve's cyclic order"));
    }
    Ok(())
}

/// Curve points of the interval from `a` forward to `b`, inclusive.
fn interval(n: usize, a: usize, b: usize) -> impl Iterator<Item = usize> {
    let len = (b + n - a) % n;
    let len = if len == 0 { n } else { len };
    (0..=len).map(move |k| (a + k) % n)
}

fn interval_rho(curve: &DiscreteCurve, lfs: &[f64], a: usize, b: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let mut reach = f64::INFINITY;
    for p in interval(curve.len(), a, b) {
        worst = worst.max(curve.distance(p, a).min(curve.distance(p, b)));
        reach = reach.min(lfs[p]);
    }
    if worst == 0.0 {
        0.0
    } else {
        worst / reach
    }
}

/// Outcome of the ρ-sampling check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoCheck {
    /// `per_interval[k]` covers samples `k` and `k + 1`: the largest distance
    /// from an interval point to its nearer endpoint, divided by the smallest
    /// feature size in the interval.
    pub per_interval: Vec<f64>,
    pub worst: f64,
    pub passed: bool,
}

/// Verifies that every curve point is closer to one of its interval's
/// endpoint samples than `rho` times the interval's reach.
pub fn check_rho_sampling(curve: &DiscreteCurve, samples: &[usize], lfs: &[f64], rho: f64) -> Result<RhoCheck> {
    let n = curve.len();
    check_cyclic_subset(n, samples)?;
    if lfs.len() != n {
        return Err(Error::invalid("one feature size per curve point is required"));
    }
    let k = samples.len();
    let per_interval: Vec<f64> = (0..k)
        .map(|i| interval_rho(curve, lfs, samples[i], samples[(i + 1) % k]))
        .collect();
    let worst = per_interval.iter().copied().fold(0.0, f64::max);
    Ok(RhoCheck {
        passed: per_interval.iter().all(|&r| r < rho),
        per_interval,
        worst,
    })
}

fn consecutive(order: &[usize], d: &DistanceMatrix) -> Vec<f64> {
    let k = order.len();
    (0..k).map(|i| d.get(order[i], order[(i + 1) % k])).collect()
}

/// Largest distance between cyclically consecutive samples, and whether all
/// of them are strictly below `theta`.
pub fn check_uniform_sampling(order: &[usize], d: &DistanceMatrix, theta: f64) -> Result<(bool, f64)> {
    if order.len() < 2 {
        return Err(Error::invalid("at least two samples are needed"));
    }
    let theta_max = consecutive(order, d).into_iter().fold(0.0, f64::max);
    Ok((theta_max < theta, theta_max))
}

/// Ratio of the longer to the shorter neighbouring gap at every sample of a
/// cyclic order; entry `i` belongs to `order[i]`.
pub fn nonuniformity_ratios(order: &[usize], d: &DistanceMatrix) -> Result<Vec<f64>> {
    let k = order.len();
    if k < 3 {
        return Err(Error::invalid("at least three samples are needed"));
    }
    let gaps = consecutive(order, d);
    if let Some(i) = gaps.iter().position(|&g| g == 0.0) {
        return Err(Error::invalid(format!(
            "samples {} and {} are at zero distance",
            order[i],
            order[(i + 1) % k]
        )));
    }
    Ok((0..k)
        .map(|i| {
            let (before, after) = (gaps[(i + k - 1) % k], gaps[i]);
            before.max(after) / before.min(after)
        })
        .collect())
}

/// Thresholds to judge a sampling against; absent ones are not judged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Thresholds {
    pub rho: Option<f64>,
    pub u: Option<f64>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts {
    pub rho_ok: Option<bool>,
    pub u_ok: Option<bool>,
    pub uniform_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingReport {
    pub rho_worst: f64,
    pub u_max: f64,
    pub theta_max: f64,
    pub lfs_min: f64,
    pub verdicts: Verdicts,
    pub thresholds: Thresholds,
    pub injectivity_bound: Option<f64>,
    /// Feature size at each sample.
    pub lfs: Vec<f64>,
    pub rho_values: Vec<f64>,
    pub u_values: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Evaluates every sampling measure of `samples` on `curve` and judges them
/// against `thresholds`.
pub fn analyze_sampling(
    curve: &DiscreteCurve,
    samples: &[usize],
    lfs: &FeatureSizes,
    thresholds: Thresholds,
) -> Result<SamplingReport> {
    let rho = check_rho_sampling(curve, samples, &lfs.values, thresholds.rho.unwrap_or(f64::INFINITY))?;
    let order: Vec<usize> = (0..samples.len()).collect();
    let d = curve.sample_distances(samples);
    let u_values = if samples.len() >= 3 {
        nonuniformity_ratios(&order, &d)?
    } else {
        Vec::new()
    };
    let u_max = u_values.iter().copied().fold(1.0, f64::max);
    let (_, theta_max) = check_uniform_sampling(&order, &d, f64::INFINITY)?;
    let sample_lfs: Vec<f64> = samples.iter().map(|&s| lfs.values[s]).collect();
    let mut warnings = Vec::new();
    if lfs.injectivity_bound.is_none() {
        warnings.push("no injectivity bound given; feature sizes are not clamped by it".to_string());
    }
    Ok(SamplingReport {
        rho_worst: rho.worst,
        u_max,
        theta_max,
        lfs_min: lfs.values.iter().copied().fold(f64::INFINITY, f64::min),
        verdicts: Verdicts {
            rho_ok: thresholds.rho.map(|_| rho.passed),
            u_ok: thresholds.u.map(|u| u_values.iter().all(|&x| x < u)),
            uniform_ok: thresholds.theta.map(|t| theta_max < t),
        },
        thresholds,
        injectivity_bound: lfs.injectivity_bound,
        lfs: sample_lfs,
        rho_values: rho.per_interval,
        u_values,
        warnings,
    })
}

const SEARCH_BUDGET: usize = 2_000_000;

/// Picks a sparse subset of curve points that is ρ-sampled with ratio below
/// `rho` and non-uniform with every ratio below `u`.
///
/// Starting at point 0, each step advances to the farthest point reachable
/// through a run of ρ-compliant intervals; when the spacing ratio or the
/// closing interval fails, the search backtracks to nearer candidates. The
/// result is re-verified before it is returned. It is not minimal.
pub fn subsample_curve(curve: &DiscreteCurve, lfs: &[f64], rho: f64, u: f64) -> Result<Vec<usize>> {
    let n = curve.len();
    if lfs.len() != n {
        return Err(Error::invalid("one feature size per curve point is required"));
    }
    if !(rho > 0.0 && u > 1.0) {
        return Err(Error::invalid("targets need rho > 0 and u > 1"));
    }
    let d = |a: usize, b: usize| curve.distance(a % n, b % n);
    let ratio_ok = |a: usize, b: usize, c: usize| {
        let (x, y) = (d(a, b), d(b, c));
        x.max(y) / x.min(y) < u
    };
    // Candidates from `c` in ascending order, so `pop` yields the farthest.
    let candidates = |c: usize| -> Vec<usize> {
        let mut out = Vec::new();
        for j in c + 1..n {
            if interval_rho(curve, lfs, c, j) < rho {
                out.push(j);
            } else {
                break;
            }
        }
        out
    };
    let closes = |chosen: &[usize]| -> bool {
        let c = *chosen.last().unwrap();
        let k = chosen.len();
        k >= 3
            && interval_rho(curve, lfs, c, 0) < rho
            && ratio_ok(chosen[k - 2], c, n)
            && ratio_ok(c, n, chosen[1])
    };

    let mut chosen = vec![0usize];
    let mut stack: Vec<Vec<usize>> = vec![candidates(0)];
    let mut budget = SEARCH_BUDGET;
    while let Some(top) = stack.last_mut() {
        if closes(&chosen) {
            let check = check_rho_sampling(curve, &chosen, lfs, rho)?;
            let order: Vec<usize> = (0..chosen.len()).collect();
            let ratios = nonuniformity_ratios(&order, &curve.sample_distances(&chosen))?;
            if check.passed && ratios.iter().all(|&r| r < u) {
                return Ok(chosen);
            }
            return Err(Error::Unsatisfiable("selected samples failed re-verification".into()));
        }
        budget = budget.saturating_sub(1);
        if budget == 0 {
            return Err(Error::Unsatisfiable("search budget exhausted".into()));
        }
        let c = *chosen.last().unwrap();
        let mut advanced = false;
        while let Some(j) = top.pop() {
            if chosen.len() >= 2 && !ratio_ok(chosen[chosen.len() - 2], c, j) {
                continue;
            }
            chosen.push(j);
            advanced = true;
            break;
        }
        if advanced {
            let next = candidates(*chosen.last().unwrap());
            stack.push(next);
        } else {
            stack.pop();
            chosen.pop();
        }
    }
    Err(Error::Unsatisfiable(format!(
        "no subset of the {n} curve points reaches rho < {rho} and u < {u}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(n: usize, r: f64) -> Vec<[f64; 2]> {
        (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect()
    }

    fn unit_axis() -> MedialAxisApprox {
        MedialAxisApprox::from_points(vec![[0.0; 3]])
    }

    #[test]
    fn circle_axis_clusters_at_centre() {
        let c = DiscreteCurve::planar(&circle(200, 1.0)).unwrap();
        let axis = approximate_medial_axis(&[&c], None).unwrap();
        assert!(!axis.is_empty());
        assert!(axis.points.iter().all(|p| dist3(p, &[0.0; 3]) < 0.05));
        let lfs = local_feature_sizes(&c, &axis, None).unwrap();
        let min = lfs.values.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((min - 1.0).abs() < 0.05, "{min}");
    }

    #[test]
    fn concentric_circles_axis_reaches_midway() {
        let inner = DiscreteCurve::planar(&circle(200, 1.0)).unwrap();
        let outer = DiscreteCurve::planar(&circle(600, 3.0)).unwrap();
        let axis = approximate_medial_axis(&[&inner, &outer], None).unwrap();
        let near_two = axis
            .points
            .iter()
            .filter(|p| (dist3(p, &[0.0; 3]) - 2.0).abs() < 0.1)
            .count();
        assert!(near_two > 50, "{near_two}");
    }

    #[test]
    fn sparse_circle_is_rejected() {
        let c = DiscreteCurve::planar(&circle(30, 1.0)).unwrap();
        assert!(matches!(
            approximate_medial_axis(&[&c], None),
            Err(Error::CurveTooSparse { .. })
        ));
    }

    #[test]
    fn feature_size_examples() {
        let c = DiscreteCurve::planar(&circle(16, 1.0)).unwrap();
        let axis = unit_axis();
        assert!((local_feature_size(&c, 3, &axis, None).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(local_feature_size(&c, 3, &axis, Some(0.5)).unwrap(), 0.5);
        let empty = MedialAxisApprox::from_points(Vec::new());
        assert!(matches!(
            local_feature_size(&c, 0, &empty, None),
            Err(Error::UndefinedFeatureSize)
        ));
        assert_eq!(local_feature_size(&c, 0, &empty, Some(2.0)).unwrap(), 2.0);
    }

    #[test]
    fn rho_examples_on_unit_circle() {
        let c = DiscreteCurve::planar(&circle(400, 1.0)).unwrap();
        let lfs = vec![1.0; 400];
        let all: Vec<usize> = (0..400).collect();
        let r = check_rho_sampling(&c, &all, &lfs, 1e-9).unwrap();
        assert!(r.passed);
        assert_eq!(r.worst, 0.0);

        let four = check_rho_sampling(&c, &[0, 100, 200, 300], &lfs, 1.0).unwrap();
        let chord = 2.0 * (PI / 8.0).sin();
        assert!(four.passed);
        assert!((four.worst - chord).abs() < 1e-12);

        let two = check_rho_sampling(&c, &[0, 200], &lfs, 1.0).unwrap();
        assert!(!two.passed);
        assert!((two.worst - 2f64.sqrt()).abs() < 1e-12);

        assert!(check_rho_sampling(&c, &[0, 200, 100], &lfs, 1.0).is_err());
        assert!(check_rho_sampling(&c, &[300, 0, 100], &lfs, 1.0).is_ok());
    }

    #[test]
    fn spacing_checks() {
        let d = DistanceMatrix::from_rows(vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let order = [0, 1, 2];
        assert_eq!(check_uniform_sampling(&order, &d, 1.1).unwrap(), (true, 1.0));
        assert_eq!(check_uniform_sampling(&order, &d, 1.0).unwrap(), (false, 1.0));
        assert_eq!(nonuniformity_ratios(&order, &d).unwrap(), vec![1.0; 3]);

        let pts: Vec<[f64; 2]> = vec![[0.0, 0.0], [2.0, 0.0], [3.0, 0.0], [3.0, 5.0]];
        let d = DistanceMatrix::from_fn(4, Execution::Sequential, |i, j| {
            dist3(&[pts[i][0], pts[i][1], 0.0], &[pts[j][0], pts[j][1], 0.0])
        });
        assert_eq!(nonuniformity_ratios(&[0, 1, 2, 3], &d).unwrap()[1], 2.0);
    }

    #[test]
    fn alternating_gaps_give_constant_ratio() {
        // Angles alternate between 1.5 and 1 units of arc.
        let mut angles = Vec::new();
        let mut a = 0.0;
        for i in 0..20 {
            angles.push(a);
            a += if i % 2 == 0 { 1.5 } else { 1.0 };
        }
        let scale = 2.0 * PI / a;
        let pts: Vec<[f64; 2]> = angles.iter().map(|t| [(t * scale).cos(), (t * scale).sin()]).collect();
        let c = DiscreteCurve::planar(&pts).unwrap();
        let order: Vec<usize> = (0..20).collect();
        let chord = |x: f64| 2.0 * (x * scale / 2.0).sin();
        let expected = chord(1.5) / chord(1.0);
        for r in nonuniformity_ratios(&order, c.distances()).unwrap() {
            assert!((r - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn subsample_targets() {
        let c = DiscreteCurve::planar(&circle(400, 1.0)).unwrap();
        let axis = approximate_medial_axis(&[&c], None).unwrap();
        let lfs = local_feature_sizes(&c, &axis, None).unwrap();
        let s = subsample_curve(&c, &lfs.values, 0.99, 1.99).unwrap();
        assert!(check_rho_sampling(&c, &s, &lfs.values, 0.99).unwrap().passed);
        let order: Vec<usize> = (0..s.len()).collect();
        assert!(nonuniformity_ratios(&order, &c.sample_distances(&s))
            .unwrap()
            .iter()
            .all(|&r| r < 1.99));

        let lax = subsample_curve(&c, &lfs.values, 10.0, 1.99).unwrap();
        assert!(lax.len() >= 3 && lax.len() < s.len());
    }

    #[test]
    fn tiny_rho_keeps_every_point() {
        let c = DiscreteCurve::planar(&circle(10, 1.0)).unwrap();
        let s = subsample_curve(&c, &[1.0; 10], 0.01, 1.5).unwrap();
        assert_eq!(s, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn report_serialises_fixed_fields() {
        let c = DiscreteCurve::planar(&circle(100, 1.0)).unwrap();
        let lfs = local_feature_sizes(&c, &unit_axis(), Some(5.0)).unwrap();
        let t = Thresholds {
            rho: Some(1.0),
            u: Some(2.0),
            theta: Some(1.0),
        };
        let r = analyze_sampling(&c, &[0, 20, 40, 60, 80], &lfs, t).unwrap();
        assert_eq!(r.verdicts.rho_ok, Some(true));
        assert_eq!(r.verdicts.u_ok, Some(true));
        assert!((r.u_max - 1.0).abs() < 1e-12);
        assert_eq!(r.verdicts.uniform_ok, Some(r.theta_max < 1.0));
        let v = serde_json::to_value(&r).unwrap();
        for key in ["rho_worst", "u_max", "theta_max", "lfs_min", "verdicts"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn mesh_latitude_axis_sits_at_the_poles() {
        let m = crate::shapes::icosphere(4);
        let z0: f64 = 0.35;
        let r = (1.0 - z0 * z0).sqrt();
        let pts: Vec<Point3> = (0..400)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 400.0;
                [r * a.cos(), r * a.sin(), z0]
            })
            .collect();
        let verts = crate::shapes::trace_closed_curve(&m, &pts).unwrap();
        let c = DiscreteCurve::on_mesh(&m, &verts, Execution::Parallel).unwrap();
        let axis = approximate_medial_axis(&[&c], Some(&m)).unwrap();
        assert!(!axis.is_empty());
        for p in &axis.points {
            assert!(p[2].abs() > 0.9, "{p:?}");
        }
        let lfs = local_feature_sizes(&c, &axis, None).unwrap();
        let expected = z0.acos();
        let min = lfs.values.iter().copied().fold(f64::INFINITY, f64::min);
        // Graph distances near the poles blur the ridge, so the estimate
        // errs low; a low feature size only makes the conditions stricter.
        assert!(min <= 1.05 * expected && min >= 0.8 * expected, "{min} vs {expected}");
    }
}
