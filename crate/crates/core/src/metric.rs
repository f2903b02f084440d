//! Metric spaces the reconstruction runs in: Euclidean point sets and rigid
//! motions (unit quaternion plus translation), together with witness-based
//! Voronoi adjacency for spaces without an exact Delaunay construction.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::{EdgeTag, ProximityGraph};
use crate::par::{self, Execution};

/// Finite point set with a metric.
pub trait MetricPointSet: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn distance(&self, i: usize, j: usize) -> f64;

    /// Exact Voronoi adjacency, for backends that can compute one.
    fn dual_adjacency(&self) -> Option<Result<ProximityGraph>> {
        None
    }

    fn distance_matrix(&self, exec: Execution) -> DistanceMatrix {
        DistanceMatrix::from_fn(self.len(), exec, |i, j| self.distance(i, j))
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Points in R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanPoints {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl EuclideanPoints {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::invalid("point set is empty or zero-dimensional"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::invalid(format!("point {i} has {} coordinates, expected {dim}", p.len())));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(EuclideanPoints { dim, points })
    }

    pub fn planar(points: &[[f64; 2]]) -> Self {
        EuclideanPoints {
            dim: 2,
            points: points.iter().map(|p| p.to_vec()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        EuclideanPoints {
            dim: self.dim,
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }
}

impl MetricPointSet for EuclideanPoints {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(&self.points[i], &self.points[j])
    }

    /// Delaunay edges in the plane; `None` in other dimensions.
    fn dual_adjacency(&self) -> Option<Result<ProximityGraph>> {
        if self.dim != 2 {
            return None;
        }
        let pts: Vec<[f64; 2]> = self.points.iter().map(|p| [p[0], p[1]]).collect();
        let mut g = ProximityGraph::new(pts.len());
        for (a, b) in crate::delaunay::edges(&pts) {
            if let Err(e) = g.add_edge(a, b, self.distance(a, b), EdgeTag::DualVoronoi) {
                return Some(Err(e));
            }
        }
        Some(Ok(g))
    }
}

/// Unit quaternion `(w, x, y, z)`.
pub type Quaternion = [f64; 4];

const UNIT_TOL: f64 = 1e-6;

fn check_unit(q: &Quaternion) -> Result<f64> {
    let norm = q.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitQuaternion(norm));
    }
    Ok(norm)
}

/// Normalises `q` and picks the representative with `w > 0`; for `w = 0`
/// the first nonzero of `x, y, z` is made positive.
pub fn canonicalize(q: Quaternion) -> Result<Quaternion> {
    let norm = check_unit(&q)?;
    // Already-normalised input is left bit-for-bit alone so that the
    // operation is idempotent.
    let mut q = if (norm - 1.0).abs() > 4.0 * f64::EPSILON {
        q.map(|c| c / norm)
    } else {
        q
    };
    let lead = q.iter().copied().find(|&c| c != 0.0).unwrap_or(1.0);
    if lead < 0.0 {
        q = q.map(|c| -c);
    }
    Ok(q)
}

/// Rotation angle between two orientations, `2 acos(<p, q>)`.
pub fn so3_distance(p: &Quaternion, q: &Quaternion) -> Result<f64> {
    check_unit(p)?;
    check_unit(q)?;
    Ok(so3_angle(p, q))
}

fn so3_angle(p: &Quaternion, q: &Quaternion) -> f64 {
    let dot: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
    2.0 * dot.clamp(-1.0, 1.0).acos()
}

/// Hamilton product.
pub fn quat_mul(a: &Quaternion, b: &Quaternion) -> Quaternion {
    let [aw, ax, ay, az] = *a;
    let [bw, bx, by, bz] = *b;
    [
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ]
}

/// Row-major rotation matrix of a unit quaternion.
pub fn rotation_matrix(q: &Quaternion) -> [[f64; 3]; 3] {
    let [w, x, y, z] = *q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// Spherical interpolation along the shorter arc.
pub fn slerp(p: &Quaternion, q: &Quaternion, t: f64) -> Quaternion {
    let mut dot: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
    let mut q = *q;
    if dot < 0.0 {
        q = q.map(|c| -c);
        dot = -dot;
    }
    let out = if dot > 1.0 - 1e-12 {
        std::array::from_fn(|k| p[k] + t * (q[k] - p[k]))
    } else {
        let omega = dot.min(1.0).acos();
        let s = omega.sin();
        let (wp, wq) = (((1.0 - t) * omega).sin() / s, (t * omega).sin() / s);
        std::array::from_fn(|k| wp * p[k] + wq * q[k])
    };
    let n = out.iter().map(|c: &f64| c * c).sum::<f64>().sqrt();
    out.map(|c| c / n)
}

/// Pose: orientation plus position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotionSample {
    pub rotation: Quaternion,
    pub translation: [f64; 3],
}

impl RigidMotionSample {
    pub fn new(rotation: Quaternion, translation: [f64; 3]) -> Result<Self> {
        if translation.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("pose translation is not finite"));
        }
        Ok(RigidMotionSample {
            rotation: canonicalize(rotation)?,
            translation,
        })
    }

    pub fn identity() -> Self {
        RigidMotionSample {
            rotation: [1.0, 0.0, 0.0, 0.0],
            translation: [0.0; 3],
        }
    }

    /// Orientation and position interpolated at `t` in `[0, 1]`.
    pub fn interpolate(&self, other: &Self, t: f64) -> Self {
        let rotation = canonicalize(slerp(&self.rotation, &other.rotation, t)).expect("slerp output is unit");
        let translation = std::array::from_fn(|k| self.translation[k] + t * (other.translation[k] - self.translation[k]));
        RigidMotionSample { rotation, translation }
    }
}

/// Weighted product metric on orientation angle and position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Se3Metric {
    w_rot: f64,
    w_tr: f64,
}

impl Default for Se3Metric {
    fn default() -> Self {
        Se3Metric { w_rot: 1.0, w_tr: 1.0 }
    }
}

impl Se3Metric {
    pub fn new(w_rot: f64, w_tr: f64) -> Result<Self> {
        if !(w_rot >= 0.0 && w_tr >= 0.0) || !w_rot.is_finite() || !w_tr.is_finite() {
            return Err(Error::invalid("metric weights must be finite and non-negative"));
        }
        if w_rot == 0.0 && w_tr == 0.0 {
            return Err(Error::invalid("at least one metric weight must be positive"));
        }
        Ok(Se3Metric { w_rot, w_tr })
    }

    pub fn w_rot(&self) -> f64 {
        self.w_rot
    }

    pub fn w_tr(&self) -> f64 {
        self.w_tr
    }

    /// `sqrt(w_rot θ² + w_tr |Δt|²)`.
    pub fn distance(&self, a: &RigidMotionSample, b: &RigidMotionSample) -> f64 {
        let theta = so3_angle(&a.rotation, &b.rotation);
        let dt2: f64 = (0..3).map(|k| (a.translation[k] - b.translation[k]).powi(2)).sum();
        (self.w_rot * theta * theta + self.w_tr * dt2).sqrt()
    }

    /// Translation scale for [`embed_se3_r7`]. The quaternion chord between
    /// nearby orientations is about half the rotation angle, so translations
    /// are scaled by half the weight ratio to keep the two parts in balance.
    pub fn embedding_scale(&self) -> Result<f64> {
        if self.w_rot == 0.0 {
            return Err(Error::invalid("the R^7 embedding needs a positive rotation weight"));
        }
        Ok((self.w_tr / self.w_rot).sqrt() / 2.0)
    }

    /// Approximation of [`Se3Metric::distance`] through the R^7 embedding,
    /// accurate for small rotations.
    pub fn embedded_distance(&self, a: &RigidMotionSample, b: &RigidMotionSample) -> Result<f64> {
        let beta = self.embedding_scale()?;
        Ok(2.0 * self.w_rot.sqrt() * euclidean(&embed_se3_r7(a, beta), &embed_se3_r7(b, beta)))
    }
}

/// `(q_w, q_x, q_y, q_z, β t_x, β t_y, β t_z)`.
pub fn embed_se3_r7(s: &RigidMotionSample, beta: f64) -> [f64; 7] {
    let [w, x, y, z] = s.rotation;
    let [tx, ty, tz] = s.translation;
    [w, x, y, z, beta * tx, beta * ty, beta * tz]
}

/// Poses under an [`Se3Metric`].
#[derive(Debug, Clone, PartialEq)]
pub struct PoseSet {
    pub poses: Vec<RigidMotionSample>,
    pub metric: Se3Metric,
}

impl PoseSet {
    pub fn new(poses: Vec<RigidMotionSample>, metric: Se3Metric) -> Self {
        PoseSet { poses, metric }
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        PoseSet {
            poses: indices.iter().map(|&i| self.poses[i]).collect(),
            metric: self.metric,
        }
    }
}

impl MetricPointSet for PoseSet {
    fn len(&self) -> usize {
        self.poses.len()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.metric.distance(&self.poses[i], &self.poses[j])
    }
}

/// Default relative bisector tolerance for witness adjacency.
pub const DEFAULT_BISECTOR_TOLERANCE: f64 = 0.25;

/// Voronoi adjacency estimated from witnesses.
///
/// For each witness the two nearest samples `a`, `b` are found (ties to the
/// lower index). They are joined when the witness lies near their bisector:
/// `d(w, b) - d(w, a) < tau * d(a, b)`. Edge weights are `sample_distance`.
pub fn witness_dual_voronoi<W, F, G>(
    sample_count: usize,
    witnesses: &[W],
    witness_distance: F,
    sample_distance: G,
    tau: f64,
    exec: Execution,
) -> Result<ProximityGraph>
where
    W: Sync,
    F: Fn(&W, usize) -> f64 + Sync + Send,
    G: Fn(usize, usize) -> f64,
{
    if witnesses.is_empty() {
        return Err(Error::invalid("witness set is empty"));
    }
    if !(tau > 0.0) {
        return Err(Error::invalid("bisector tolerance must be positive"));
    }
    let mut g = ProximityGraph::new(sample_count);
    if sample_count < 2 {
        return Ok(g);
    }
    let pairs = par::map_slice(witnesses, exec, |w| {
        let (mut a, mut da, mut b, mut db) = (usize::MAX, f64::INFINITY, usize::MAX, f64::INFINITY);
        for s in 0..sample_count {
            let d = witness_distance(w, s);
            if d < da {
                (b, db) = (a, da);
                (a, da) = (s, d);
            } else if d < db {
                (b, db) = (s, d);
            }
        }
        (b != usize::MAX && db.is_finite()).then_some((a.min(b), a.max(b), db - da))
    });
    let mut accepted = BTreeSet::new();
    for (a, b, gap) in pairs.into_iter().flatten() {
        if !accepted.contains(&(a, b)) && gap < tau * sample_distance(a, b) {
            accepted.insert((a, b));
        }
    }
    for (a, b) in accepted {
        g.add_edge(a, b, sample_distance(a, b), EdgeTag::DualVoronoi)?;
    }
    Ok(g)
}

/// Witness adjacency for Euclidean samples and witnesses.
pub fn euclidean_witness_graph(
    samples: &EuclideanPoints,
    witnesses: &[Vec<f64>],
    tau: f64,
    exec: Execution,
) -> Result<ProximityGraph> {
    if let Some(w) = witnesses.iter().find(|w| w.len() != samples.dim()) {
        return Err(Error::invalid(format!(
            "witness has {} coordinates, samples have {}",
            w.len(),
            samples.dim()
        )));
    }
    witness_dual_voronoi(
        samples.len(),
        witnesses,
        |w, s| euclidean(w, samples.point(s)),
        |a, b| samples.distance(a, b),
        tau,
        exec,
    )
}

/// Space in which pose witnesses are compared with samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WitnessSpace {
    /// The weighted SE(3) metric itself.
    #[default]
    Se3,
    /// Euclidean distance between R^7 embeddings.
    R7,
}

/// Witness adjacency for poses. Edge weights always use the SE(3) metric.
pub fn pose_witness_graph(
    samples: &PoseSet,
    witnesses: &[RigidMotionSample],
    space: WitnessSpace,
    tau: f64,
    exec: Execution,
) -> Result<ProximityGraph> {
    let sample_distance = |a: usize, b: usize| samples.distance(a, b);
    match space {
        WitnessSpace::Se3 => witness_dual_voronoi(
            samples.len(),
            witnesses,
            |w, s| samples.metric.distance(w, &samples.poses[s]),
            sample_distance,
            tau,
            exec,
        ),
        WitnessSpace::R7 => {
            let beta = samples.metric.embedding_scale()?;
            let emb: Vec<[f64; 7]> = samples.poses.iter().map(|p| embed_se3_r7(p, beta)).collect();
            let wit: Vec<[f64; 7]> = witnesses.iter().map(|p| embed_se3_r7(p, beta)).collect();
            // Gaps are measured in the embedding, so compare against the
            // embedded sample distance rather than the SE(3) one.
            let embedded = witness_dual_voronoi(
                samples.len(),
                &wit,
                |w, s| euclidean(w, &emb[s]),
                |a, b| euclidean(&emb[a], &emb[b]),
                tau,
                exec,
            )?;
            let mut g = ProximityGraph::new(samples.len());
            for e in embedded.edges() {
                g.add_edge(e.a, e.b, sample_distance(e.a, e.b), EdgeTag::DualVoronoi)?;
            }
            Ok(g)
        }
    }
}

/// Parameters for synthesising pose witnesses when no dense trace is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessParams {
    /// Each pose is interpolated towards this many nearest poses.
    pub neighbors: usize,
    /// Interpolation steps per pose pair.
    pub steps: usize,
    pub seed: u64,
}

impl Default for WitnessParams {
    fn default() -> Self {
        WitnessParams {
            neighbors: 3,
            steps: 16,
            seed: 0,
        }
    }
}

/// Witnesses along interpolation paths between every pose and its nearest
/// poses. Each of the `steps` parameter bins receives one witness at a
/// seeded random position inside the bin.
pub fn interpolated_pose_witnesses(samples: &PoseSet, params: WitnessParams) -> Vec<RigidMotionSample> {
    let n = samples.len();
    let mut pairs = BTreeSet::new();
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (samples.distance(i, j), j)).collect();
        others.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for &(_, j) in others.iter().take(params.neighbors) {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut out = Vec::with_capacity(pairs.len() * params.steps);
    for (i, j) in pairs {
        for s in 0..params.steps {
            let t = (s as f64 + rng.gen::<f64>()) / params.steps as f64;
            out.push(samples.poses[i].interpolate(&samples.poses[j], t));
        }
    }
    out
}
