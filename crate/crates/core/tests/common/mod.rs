//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigdv::metric::{EuclideanPoints, MetricPointSet, RigidMotionSample};
use sigdv::pipeline::{self, Mode, Options, ReconstructionResult};
use sigdv::sampling::{self, DiscreteCurve};
use sigdv::{shapes, DistanceMatrix, Execution, TriMesh};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense closed curve with per-point feature sizes and a sparse sampling
/// whose cyclic order is the ground truth.
pub struct CurveFixture {
    pub name: &'static str,
    pub curve: DiscreteCurve,
    pub mesh: Option<TriMesh>,
    /// Feature size per dense point, clamped by the injectivity bound.
    pub lfs: Vec<f64>,
    /// Dense point indices of the samples, in curve order.
    pub samples: Vec<usize>,
}

impl CurveFixture {
    pub fn sample_vertices(&self) -> Vec<usize> {
        let v = self.curve.vertices().expect("mesh fixture");
        self.samples.iter().map(|&i| v[i]).collect()
    }

    pub fn sample_points(&self) -> EuclideanPoints {
        let p = self.curve.positions();
        EuclideanPoints::planar(&self.samples.iter().map(|&i| [p[i][0], p[i][1]]).collect::<Vec<_>>())
    }

    pub fn reconstruct(&self, mode: Mode) -> ReconstructionResult {
        let opts = Options {
            mode,
            ..Options::default()
        };
        match &self.mesh {
            Some(m) => pipeline::reconstruct_mesh(m, &self.sample_vertices(), &opts).unwrap(),
            None => pipeline::reconstruct_points(&self.sample_points(), &opts).unwrap(),
        }
    }

    /// Worst interval ratio and worst spacing ratio of the sampling.
    pub fn sampling_measures(&self) -> (f64, f64) {
        let rho = sampling::check_rho_sampling(&self.curve, &self.samples, &self.lfs, f64::INFINITY).unwrap();
        let order: Vec<usize> = (0..self.samples.len()).collect();
        let u = sampling::nonuniformity_ratios(&order, &self.curve.sample_distances(&self.samples)).unwrap();
        (rho.worst, u.into_iter().fold(1.0, f64::max))
    }
}

/// `k` curve indices spread evenly by arc length, each displaced by up to
/// `jitter` of the spacing, with a random global phase.
pub fn jittered_samples(curve: &DiscreteCurve, k: usize, jitter: f64, seed: u64) -> Vec<usize> {
    let seg = curve.segment_lengths();
    let mut arc = Vec::with_capacity(seg.len());
    let mut s = 0.0;
    for l in &seg {
        arc.push(s);
        s += l;
    }
    let total = s;
    let spacing = total / k as f64;
    let mut r = rng(seed);
    let phase = r.gen_range(0.0..spacing);
    let mut out: Vec<usize> = (0..k)
        .map(|i| {
            let t = (phase + spacing * (i as f64 + r.gen_range(-jitter..=jitter))).rem_euclid(total);
            let j = arc.partition_point(|&a| a <= t) - 1;
            if j + 1 < arc.len() && arc[j + 1] - t < t - arc[j] {
                j + 1
            } else {
                j
            }
        })
        .collect();
    // Rotate so the list starts at its smallest index; keeps curve order.
    let m = (0..k).min_by_key(|&i| out[i]).unwrap();
    out.rotate_left(m);
    out
}

pub const SAMPLING_RHO: f64 = 0.9;
pub const SAMPLING_U: f64 = 1.9;

/// First jittered sampling, in a deterministic sequence of draws, that the
/// sampling checker accepts at `SAMPLING_RHO` and `SAMPLING_U`.
pub fn verified_samples(curve: &DiscreteCurve, lfs: &[f64], k: usize, seed: u64) -> Vec<usize> {
    for attempt in 0..1000 {
        let samples = jittered_samples(curve, k, 0.15, seed.wrapping_mul(1000).wrapping_add(attempt));
        let order: Vec<usize> = (0..k).collect();
        let rho_ok = sampling::check_rho_sampling(curve, &samples, lfs, SAMPLING_RHO).unwrap().passed;
        let u_max = sampling::nonuniformity_ratios(&order, &curve.sample_distances(&samples))
            .unwrap()
            .into_iter()
            .fold(1.0, f64::max);
        if rho_ok && u_max < SAMPLING_U {
            return samples;
        }
    }
    panic!("no accepted sampling");
}

pub const LATITUDE_Z: f64 = 0.35;

/// Latitude circle on a unit icosphere; the feature size at a point is its
/// angular distance to the nearer pole.
pub fn icosphere_latitude(seed: u64) -> CurveFixture {
    let mesh = shapes::icosphere(4);
    let r = (1.0 - LATITUDE_Z * LATITUDE_Z).sqrt();
    let pts: Vec<[f64; 3]> = (0..720)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / 720.0;
            [r * a.cos(), r * a.sin(), LATITUDE_Z]
        })
        .collect();
    let verts = shapes::trace_closed_curve(&mesh, &pts).unwrap();
    let curve = DiscreteCurve::on_mesh(&mesh, &verts, Execution::Parallel).unwrap();
    let lfs: Vec<f64> = verts
        .iter()
        .map(|&v| {
            let a = mesh.position(v)[2].clamp(-1.0, 1.0).acos();
            a.min(PI - a)
        })
        .collect();
    let samples = verified_samples(&curve, &lfs, 10, seed);
    CurveFixture {
        name: "icosphere latitude",
        curve,
        mesh: Some(mesh),
        lfs,
        samples,
    }
}

pub const TORUS_MAJOR: f64 = 2.0;
pub const TORUS_MINOR: f64 = 0.75;
/// Half the meridian length, a lower bound on the torus's injectivity radius.
pub const TORUS_INJECTIVITY: f64 = 2.3;

/// Top ring of a torus. Its medial axis is empty, so the feature size is the
/// injectivity bound alone.
pub fn torus_ring(seed: u64) -> CurveFixture {
    let (n_major, n_minor) = (96, 32);
    let mesh = shapes::torus(TORUS_MAJOR, TORUS_MINOR, n_major, n_minor);
    let verts: Vec<usize> = (0..n_major).map(|i| i * n_minor + n_minor / 4).collect();
    let curve = DiscreteCurve::on_mesh(&mesh, &verts, Execution::Parallel).unwrap();
    let lfs = vec![TORUS_INJECTIVITY; n_major];
    let samples = verified_samples(&curve, &lfs, 10, seed);
    CurveFixture {
        name: "torus ring",
        curve,
        mesh: Some(mesh),
        lfs,
        samples,
    }
}

/// Planar loop `r = 1 + 0.15 sin 5φ` with feature sizes from the pole
/// approximation of its medial axis.
pub fn wavy_loop(seed: u64) -> CurveFixture {
    let n = 2000;
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            let r = 1.0 + 0.15 * (5.0 * a).sin();
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    let curve = DiscreteCurve::planar(&pts).unwrap();
    let axis = sampling::approximate_medial_axis(&[&curve], None).unwrap();
    let lfs = sampling::local_feature_sizes(&curve, &axis, None).unwrap().values;
    let samples = verified_samples(&curve, &lfs, 40, seed);
    CurveFixture {
        name: "planar wavy loop",
        curve,
        mesh: None,
        lfs,
        samples,
    }
}

pub fn curve_fixtures(seed: u64) -> Vec<CurveFixture> {
    vec![icosphere_latitude(seed), torus_ring(seed), wavy_loop(seed)]
}

/// Point at arc length `s` along a stadium: two straights of length
/// `straight` joined by half circles of radius `half_width`.
fn stadium_point(s: f64, half_width: f64, straight: f64) -> [f64; 2] {
    let w = half_width;
    let s = s.rem_euclid(2.0 * straight + 2.0 * PI * w);
    if s < straight {
        return [s, w];
    }
    let s = s - straight;
    if s < PI * w {
        let a = PI / 2.0 - s / w;
        return [straight + w * a.cos(), w * a.sin()];
    }
    let s = s - PI * w;
    if s < straight {
        return [straight - s, -w];
    }
    let a = -PI / 2.0 - (s - straight) / w;
    [w * a.cos(), w * a.sin()]
}

/// Closed rigid motion along a narrow loop whose two turns bring the outward
/// and return legs close together, sparsely sampled with uneven gaps and a
/// small yaw oscillation. Poses are in ground-truth order.
pub fn two_turn_motion(seed: u64) -> Vec<RigidMotionSample> {
    let (w, straight) = (0.175, 3.0);
    let total = 2.0 * straight + 2.0 * PI * w;
    let mut r = rng(seed);
    let mut gaps = Vec::new();
    let mut acc = 0.0;
    while acc < total {
        let g = r.gen_range(0.45..0.65);
        gaps.push(g);
        acc += g;
    }
    let scale = total / acc;
    let mut s = 0.0;
    gaps.iter()
        .map(|g| {
            let p = stadium_point(s, w, straight);
            let yaw = 0.3 * (2.0 * PI * s / total).sin();
            s += g * scale;
            RigidMotionSample::new([(yaw / 2.0).cos(), 0.0, 0.0, (yaw / 2.0).sin()], [p[0], p[1], 0.0]).unwrap()
        })
        .collect()
}

/// Dumbbell-shaped closed curve traced on a flat grid mesh.
pub struct Dumbbell {
    pub mesh: TriMesh,
    curve: Vec<usize>,
    arc: Vec<f64>,
}

impl Dumbbell {
    const CENTER: [f64; 2] = [2.2, 1.4];

    pub fn new() -> Self {
        let mesh = shapes::grid(4.4, 2.8, 220, 140);
        let [cx, cy] = Self::CENTER;
        let pts: Vec<[f64; 3]> = (0..2000)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 2000.0;
                [cx + 1.6 * t.cos(), cy + t.sin() * (0.1 + 0.9 * t.cos().powi(2)), 0.0]
            })
            .collect();
        let curve = shapes::trace_closed_curve(&mesh, &pts).unwrap();
        let n = curve.len();
        let mut arc = vec![0.0];
        for i in 0..n {
            let (p, q) = (mesh.position(curve[i]), mesh.position(curve[(i + 1) % n]));
            arc.push(arc[i] + ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
        }
        Dumbbell { mesh, curve, arc }
    }

    /// Mesh vertices in curve order: gaps of 0.18 within the neck and 0.32
    /// on the lobes, from a random starting point.
    pub fn samples(&self, seed: u64) -> Vec<usize> {
        let (dense, sparse, neck) = (0.18, 0.32, 0.5);
        let n = self.curve.len();
        let total = self.arc[n];
        let mut s = rng(seed).gen_range(0.0..sparse);
        let end = s + total - 0.5 * dense;
        let mut out = Vec::new();
        while s < end {
            let j = (self.arc.partition_point(|&x| x <= s.rem_euclid(total)) - 1).min(n - 1);
            let v = self.curve[j];
            out.push(v);
            let x = self.mesh.position(v)[0] - Self::CENTER[0];
            s += if x.abs() < neck { dense } else { sparse };
        }
        out
    }
}

pub fn random_points(r: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| r.gen_range(0.0..1.0)).collect()).collect()
}

pub fn planar_matrix(p: &[[f64; 2]]) -> DistanceMatrix {
    EuclideanPoints::planar(p).distance_matrix(Execution::Sequential)
}

// ---------------------------------------------------------------- oracles

/// Delaunay edges by the empty-circumcircle test over all triples.
pub fn brute_force_delaunay(p: &[[f64; 2]]) -> BTreeSet<(usize, usize)> {
    // Positive when `d` lies inside the circle through counter-clockwise a, b, c.
    fn in_circle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> f64 {
        let (adx, ady) = (a[0] - d[0], a[1] - d[1]);
        let (bdx, bdy) = (b[0] - d[0], b[1] - d[1]);
        let (cdx, cdy) = (c[0] - d[0], c[1] - d[1]);
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady)
            + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    }
    let n = p.len();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let orient = (p[j][0] - p[i][0]) * (p[l][1] - p[i][1]) - (p[j][1] - p[i][1]) * (p[l][0] - p[i][0]);
                if orient.abs() < 1e-14 {
                    continue;
                }
                let (b, c) = if orient > 0.0 { (j, l) } else { (l, j) };
                let empty = (0..n)
                    .filter(|&m| m != i && m != j && m != l)
                    .all(|m| in_circle(p[i], p[b], p[c], p[m]) <= 0.0);
                if empty {
                    edges.extend([(i, j), (i, l), (j, l)]);
                }
            }
        }
    }
    edges
}

/// Exact shortest closed tour length by Held–Karp dynamic programming.
pub fn held_karp(d: &DistanceMatrix) -> f64 {
    let n = d.len();
    assert!((2..=16).contains(&n));
    let full = 1usize << (n - 1);
    // best[mask][j]: shortest path from 0 through `mask` (bits for 1..n) ending at j.
    let mut best = vec![vec![f64::INFINITY; n]; full];
    for j in 1..n {
        best[1 << (j - 1)][j] = d.get(0, j);
    }
    for mask in 1..full {
        for j in 1..n {
            let cur = best[mask][j];
            if mask & (1 << (j - 1)) == 0 || !cur.is_finite() {
                continue;
            }
            for k in 1..n {
                if mask & (1 << (k - 1)) == 0 {
                    let next = mask | (1 << (k - 1));
                    let cand = cur + d.get(j, k);
                    if cand < best[next][k] {
                        best[next][k] = cand;
                    }
                }
            }
        }
    }
    (1..n).map(|j| best[full - 1][j] + d.get(j, 0)).fold(f64::INFINITY, f64::min)
}

/// Exact shortest closed tour length by trying every permutation.
pub fn brute_force_tour(d: &DistanceMatrix) -> f64 {
    fn go(d: &DistanceMatrix, path: &mut Vec<usize>, used: &mut [bool], len: f64, best: &mut f64) {
        let n = d.len();
        if path.len() == n {
            *best = best.min(len + d.get(*path.last().unwrap(), path[0]));
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                let last = *path.last().unwrap();
                path.push(v);
                go(d, path, used, len + d.get(last, v), best);
                path.pop();
                used[v] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; d.len()];
    used[0] = true;
    go(d, &mut vec![0], &mut used, 0.0, &mut best);
    best
}

/// True when some pair of tour edges can be exchanged for a shorter tour.
pub fn has_improving_swap(order: &[usize], d: &DistanceMatrix, rel_tol: f64) -> bool {
    let n = order.len();
    let len: f64 = (0..n).map(|i| d.get(order[i], order[(i + 1) % n])).sum();
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (order[i], order[(i + 1) % n]);
            let (c, e) = (order[j], order[(j + 1) % n]);
            if a == c || a == e || b == c || b == e {
                continue;
            }
            let delta = d.get(a, c) + d.get(b, e) - d.get(a, b) - d.get(c, e);
            if delta < -rel_tol * len {
                return true;
            }
        }
    }
    false
}

/// Spheres-of-influence edges straight from the definition: discs of
/// nearest-neighbour radius around each point that touch or overlap.
pub fn sig_oracle(points: &[Vec<f64>]) -> BTreeSet<(usize, usize)> {
    let n = points.len();
    let dist = |i: usize, j: usize| -> f64 {
        points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    };
    let radius: Vec<f64> = (0..n)
        .map(|i| {
            let mut ds: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist(i, j)).collect();
            ds.sort_by(f64::total_cmp);
            ds[0]
        })
        .collect();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if dist(i, j) <= radius[i] + radius[j] {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Every labelled tree on `n` nodes, via Prüfer sequences.
pub fn all_spanning_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![Vec::new()];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let total = n.pow((n - 2) as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut seq = Vec::with_capacity(n - 2);
        let mut c = code;
        for _ in 0..n - 2 {
            seq.push(c % n);
            c /= n;
        }
        let mut degree = vec![1usize; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf.min(s), leaf.max(s)));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

/// Smallest relative clearance `|m - o| / r - 1` of any other point `m` from
/// the circumcircle `(o, r)` of an empty-circle triangle. Large values mean
/// the Delaunay triangulation is far from degenerate.
pub fn delaunay_clearance(p: &[[f64; 2]]) -> f64 {
    let n = p.len();
    let mut worst = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let (a, b, c) = (p[i], p[j], p[l]);
                let den = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
                if den.abs() < 1e-14 {
                    continue;
                }
                let sq = |q: [f64; 2]| q[0] * q[0] + q[1] * q[1];
                let ox = (sq(a) * (b[1] - c[1]) + sq(b) * (c[1] - a[1]) + sq(c) * (a[1] - b[1])) / den;
                let oy = (sq(a) * (c[0] - b[0]) + sq(b) * (a[0] - c[0]) + sq(c) * (b[0] - a[0])) / den;
                let r = ((a[0] - ox).powi(2) + (a[1] - oy).powi(2)).sqrt();
                let nearest = (0..n)
                    .filter(|&m| m != i && m != j && m != l)
                    .map(|m| ((p[m][0] - ox).powi(2) + (p[m][1] - oy).powi(2)).sqrt() / r - 1.0)
                    .fold(f64::INFINITY, f64::min);
                if nearest >= 0.0 {
                    worst = worst.min(nearest);
                }
            }
        }
    }
    worst
}
