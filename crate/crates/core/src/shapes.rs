//! Procedural meshes and curve tracing used by tests, benches and demos.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::geodesic;
use crate::mesh::{Point3, TriMesh};

fn normalize(p: Point3) -> Point3 {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}

/// Unit icosphere obtained by `subdivisions` rounds of midpoint subdivision
/// of the icosahedron. Level `l` has `10 * 4^l + 2` vertices.
pub fn icosphere(subdivisions: u32) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalize)
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Point3>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(normalize([
                    (p[0] + q[0]) / 2.0,
                    (p[1] + q[1]) / 2.0,
                    (p[2] + q[2]) / 2.0,
                ]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriMesh::new(vertices, faces).expect("icosphere is well formed")
}

/// Torus around the z axis with tube centre radius `major` and tube radius
/// `minor`, sampled on a `n_major x n_minor` parameter grid.
///
/// Vertex `i * n_minor + j` sits at toroidal angle `2πi/n_major` and tube
/// angle `2πj/n_minor`, with tube angle 0 on the outer equator and π/2 on top.
pub fn torus(major: f64, minor: f64, n_major: usize, n_minor: usize) -> TriMesh {
    let mut vertices = Vec::with_capacity(n_major * n_minor);
    for i in 0..n_major {
        let u = 2.0 * PI * i as f64 / n_major as f64;
        for j in 0..n_minor {
            let v = 2.0 * PI * j as f64 / n_minor as f64;
            let r = major + minor * v.cos();
            vertices.push([r * u.cos(), r * u.sin(), minor * v.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % n_major) * n_minor + (j % n_minor);
    let mut faces = Vec::with_capacity(2 * n_major * n_minor);
    for i in 0..n_major {
        for j in 0..n_minor {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh::new(vertices, faces).expect("torus is well formed")
}

/// Open cylinder of radius `radius` spanning `z in [0, height]`, with
/// boundary loops at both ends. Vertex `k * n_around + i` lies on ring `k`.
pub fn open_cylinder(radius: f64, height: f64, n_around: usize, n_rings: usize) -> TriMesh {
    let mut vertices = Vec::with_capacity(n_around * n_rings);
    for k in 0..n_rings {
        let z = height * k as f64 / (n_rings - 1) as f64;
        for i in 0..n_around {
            let a = 2.0 * PI * i as f64 / n_around as f64;
            vertices.push([radius * a.cos(), radius * a.sin(), z]);
        }
    }
    let id = |k: usize, i: usize| k * n_around + (i % n_around);
    let mut faces = Vec::new();
    for k in 0..n_rings - 1 {
        for i in 0..n_around {
            faces.push([id(k, i), id(k, i + 1), id(k + 1, i + 1)]);
            faces.push([id(k, i), id(k + 1, i + 1), id(k + 1, i)]);
        }
    }
    TriMesh::new(vertices, faces).expect("cylinder is well formed")
}

/// Delaunay triangulation of planar points, lifted to z = 0.
///
/// Returns `None` when the points are degenerate (all collinear).
pub fn planar_triangulation(points: &[[f64; 2]]) -> Option<TriMesh> {
    let tris = crate::delaunay::triangulate(points)?;
    let vertices = points.iter().map(|p| [p[0], p[1], 0.0]).collect();
    TriMesh::new(vertices, tris).ok()
}

/// Regular grid over `[0, width] x [0, height]` with alternating diagonals.
pub fn grid(width: f64, height: f64, nx: usize, ny: usize) -> TriMesh {
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([width * i as f64 / nx as f64, height * j as f64 / ny as f64, 0.0]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut faces = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            } else {
                faces.push([a, b, d]);
                faces.push([b, c, d]);
            }
        }
    }
    TriMesh::new(vertices, faces).expect("grid is well formed")
}

/// Turns a closed polyline in space into a closed vertex path on the mesh.
///
/// Each point is snapped to its nearest vertex, consecutive snapped vertices
/// are joined by shortest vertex paths, and any loops created by overlapping
/// joins are erased, so the result is a simple cycle whose consecutive
/// vertices share a mesh edge. Returns `None` if the trace collapses to fewer
/// than three vertices or crosses between components.
pub fn trace_closed_curve(mesh: &TriMesh, points: &[Point3]) -> Option<Vec<usize>> {
    let mut snapped: Vec<usize> = points.iter().map(|p| mesh.nearest_vertex(p)).collect();
    snapped.dedup();
    while snapped.len() > 1 && snapped.first() == snapped.last() {
        snapped.pop();
    }
    if snapped.len() < 3 {
        return None;
    }
    let mut walk: Vec<usize> = Vec::new();
    for k in 0..snapped.len() {
        let (a, b) = (snapped[k], snapped[(k + 1) % snapped.len()]);
        let path = geodesic::shortest_vertex_path(mesh, a, b).ok()?;
        walk.extend_from_slice(&path[..path.len() - 1]);
    }
    // Chronological loop erasure.
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    let mut pos: HashMap<usize, usize> = HashMap::new();
    for v in walk {
        if let Some(&p) = pos.get(&v) {
            for w in out.drain(p + 1..) {
                pos.remove(&w);
            }
        } else {
            pos.insert(v, out.len());
            out.push(v);
        }
    }
    // The wrap-around join may leave a spur back-tracking over the start.
    while out.len() >= 3 && out[1] == out[out.len() - 1] {
        out.remove(0);
        out.pop();
    }
    (out.len() >= 3).then_some(out)
}
