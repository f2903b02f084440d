//! Planar Delaunay triangulation used for the Euclidean dual graph and for
//! medial-axis poles.

use delaunator::Point;

/// Delaunay triangles of `points`, or `None` if they are all collinear.
pub fn triangulate(points: &[[f64; 2]]) -> Option<Vec<[usize; 3]>> {
    if points.len() < 3 {
        return None;
    }
    let pts: Vec<Point> = points.iter().map(|p| Point { x: p[0], y: p[1] }).collect();
    let t = delaunator::triangulate(&pts);
    if t.triangles.is_empty() {
        return None;
    }
    Some(
        t.triangles
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect(),
    )
}

/// Unique undirected Delaunay edges `(a, b)` with `a < b`, sorted.
///
/// Collinear inputs fall back to the chain of consecutive points along the
/// line, which is the Delaunay graph of a degenerate configuration.
pub fn edges(points: &[[f64; 2]]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    match triangulate(points) {
        Some(tris) => {
            for t in tris {
                for k in 0..3 {
                    let (a, b) = (t[k], t[(k + 1) % 3]);
                    out.push((a.min(b), a.max(b)));
                }
            }
        }
        None if points.len() >= 2 => {
            let (ox, oy) = (points[0][0], points[0][1]);
            let far = points
                .iter()
                .copied()
                .max_by(|p, q| {
                    let dp = (p[0] - ox).hypot(p[1] - oy);
                    let dq = (q[0] - ox).hypot(q[1] - oy);
                    dp.total_cmp(&dq)
                })
                .unwrap();
            let dir = [far[0] - ox, far[1] - oy];
            let mut idx: Vec<usize> = (0..points.len()).collect();
            idx.sort_by(|&i, &j| {
                let ti = (points[i][0] - ox) * dir[0] + (points[i][1] - oy) * dir[1];
                let tj = (points[j][0] - ox) * dir[0] + (points[j][1] - oy) * dir[1];
                ti.total_cmp(&tj)
            });
            for w in idx.windows(2) {
                out.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        None => {}
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Circumcentre and circumradius of a planar triangle, `None` if degenerate.
pub fn circumcircle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Option<([f64; 2], f64)> {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Some(([a[0] + ux, a[1] + uy], ux.hypot(uy)))
}
