//! Indexed triangle meshes and their vertex-edge graph.
//!
//! A [`TriMesh`] is immutable once built. Construction derives the unique
//! undirected edge list and a CSR adjacency ([`EdgeGraph`]) that every
//! geodesic computation in the crate runs on.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub type Point3 = [f64; 3];

#[inline]
pub fn dist3(a: &Point3, b: &Point3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Undirected mesh edge with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

/// Weighted vertex adjacency in compressed sparse row layout.
#[derive(Debug, Clone)]
pub struct EdgeGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    edge_count: usize,
}

impl EdgeGraph {
    fn build(n: usize, edges: &[MeshEdge]) -> Self {
        let mut degree = vec![0usize; n];
        for e in edges {
            degree[e.a] += 1;
            degree[e.b] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        for e in edges {
            targets[cursor[e.a]] = e.b;
            weights[cursor[e.a]] = e.length;
            cursor[e.a] += 1;
            targets[cursor[e.b]] = e.a;
            weights[cursor[e.b]] = e.length;
            cursor[e.b] += 1;
        }
        // Sort each neighbourhood so traversal order never depends on file order.
        for v in 0..n {
            let range = offsets[v]..offsets[v + 1];
            let mut pairs: Vec<(usize, f64)> = targets[range.clone()]
                .iter()
                .copied()
                .zip(weights[range.clone()].iter().copied())
                .collect();
            pairs.sort_by_key(|p| p.0);
            for (slot, (t, w)) in range.zip(pairs) {
                targets[slot] = t;
                weights[slot] = w;
            }
        }
        EdgeGraph {
            offsets,
            targets,
            weights,
            edge_count: edges.len(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbours of `v` with edge weights, in ascending vertex order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("off") => Some(MeshFormat::Off),
            Some("obj") => Some(MeshFormat::Obj),
            _ => None,
        }
    }
}

/// Indexed triangle mesh with derived edges.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<MeshEdge>,
    edge_triangles: Vec<Vec<usize>>,
    graph: EdgeGraph,
}

impl TriMesh {
    /// Builds a mesh, rejecting out-of-range or repeated triangle indices and
    /// zero-length edges.
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh has no triangles".into()));
        }
        let n = vertices.len();
        if let Some(p) = vertices.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidMesh(format!("vertex {p} has a non-finite coordinate")));
        }
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_triangles: Vec<Vec<usize>> = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references vertex {bad} but the mesh has {n} vertices"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} repeats a vertex: {tri:?}"
                )));
            }
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                let key = (u.min(v), u.max(v));
                let idx = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(MeshEdge {
                        a: key.0,
                        b: key.1,
                        length: dist3(&vertices[key.0], &vertices[key.1]),
                    });
                    edge_triangles.push(Vec::new());
                    edges.len() - 1
                });
                edge_triangles[idx].push(t);
            }
        }
        if let Some(e) = edges.iter().find(|e| !(e.length > 0.0)) {
            return Err(Error::InvalidMesh(format!(
                "edge ({}, {}) has zero length",
                e.a, e.b
            )));
        }
        // Canonical edge order keeps every downstream tie-break file-order independent.
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_by_key(|&i| (edges[i].a, edges[i].b));
        let edges: Vec<MeshEdge> = order.iter().map(|&i| edges[i]).collect();
        let edge_triangles: Vec<Vec<usize>> =
            order.iter().map(|&i| edge_triangles[i].clone()).collect();
        let graph = EdgeGraph::build(n, &edges);
        Ok(TriMesh {
            vertices,
            triangles,
            edges,
            edge_triangles,
            graph,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn position(&self, v: usize) -> Point3 {
        self.vertices[v]
    }

    /// The weighted vertex-edge graph: one node per vertex, one edge per mesh
    /// edge weighted by its Euclidean length.
    pub fn edge_graph(&self) -> &EdgeGraph {
        &self.graph
    }

    /// Vertex nearest to `p` in Euclidean distance (lowest index on ties).
    pub fn nearest_vertex(&self, p: &Point3) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, v) in self.vertices.iter().enumerate() {
            let d = dist3(v, p);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Connected components of the vertex-edge graph as a per-vertex label.
    pub fn component_labels(&self) -> (usize, Vec<usize>) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for (w, _) in self.graph.neighbors(v) {
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

    pub fn load(path: impl AsRef<Path>, format: MeshFormat) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let parsed = match format {
            MeshFormat::Off => parse_off(&text),
            MeshFormat::Obj => parse_obj(&text),
        };
        let (vertices, triangles) = parsed.map_err(|(line, message)| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        })?;
        TriMesh::new(vertices, triangles)
    }

    /// Loads a mesh, picking the format from the file extension.
    pub fn load_auto(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let format = MeshFormat::from_path(path).ok_or_else(|| {
            Error::invalid(format!("{}: unknown mesh extension (expected .off or .obj)", path.display()))
        })?;
        Self::load(path, format)
    }

    pub fn from_off_str(text: &str) -> Result<Self> {
        let (v, t) = parse_off(text).map_err(|(line, message)| Error::Parse {
            path: "<string>".into(),
            line,
            message,
        })?;
        TriMesh::new(v, t)
    }

    pub fn from_obj_str(text: &str) -> Result<Self> {
        let (v, t) = parse_obj(text).map_err(|(line, message)| Error::Parse {
            path: "<string>".into(),
            line,
            message,
        })?;
        TriMesh::new(v, t)
    }

    pub fn to_off_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "OFF");
        let _ = writeln!(s, "{} {} {}", self.vertices.len(), self.triangles.len(), self.edges.len());
        for p in &self.vertices {
            let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    pub fn to_obj_string(&self) -> String {
        let mut s = String::new();
        for p in &self.vertices {
            let _ = writeln!(s, "v {} {} {}", p[0], p[1], p[2]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        s
    }

    /// Euler characteristic V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn boundary_edge_count(&self) -> usize {
        self.edge_triangles.iter().filter(|t| t.len() == 1).count()
    }
}

type ParseResult = std::result::Result<(Vec<Point3>, Vec<[usize; 3]>), (usize, String)>;

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_f64(tok: &str, line: usize) -> std::result::Result<f64, (usize, String)> {
    tok.parse::<f64>()
        .map_err(|_| (line, format!("expected a number, found {tok:?}")))
}

fn parse_off(text: &str) -> ParseResult {
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for tok in strip_comment(line).split_whitespace() {
            tokens.push((i + 1, tok));
        }
    }
    let mut it = tokens.into_iter().peekable();
    match it.next() {
        Some((_, "OFF")) => {}
        Some((l, tok)) => return Err((l, format!("expected OFF header, found {tok:?}"))),
        None => return Err((1, "empty file".into())),
    }
    let mut count = |what: &str| -> std::result::Result<usize, (usize, String)> {
        let (l, tok) = it
            .next()
            .ok_or((0, format!("missing {what} count")))?;
        tok.parse::<usize>()
            .map_err(|_| (l, format!("bad {what} count {tok:?}")))
    };
    let nv = count("vertex")?;
    let nf = count("face")?;
    let _ne = count("edge")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut p = [0.0; 3];
        for c in p.iter_mut() {
            let (l, tok) = it.next().ok_or((0, "truncated vertex list".to_string()))?;
            *c = parse_f64(tok, l)?;
        }
        vertices.push(p);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, tok) = it.next().ok_or((0, "truncated face list".to_string()))?;
        let k: usize = tok
            .parse()
            .map_err(|_| (l, format!("bad face size {tok:?}")))?;
        if k != 3 {
            return Err((l, format!("only triangles are supported, found a {k}-gon")));
        }
        let mut t = [0usize; 3];
        for c in t.iter_mut() {
            let (l2, tok) = it.next().ok_or((l, "truncated face".to_string()))?;
            *c = tok
                .parse()
                .map_err(|_| (l2, format!("bad vertex index {tok:?}")))?;
            if *c >= nv {
                return Err((l2, format!("vertex index {c} out of range (mesh has {nv} vertices)")));
            }
        }
        // Trailing per-face colour values are allowed on the same line.
        while let Some(&(l3, _)) = it.peek() {
            if l3 == l {
                it.next();
            } else {
                break;
            }
        }
        triangles.push(t);
    }
    Ok((vertices, triangles))
}

fn parse_obj(text: &str) -> ParseResult {
    let mut vertices = Vec::new();
    let mut faces: Vec<(usize, Vec<i64>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = i + 1;
        let mut toks = strip_comment(line).split_whitespace();
        match toks.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for c in p.iter_mut() {
                    let tok = toks.next().ok_or((l, "vertex needs 3 coordinates".to_string()))?;
                    *c = parse_f64(tok, l)?;
                }
                vertices.push(p);
            }
            Some("f") => {
                let idx: std::result::Result<Vec<i64>, _> = toks
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        head.parse::<i64>()
                            .map_err(|_| (l, format!("bad face index {t:?}")))
                    })
                    .collect();
                let idx = idx?;
                if idx.len() != 3 {
                    return Err((l, format!("only triangles are supported, found {} indices", idx.len())));
                }
                faces.push((l, idx));
            }
            _ => {}
        }
    }
    let nv = vertices.len() as i64;
    let mut triangles = Vec::with_capacity(faces.len());
    for (l, idx) in faces {
        let mut t = [0usize; 3];
        for (slot, &raw) in t.iter_mut().zip(&idx) {
            let resolved = if raw > 0 { raw - 1 } else { nv + raw };
            if raw == 0 || resolved < 0 || resolved >= nv {
                return Err((l, format!("vertex index {raw} out of range (mesh has {nv} vertices)")));
            }
            *slot = resolved as usize;
        }
        triangles.push(t);
    }
    Ok((vertices, triangles))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectKind {
    /// Edge with more than two incident triangles; index is into `edges()`.
    NonManifoldEdge,
    /// Vertex whose incident triangles form more than one fan.
    NonManifoldVertex,
    /// Vertex referenced by no triangle.
    IsolatedVertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Defect {
    pub kind: DefectKind,
    pub index: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub is_manifold: bool,
    pub defects: Vec<Defect>,
    pub component_count: usize,
}

/// Lists every edge with more than two incident triangles and every vertex
/// whose star is not a single (half-)fan.
pub fn validate_manifold(mesh: &TriMesh) -> ValidationReport {
    let mut defects = Vec::new();
    for (i, tris) in mesh.edge_triangles.iter().enumerate() {
        if tris.len() > 2 {
            defects.push(Defect {
                kind: DefectKind::NonManifoldEdge,
                index: i,
            });
        }
    }

    // The link of v is the set of opposite edges of its incident triangles.
    // A single fan or half-fan means the link is connected.
    let n = mesh.vertex_count();
    let mut link: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for t in &mesh.triangles {
        for k in 0..3 {
            link[t[k]].push((t[(k + 1) % 3], t[(k + 2) % 3]));
        }
    }
    for (v, edges) in link.iter().enumerate() {
        if edges.is_empty() {
            defects.push(Defect {
                kind: DefectKind::IsolatedVertex,
                index: v,
            });
            continue;
        }
        if link_component_count(edges) > 1 {
            defects.push(Defect {
                kind: DefectKind::NonManifoldVertex,
                index: v,
            });
        }
    }
    let (component_count, _) = mesh.component_labels();
    ValidationReport {
        is_manifold: defects.is_empty(),
        defects,
        component_count,
    }
}

fn link_component_count(edges: &[(usize, usize)]) -> usize {
    let mut nodes: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let id = |x: usize| nodes.binary_search(&x).unwrap();
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, id(a)), find(&mut parent, id(b)));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..nodes.len()).filter(|&i| find(&mut parent, i) == i).count()
}
