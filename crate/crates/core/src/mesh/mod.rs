//! Closed oriented triangle meshes with intrinsic edge-length geometry.
//!
//! All metric quantities (angles, areas, cotangents) are computed from edge
//! lengths only. Positions enter solely through edge displacements, which
//! for periodic meshes use the minimum-image convention, so a flat torus is
//! represented with its exact flat metric.
//!
//! Halfedge `3f + c` runs from `faces[f][c]` to `faces[f][(c + 1) % 3]`.

mod generate;
mod io;
mod measure;

pub use generate::{generate_flat_torus, generate_icosphere, ModelManifold};
pub use io::{load_off, save_off, sidecar_path};
pub use measure::{curvature_lp_norm, face_gradient_norms, graph_diameter, Diameter, MeshGeometry};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NO_TWIN: usize = usize::MAX;

/// An undirected edge. `vertices[0] < vertices[1]`; `halfedges[0]` runs
/// from `vertices[0]` to `vertices[1]`, `halfedges[1]` the other way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub halfedges: [usize; 2],
    pub length: f64,
}

impl Edge {
    /// The two faces bordering the edge.
    pub fn faces(&self) -> [usize; 2] {
        [self.halfedges[0] / 3, self.halfedges[1] / 3]
    }
}

/// Periods of a flat torus grid, also the content of the OFF sidecar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Periodicity {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
    period: Option<Periodicity>,
    edges: Vec<Edge>,
    twin: Vec<usize>,
    halfedge_edge: Vec<usize>,
    vertex_halfedge: Vec<usize>,
    valence: Vec<usize>,
    corner_angles: Vec<[f64; 3]>,
    corner_cots: Vec<[f64; 3]>,
    face_areas: Vec<f64>,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Heron's formula in the cancellation-free ordering.
fn triangle_area(l: [f64; 3]) -> f64 {
    let mut s = l;
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * q.max(0.0).sqrt()
}

impl TriangleMesh {
    /// Builds and validates a mesh from embedded positions.
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> Result<Self> {
        Self::build(vertices, faces, None)
    }

    /// Builds a mesh whose displacements wrap in x and y with the given
    /// periods (minimum image), e.g. a flat torus.
    pub fn new_periodic(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>, period: Periodicity) -> Result<Self> {
        if !(period.lx > 0.0 && period.ly > 0.0) {
            return Err(Error::InvalidMesh(format!("periods must be positive, got {period:?}")));
        }
        Self::build(vertices, faces, Some(period))
    }

    fn build(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>, period: Option<Periodicity>) -> Result<Self> {
        let nv = vertices.len();
        if faces.is_empty() {
            return Err(Error::InvalidMesh("no faces".into()));
        }
        for (f, face) in faces.iter().enumerate() {
            if face.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("face {f} references a missing vertex")));
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                return Err(Error::InvalidMesh(format!("face {f} repeats a vertex")));
            }
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }

        // Directed halfedges must be unique; a duplicate means either a
        // non-manifold edge or two faces with inconsistent orientation.
        let nh = 3 * faces.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(nh);
        for (f, face) in faces.iter().enumerate() {
            for c in 0..3 {
                let key = (face[c], face[(c + 1) % 3]);
                if directed.insert(key, 3 * f + c).is_some() {
                    return Err(Error::InvalidMesh(format!(
                        "directed edge {key:?} used twice (non-manifold or inconsistently oriented)"
                    )));
                }
            }
        }
        let mut twin = vec![NO_TWIN; nh];
        for (&(a, b), &h) in &directed {
            match directed.get(&(b, a)) {
                Some(&t) => twin[h] = t,
                None => {
                    return Err(Error::InvalidMesh(format!("edge ({a}, {b}) borders only one face; mesh is not closed")))
                }
            }
        }

        let mut mesh = TriangleMesh {
            vertices,
            faces,
            period,
            edges: Vec::with_capacity(nh / 2),
            twin,
            halfedge_edge: vec![0; nh],
            vertex_halfedge: vec![NO_TWIN; nv],
            valence: vec![0; nv],
            corner_angles: Vec::new(),
            corner_cots: Vec::new(),
            face_areas: Vec::new(),
        };

        for h in 0..nh {
            let t = mesh.twin[h];
            let (a, b) = (mesh.tail(h), mesh.head(h));
            mesh.valence[a] += 1;
            if mesh.vertex_halfedge[a] == NO_TWIN {
                mesh.vertex_halfedge[a] = h;
            }
            if a < b {
                let length = norm(mesh.displacement(a, b));
                mesh.halfedge_edge[h] = mesh.edges.len();
                mesh.halfedge_edge[t] = mesh.edges.len();
                mesh.edges.push(Edge { vertices: [a, b], halfedges: [h, t], length });
            }
        }
        if let Some(v) = mesh.vertex_halfedge.iter().position(|&h| h == NO_TWIN) {
            return Err(Error::InvalidMesh(format!("vertex {v} is not used by any face")));
        }
        // Each vertex star must be a single fan.
        for v in 0..nv {
            let start = mesh.vertex_halfedge[v];
            let mut h = start;
            let mut count = 0;
            loop {
                h = mesh.next_outgoing(h);
                count += 1;
                if h == start || count > mesh.valence[v] {
                    break;
                }
            }
            if h != start || count != mesh.valence[v] {
                return Err(Error::InvalidMesh(format!("vertex {v} has a non-manifold neighbourhood")));
            }
        }
        mesh.check_connected()?;
        mesh.compute_intrinsic()?;
        Ok(mesh)
    }

    fn check_connected(&self) -> Result<()> {
        let nv = self.vertices.len();
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for h in self.outgoing(v) {
                let w = self.head(h);
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != nv {
            return Err(Error::InvalidMesh(format!(
                "mesh is disconnected: {reached} of {nv} vertices reachable from vertex 0"
            )));
        }
        Ok(())
    }

    fn compute_intrinsic(&mut self) -> Result<()> {
        let nf = self.faces.len();
        self.corner_angles = Vec::with_capacity(nf);
        self.corner_cots = Vec::with_capacity(nf);
        self.face_areas = Vec::with_capacity(nf);
        for f in 0..nf {
            let l = [0, 1, 2].map(|c| self.halfedge_length(3 * f + c));
            let area = triangle_area(l);
            let mut angles = [0.0; 3];
            let mut cots = [0.0; 3];
            for c in 0..3 {
                // Corner c sits between halfedges c and c+2, opposite c+1.
                let (a, b, o) = (l[c], l[(c + 2) % 3], l[(c + 1) % 3]);
                let mut num = a * a + b * b - o * o;
                if num.abs() <= 1e-12 * (a * a + b * b + o * o) {
                    num = 0.0;
                }
                angles[c] = (4.0 * area).atan2(num);
                cots[c] = num / (4.0 * area);
            }
            self.corner_angles.push(angles);
            self.corner_cots.push(cots);
            self.face_areas.push(area);
        }
        let mean = self.face_areas.iter().sum::<f64>() / nf as f64;
        if let Some(f) = self.face_areas.iter().position(|&a| !(a > 1e-14 * mean)) {
            return Err(Error::InvalidMesh(format!(
                "face {f} is degenerate (area {:.3e}, mean {mean:.3e})",
                self.face_areas[f]
            )));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn periodicity(&self) -> Option<Periodicity> {
        self.period
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_halfedges(&self) -> usize {
        3 * self.faces.len()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn tail(&self, h: usize) -> usize {
        self.faces[h / 3][h % 3]
    }

    pub fn head(&self, h: usize) -> usize {
        self.faces[h / 3][(h % 3 + 1) % 3]
    }

    pub fn next(&self, h: usize) -> usize {
        3 * (h / 3) + (h % 3 + 1) % 3
    }

    pub fn prev(&self, h: usize) -> usize {
        3 * (h / 3) + (h % 3 + 2) % 3
    }

    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }

    pub fn halfedge_edge(&self, h: usize) -> usize {
        self.halfedge_edge[h]
    }

    /// Orientation of halfedge `h` relative to its edge: `+1` or `-1`.
    pub fn halfedge_sign(&self, h: usize) -> f64 {
        if self.edges[self.halfedge_edge[h]].halfedges[0] == h {
            1.0
        } else {
            -1.0
        }
    }

    /// Reference outgoing halfedge of `v`.
    pub fn vertex_halfedge(&self, v: usize) -> usize {
        self.vertex_halfedge[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.valence[v]
    }

    /// The outgoing halfedge following `h` counter-clockwise about its tail,
    /// separated from it by the corner angle at `tail(h)` in face `h / 3`.
    pub fn next_outgoing(&self, h: usize) -> usize {
        self.twin[self.prev(h)]
    }

    /// Outgoing halfedges of `v` in counter-clockwise order, starting at
    /// [`vertex_halfedge`](Self::vertex_halfedge).
    pub fn outgoing(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.vertex_halfedge[v];
        let mut h = start;
        (0..self.valence[v]).map(move |_| {
            let cur = h;
            h = self.next_outgoing(h);
            cur
        })
    }

    /// `x_b - x_a`, using the minimum image for periodic meshes.
    pub fn displacement(&self, a: usize, b: usize) -> [f64; 3] {
        let mut d = sub(self.vertices[b], self.vertices[a]);
        if let Some(Periodicity { lx, ly, .. }) = self.period {
            d[0] -= lx * (d[0] / lx).round();
            d[1] -= ly * (d[1] / ly).round();
        }
        d
    }

    pub fn halfedge_vector(&self, h: usize) -> [f64; 3] {
        self.displacement(self.tail(h), self.head(h))
    }

    pub fn halfedge_length(&self, h: usize) -> f64 {
        self.edges[self.halfedge_edge[h]].length
    }

    /// Interior angle at corner `c` of face `f`.
    pub fn corner_angle(&self, f: usize, c: usize) -> f64 {
        self.corner_angles[f][c]
    }

    /// Cotangent of the corner angle; exactly zero for right angles up to
    /// roundoff in the edge lengths.
    pub fn corner_cot(&self, f: usize, c: usize) -> f64 {
        self.corner_cots[f][c]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        self.face_areas[f]
    }

    pub fn face_areas(&self) -> &[f64] {
        &self.face_areas
    }

    pub fn total_area(&self) -> f64 {
        self.face_areas.iter().sum()
    }

    /// Cotangent of the angle opposite halfedge `h` inside its face.
    pub fn opposite_cot(&self, h: usize) -> f64 {
        self.corner_cots[h / 3][(h % 3 + 2) % 3]
    }

    /// Cotan weight `(cot α + cot β) / 2` of edge `e`.
    pub fn cotan_weight(&self, e: usize) -> f64 {
        let [h0, h1] = self.edges[e].halfedges;
        0.5 * (self.opposite_cot(h0) + self.opposite_cot(h1))
    }

    /// Barycentric vertex areas: a third of each incident face.
    pub fn vertex_areas(&self) -> Vec<f64> {
        let mut areas = vec![0.0; self.vertices.len()];
        for (face, &a) in self.faces.iter().zip(&self.face_areas) {
            for &v in face {
                areas[v] += a / 3.0;
            }
        }
        areas
    }

    /// Sum of the corner angles at each vertex.
    pub fn angle_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.vertices.len()];
        for (face, angles) in self.faces.iter().zip(&self.corner_angles) {
            for c in 0..3 {
                sums[face[c]] += angles[c];
            }
        }
        sums
    }

    /// `2π - Σ` incident angles.
    pub fn angle_defects(&self) -> Vec<f64> {
        self.angle_sums().into_iter().map(|s| 2.0 * std::f64::consts::PI - s).collect()
    }

    /// Unit normal of face `f` from its embedded positions.
    pub fn face_normal(&self, f: usize) -> [f64; 3] {
        let u = self.halfedge_vector(3 * f);
        let w = self.halfedge_vector(3 * f + 2);
        let w = [-w[0], -w[1], -w[2]];
        let n = [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
        let l = norm(n);
        [n[0] / l, n[1] / l, n[2] / l]
    }

    /// Copy with every length multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(crate::error::domain(format!("scale must be positive, got {s}")));
        }
        let vertices = self.vertices.iter().map(|p| p.map(|x| x * s)).collect();
        match self.period {
            Some(p) => Self::new_periodic(vertices, self.faces.clone(), Periodicity { lx: p.lx * s, ly: p.ly * s, ..p }),
            None => Self::new(vertices, self.faces.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetrahedron() -> TriangleMesh {
        let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let f = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
        TriangleMesh::new(v, f).unwrap()
    }

    #[test]
    fn tetrahedron_connectivity() {
        let m = tetrahedron();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (4, 6, 4));
        assert_eq!(m.euler_characteristic(), 2);
        for h in 0..m.n_halfedges() {
            assert_eq!(m.twin(m.twin(h)), h);
            assert_eq!(m.tail(m.twin(h)), m.head(h));
        }
        for v in 0..4 {
            assert_eq!(m.outgoing(v).count(), 3);
            assert!(m.outgoing(v).all(|h| m.tail(h) == v));
        }
        // Regular tetrahedron: every corner is 60°.
        for f in 0..4 {
            for c in 0..3 {
                assert!((m.corner_angle(f, c) - std::f64::consts::FRAC_PI_3).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_open_mesh() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert!(matches!(TriangleMesh::new(v, vec![[0, 1, 2]]), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn rejects_inconsistent_orientation() {
        let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let f = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 2, 3]];
        assert!(matches!(TriangleMesh::new(v, f), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn rejects_disjoint_union() {
        let t = tetrahedron();
        let mut v = t.vertices().to_vec();
        v.extend(t.vertices().iter().map(|p| [p[0] + 5.0, p[1], p[2]]));
        let mut f = t.faces().to_vec();
        f.extend(t.faces().iter().map(|f| f.map(|i| i + 4)));
        assert!(matches!(TriangleMesh::new(v, f), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn rejects_degenerate_face() {
        let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [1.0, 1.0, 1.0]];
        let f = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
        assert!(TriangleMesh::new(v, f).is_err());
    }

    #[test]
    fn heron_is_stable_for_needles() {
        let a = triangle_area([1.0, 1.0, 1e-9]);
        assert!((a - 0.5e-9).abs() < 1e-20);
    }
}
