use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::TriangleMesh;
use crate::error::{domain, Result};
use crate::par;

/// All-pairs Dijkstra is used up to this many vertices.
pub const EXACT_DIAMETER_LIMIT: usize = 5000;
const SAMPLED_SOURCES: usize = 64;

/// Edge-graph diameter. `exact` is false when only a subset of sources was
/// swept, in which case `value` is a lower bound for the graph diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diameter {
    pub value: f64,
    pub exact: bool,
    pub sources: usize,
}

/// Global measurements of a mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshGeometry {
    pub vertex_areas: Vec<f64>,
    pub angle_defects: Vec<f64>,
    pub diameter_graph: Diameter,
    pub total_area: f64,
}

impl MeshGeometry {
    pub fn measure(mesh: &TriangleMesh) -> Result<Self> {
        Ok(MeshGeometry {
            vertex_areas: mesh.vertex_areas(),
            angle_defects: mesh.angle_defects(),
            diameter_graph: graph_diameter(mesh)?,
            total_area: mesh.total_area(),
        })
    }

    /// Discrete Gauss–Bonnet residual `Σ defects - 2πχ`.
    pub fn gauss_bonnet_residual(&self, euler_characteristic: i64) -> f64 {
        self.angle_defects.iter().sum::<f64>() - 2.0 * std::f64::consts::PI * euler_characteristic as f64
    }
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    dist: f64,
    vertex: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| self.vertex.cmp(&other.vertex))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compressed adjacency `(neighbour, length)` lists.
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<(usize, f64)>,
}

impl Adjacency {
    fn new(mesh: &TriangleMesh) -> Self {
        let nv = mesh.n_vertices();
        let mut offsets = vec![0; nv + 1];
        let mut targets = Vec::with_capacity(mesh.n_halfedges());
        for v in 0..nv {
            targets.extend(mesh.outgoing(v).map(|h| (mesh.head(h), mesh.halfedge_length(h))));
            offsets[v + 1] = targets.len();
        }
        Adjacency { offsets, targets }
    }

    fn eccentricity(&self, source: usize) -> f64 {
        let nv = self.offsets.len() - 1;
        let mut dist = vec![f64::INFINITY; nv];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(State { dist: 0.0, vertex: source });
        while let Some(State { dist: d, vertex: v }) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, l) in &self.targets[self.offsets[v]..self.offsets[v + 1]] {
                let nd = d + l;
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(State { dist: nd, vertex: w });
                }
            }
        }
        dist.into_iter().fold(0.0, f64::max)
    }
}

/// Longest shortest path along mesh edges. Exact for at most
/// [`EXACT_DIAMETER_LIMIT`] vertices, otherwise the maximum eccentricity
/// over 64 evenly spaced sources.
pub fn graph_diameter(mesh: &TriangleMesh) -> Result<Diameter> {
    let adj = Adjacency::new(mesh);
    let nv = mesh.n_vertices();
    let sources: Vec<usize> = if nv <= EXACT_DIAMETER_LIMIT {
        (0..nv).collect()
    } else {
        (0..SAMPLED_SOURCES).map(|k| k * nv / SAMPLED_SOURCES).collect()
    };
    let ecc = par::map_slice(&sources, |&s| adj.eccentricity(s));
    let value = ecc.into_iter().fold(0.0, f64::max);
    if !value.is_finite() {
        return Err(domain("mesh graph is disconnected"));
    }
    Ok(Diameter { value, exact: nv <= EXACT_DIAMETER_LIMIT, sources: sources.len() })
}

/// Normalized `L^p` norm `(Σ A_v |R_v|^p / Σ A_v)^{1/p}` of the pointwise
/// curvature magnitude `|R_v| = scale · |defect_v / A_v|`.
///
/// On a surface the curvature tensor is fixed by the Gaussian curvature
/// and `scale` picks the tensor-norm convention: `2` for the full component
/// sum `|Riem|² = Σ R_{ijkl}²`.
pub fn curvature_lp_norm(mesh: &TriangleMesh, p: f64, convention_scale: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(domain(format!("need p >= 1, got {p}")));
    }
    if !(convention_scale > 0.0) {
        return Err(domain("convention scale must be positive"));
    }
    let areas = mesh.vertex_areas();
    let defects = mesh.angle_defects();
    let total: f64 = areas.iter().sum();
    if p.is_infinite() {
        return Ok(areas.iter().zip(&defects).map(|(a, d)| convention_scale * (d / a).abs()).fold(0.0, f64::max));
    }
    let sum: f64 = areas
        .iter()
        .zip(&defects)
        .map(|(a, d)| a * (convention_scale * (d / a).abs()).powf(p))
        .sum();
    Ok((sum / total).powf(1.0 / p))
}

/// Gradient magnitude of the piecewise-linear interpolant of `values` on
/// every face, computed in the face's intrinsic chart.
pub fn face_gradient_norms(mesh: &TriangleMesh, values: &[f64]) -> Result<Vec<f64>> {
    if values.len() != mesh.n_vertices() {
        return Err(crate::Error::DimensionMismatch { expected: mesh.n_vertices(), found: values.len() });
    }
    Ok(par::map_range(mesh.n_faces(), |f| {
        let [a, b, c] = mesh.faces()[f];
        let l01 = mesh.halfedge_length(3 * f);
        let l02 = mesh.halfedge_length(3 * f + 2);
        let alpha = mesh.corner_angle(f, 0);
        let (x2, y2) = (l02 * alpha.cos(), l02 * alpha.sin());
        let gx = (values[b] - values[a]) / l01;
        let gy = ((values[c] - values[a]) - gx * x2) / y2;
        gx.hypot(gy)
    }))
}
