use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

const HOLONOMY_TOL: f64 = 1e-9;

/// Discrete Levi-Civita connection on the tangent bundle of a surface mesh.
///
/// `angles[h]` is the direction of halfedge `h` in the frame at its tail:
/// corner angles accumulated counter-clockwise from the vertex's reference
/// halfedge and rescaled by `2π/Θ_v`, where `Θ_v` is the angle sum.
/// `transport[h]` rotates a tangent vector from `tail(h)` to `head(h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionData {
    pub angles: Vec<f64>,
    pub transport: Vec<f64>,
    /// `2π / Θ_v`.
    pub vertex_scale: Vec<f64>,
    /// Rotation picked up by transport around each face, in `(-π, π]`.
    pub face_holonomy: Vec<f64>,
    /// Per-vertex share of the face holonomies; equals the angle defect.
    pub vertex_holonomy: Vec<f64>,
}

/// Representative of `x` modulo `2π` in `(-π, π]`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Builds transports by unfolding adjacent corners into a common chart and
/// verifies that transport around every face rotates by the face's share of
/// curvature.
pub fn build_connection(mesh: &TriangleMesh) -> Result<ConnectionData> {
    let nh = mesh.n_halfedges();
    let sums = mesh.angle_sums();
    let vertex_scale: Vec<f64> = sums.iter().map(|s| 2.0 * PI / s).collect();

    let mut angles = vec![0.0; nh];
    for (v, scale) in vertex_scale.iter().enumerate() {
        let mut acc = 0.0;
        for h in mesh.outgoing(v) {
            angles[h] = acc;
            acc += scale * mesh.corner_angle(h / 3, h % 3);
        }
    }
    let transport: Vec<f64> = (0..nh).map(|h| wrap_angle(angles[mesh.twin(h)] + PI - angles[h])).collect();

    let mut face_holonomy = Vec::with_capacity(mesh.n_faces());
    for (f, face) in mesh.faces().iter().enumerate() {
        let curvature: f64 = (0..3).map(|c| mesh.corner_angle(f, c) * (vertex_scale[face[c]] - 1.0)).sum();
        let around: f64 = (0..3).map(|c| transport[3 * f + c]).sum();
        let mismatch = wrap_angle(around - curvature);
        if mismatch.abs() > HOLONOMY_TOL {
            return Err(Error::Holonomy { face: f, transport: wrap_angle(around), curvature: wrap_angle(curvature) });
        }
        face_holonomy.push(wrap_angle(curvature));
    }
    let vertex_holonomy = sums.iter().zip(&vertex_scale).map(|(s, k)| (k - 1.0) * s).collect();
    Ok(ConnectionData { angles, transport, vertex_scale, face_holonomy, vertex_holonomy })
}

impl ConnectionData {
    pub fn check_matches(&self, mesh: &TriangleMesh) -> Result<()> {
        if self.transport.len() != mesh.n_halfedges() {
            return Err(Error::DimensionMismatch { expected: mesh.n_halfedges(), found: self.transport.len() });
        }
        if self.vertex_scale.len() != mesh.n_vertices() {
            return Err(Error::DimensionMismatch { expected: mesh.n_vertices(), found: self.vertex_scale.len() });
        }
        for (f, &expected) in self.face_holonomy.iter().enumerate() {
            let around: f64 = (0..3).map(|c| self.transport[3 * f + c]).sum();
            if wrap_angle(around - expected).abs() > HOLONOMY_TOL {
                return Err(Error::Holonomy { face: f, transport: wrap_angle(around), curvature: expected });
            }
        }
        Ok(())
    }

    /// `e^{iρ_h}`.
    pub fn rotation(&self, h: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.transport[h])
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn angle_weighted_normal(mesh: &TriangleMesh, v: usize) -> [f64; 3] {
    let mut n = [0.0; 3];
    for h in mesh.outgoing(v) {
        let fnorm = mesh.face_normal(h / 3);
        let a = mesh.corner_angle(h / 3, h % 3);
        for k in 0..3 {
            n[k] += a * fnorm[k];
        }
    }
    let l = dot(n, n).sqrt();
    n.map(|x| x / l)
}

/// Samples an ambient vector field at the vertices and expresses it in the
/// connection frames. The field is projected to the tangent plane (angle
/// weighted normal); its direction is located between two consecutive
/// projected edges and mapped linearly onto their frame angles.
pub fn sample_tangent_field<F>(mesh: &TriangleMesh, conn: &ConnectionData, field: F) -> Vec<Complex64>
where
    F: Fn([f64; 3]) -> [f64; 3],
{
    let project = |n: [f64; 3], x: [f64; 3]| {
        let d = dot(n, x);
        [x[0] - d * n[0], x[1] - d * n[1], x[2] - d * n[2]]
    };
    (0..mesh.n_vertices())
        .map(|v| {
            let n = angle_weighted_normal(mesh, v);
            let value = project(n, field(mesh.vertices()[v]));
            let mag = dot(value, value).sqrt();
            if mag == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let out: Vec<usize> = mesh.outgoing(v).collect();
            let e0 = project(n, mesh.halfedge_vector(out[0]));
            let angle_of = |x: [f64; 3]| dot(n, cross(e0, x)).atan2(dot(e0, x)).rem_euclid(2.0 * PI);
            let beta = angle_of(value);
            let mut theta = 0.0;
            for k in 0..out.len() {
                let psi0 = if k == 0 { 0.0 } else { angle_of(project(n, mesh.halfedge_vector(out[k]))) };
                let (psi1, phi1) = if k + 1 == out.len() {
                    (2.0 * PI, 2.0 * PI)
                } else {
                    (angle_of(project(n, mesh.halfedge_vector(out[k + 1]))), conn.angles[out[k + 1]])
                };
                if beta >= psi0 && beta <= psi1 {
                    let phi0 = conn.angles[out[k]];
                    theta = phi0 + (beta - psi0) / (psi1 - psi0) * (phi1 - phi0);
                    break;
                }
            }
            Complex64::from_polar(mag, theta)
        })
        .collect()
}

/// The rotation field `p ↦ axis × p`, a Killing field on a round sphere
/// centred at the origin.
pub fn killing_rotation_field(mesh: &TriangleMesh, conn: &ConnectionData, axis: [f64; 3]) -> Vec<Complex64> {
    sample_tangent_field(mesh, conn, |p| cross(axis, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_flat_torus, generate_icosphere};

    #[test]
    fn flat_torus_has_trivial_holonomy() {
        let m = generate_flat_torus(2.0 * PI, 2.0 * PI, 8, 8).unwrap();
        let c = build_connection(&m).unwrap();
        assert!(c.face_holonomy.iter().all(|h| h.abs() < 1e-12));
        assert!(c.vertex_holonomy.iter().all(|h| h.abs() < 1e-12));
    }

    #[test]
    fn sphere_holonomy_sums_to_four_pi() {
        let m = generate_icosphere(1.0, 2).unwrap();
        let c = build_connection(&m).unwrap();
        let total: f64 = c.vertex_holonomy.iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-9);
        let faces: f64 = c.face_holonomy.iter().sum();
        assert!((faces - 4.0 * PI).abs() < 1e-9);
        for h in 0..m.n_halfedges() {
            assert!(wrap_angle(c.transport[h] + c.transport[m.twin(h)]).abs() < 1e-12);
        }
        c.check_matches(&m).unwrap();
    }

    #[test]
    fn translation_field_is_parallel_on_torus() {
        let m = generate_flat_torus(2.0, 3.0, 6, 9).unwrap();
        let c = build_connection(&m).unwrap();
        let z = sample_tangent_field(&m, &c, |_| [1.0, 0.0, 0.0]);
        for e in m.edges() {
            let h = e.halfedges[0];
            let moved = c.rotation(h) * z[m.tail(h)];
            assert!((moved - z[m.head(h)]).norm() < 1e-12);
        }
    }
}
