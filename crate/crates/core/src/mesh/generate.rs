use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Periodicity, TriangleMesh};
use crate::error::{domain, Result};

/// Model manifolds used for verification. Products are spectral only; no
/// mesh is built for them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelManifold {
    FlatTorus { lx: f64, ly: f64, nx: usize, ny: usize },
    IcoSphere { radius: f64, subdivisions: usize },
    Product { factors: Vec<ModelManifold> },
}

impl ModelManifold {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelManifold::FlatTorus { lx, ly, nx, ny } => {
                if *nx < 3 || *ny < 3 {
                    return Err(domain(format!("torus needs nx, ny >= 3, got {nx} x {ny}")));
                }
                if !(*lx > 0.0 && *ly > 0.0) {
                    return Err(domain("torus side lengths must be positive"));
                }
            }
            ModelManifold::IcoSphere { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(domain("sphere radius must be positive"));
                }
            }
            ModelManifold::Product { factors } => {
                if factors.len() < 2 {
                    return Err(domain("a product needs at least two factors"));
                }
                for f in factors {
                    f.validate()?;
                }
            }
        }
        Ok(())
    }

    pub fn build_mesh(&self) -> Result<TriangleMesh> {
        match *self {
            ModelManifold::FlatTorus { lx, ly, nx, ny } => generate_flat_torus(lx, ly, nx, ny),
            ModelManifold::IcoSphere { radius, subdivisions } => generate_icosphere(radius, subdivisions),
            ModelManifold::Product { .. } => Err(domain("products are spectral only; no mesh is built")),
        }
    }

    /// Constant Gaussian curvature of the surface.
    pub fn gaussian_curvature(&self) -> Option<f64> {
        match *self {
            ModelManifold::FlatTorus { .. } => Some(0.0),
            ModelManifold::IcoSphere { radius, .. } => Some(1.0 / (radius * radius)),
            ModelManifold::Product { .. } => None,
        }
    }

    /// The next finer mesh of the same family.
    pub fn refined(&self) -> Self {
        match self.clone() {
            ModelManifold::FlatTorus { lx, ly, nx, ny } => ModelManifold::FlatTorus { lx, ly, nx: 2 * nx, ny: 2 * ny },
            ModelManifold::IcoSphere { radius, subdivisions } => {
                ModelManifold::IcoSphere { radius, subdivisions: subdivisions + 1 }
            }
            p => p,
        }
    }

    /// The mesh this one is a refinement of, if there is one.
    pub fn coarsened(&self) -> Option<Self> {
        match *self {
            ModelManifold::FlatTorus { lx, ly, nx, ny } if nx % 2 == 0 && ny % 2 == 0 && nx >= 6 && ny >= 6 => {
                Some(ModelManifold::FlatTorus { lx, ly, nx: nx / 2, ny: ny / 2 })
            }
            ModelManifold::IcoSphere { radius, subdivisions } if subdivisions > 0 => {
                Some(ModelManifold::IcoSphere { radius, subdivisions: subdivisions - 1 })
            }
            _ => None,
        }
    }
}

/// Periodic `nx × ny` grid on `[0, lx) × [0, ly)`. Cell `(i, j)` is split
/// along its rising diagonal when `i + j` is even and along the falling one
/// otherwise, so the edge graph approximates the flat metric along all
/// eight lattice directions and every diagonal sits opposite a right angle.
pub fn generate_flat_torus(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<TriangleMesh> {
    ModelManifold::FlatTorus { lx, ly, nx, ny }.validate()?;
    let id = |i: usize, j: usize| (i % nx) + nx * (j % ny);
    let vertices = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| [i as f64 * lx / nx as f64, j as f64 * ly / ny as f64, 0.0]))
        .collect();
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
    TriangleMesh::new_periodic(vertices, faces, Periodicity { lx, ly, nx, ny })
}

/// Icosahedron refined `subdivisions` times by edge midpoints, with every
/// vertex projected to the sphere of the given radius.
pub fn generate_icosphere(radius: f64, subdivisions: usize) -> Result<TriangleMesh> {
    ModelManifold::IcoSphere { radius, subdivisions }.validate()?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = vec![
        [-1.0, phi, 0.0], [1.0, phi, 0.0], [-1.0, -phi, 0.0], [1.0, -phi, 0.0],
        [0.0, -1.0, phi], [0.0, 1.0, phi], [0.0, -1.0, -phi], [0.0, 1.0, -phi],
        [phi, 0.0, -1.0], [phi, 0.0, 1.0], [-phi, 0.0, -1.0], [-phi, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    let project = |p: [f64; 3]| {
        let l = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        p.map(|x| x / l)
    };
    for v in vertices.iter_mut() {
        *v = project(*v);
    }
    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3 / 2);
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(project([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for v in vertices.iter_mut() {
        *v = v.map(|x| x * radius);
    }
    TriangleMesh::new(vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn torus_counts() {
        let m = generate_flat_torus(1.0, 1.0, 4, 4).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (16, 48, 32));
        assert_eq!(m.euler_characteristic(), 0);
        assert!(generate_flat_torus(1.0, 1.0, 2, 4).is_err());
        assert!(generate_flat_torus(1.0, 1.0, 3, 3).is_ok());
    }

    #[test]
    fn torus_is_flat_with_exact_area() {
        let m = generate_flat_torus(2.0 * PI, 3.0, 7, 5).unwrap();
        assert!(m.angle_defects().iter().all(|d| d.abs() < 1e-12));
        assert!((m.total_area() - 6.0 * PI).abs() < 1e-12 * 6.0 * PI);
        // Orientation: all faces face +z.
        assert!((0..m.n_faces()).all(|f| m.face_normal(f)[2] > 0.999));
    }

    #[test]
    fn icosphere_counts() {
        for s in 0..4 {
            let m = generate_icosphere(1.0, s).unwrap();
            assert_eq!(m.n_vertices(), 10 * 4usize.pow(s as u32) + 2);
            assert_eq!(m.euler_characteristic(), 2);
        }
        let m = generate_icosphere(1.0, 0).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (12, 30, 20));
    }

    #[test]
    fn icosphere_faces_point_outward() {
        let m = generate_icosphere(2.0, 2).unwrap();
        for (f, face) in m.faces().iter().enumerate() {
            let n = m.face_normal(f);
            let c: f64 = (0..3).map(|k| face.iter().map(|&v| m.vertices()[v][k]).sum::<f64>() * n[k]).sum();
            assert!(c > 0.0);
        }
        assert!(m.vertices().iter().all(|p| ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 2.0).abs() < 1e-14));
    }
}
