use num_complex::Complex64;

use super::{ConnectionData, MassMatrix, SparseHermitianOperator};
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::par;

type Triplet = (usize, usize, Complex64);

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Cotan stiffness `Σ_e w_e (u_i - u_j)²` with barycentric vertex masses.
pub fn cotan_laplacian(mesh: &TriangleMesh) -> Result<(SparseHermitianOperator, MassMatrix)> {
    let blocks = par::map_range(mesh.n_edges(), |e| {
        let [i, j] = mesh.edges()[e].vertices;
        let w = mesh.cotan_weight(e);
        [(i, i, real(w)), (j, j, real(w)), (i, j, real(-w)), (j, i, real(-w))]
    });
    let l = SparseHermitianOperator::from_triplets(mesh.n_vertices(), blocks.into_iter().flatten().collect())?;
    Ok((l, MassMatrix::new(mesh.vertex_areas())?))
}

/// Connection Laplacian with energy `Σ_e w_e |z_j - e^{iρ_ij} z_i|²` and
/// barycentric vertex masses.
pub fn connection_laplacian_1forms(
    mesh: &TriangleMesh,
    conn: &ConnectionData,
) -> Result<(SparseHermitianOperator, MassMatrix)> {
    conn.check_matches(mesh)?;
    let blocks = par::map_range(mesh.n_edges(), |e| {
        let edge = &mesh.edges()[e];
        let h = edge.halfedges[0];
        let [i, j] = edge.vertices;
        let w = mesh.cotan_weight(e);
        let r = conn.rotation(h);
        [(i, i, real(w)), (j, j, real(w)), (j, i, -r * w), (i, j, -r.conj() * w)]
    });
    let l = SparseHermitianOperator::from_triplets(mesh.n_vertices(), blocks.into_iter().flatten().collect())?;
    Ok((l, MassMatrix::new(mesh.vertex_areas())?))
}

/// DEC Hodge Laplacian on edge 1-forms as the symmetric pencil
/// `S = ⋆₁d₀⋆₀⁻¹d₀ᵀ⋆₁ + d₁ᵀ⋆₂d₁`, `M = ⋆₁`, so that `M⁻¹S = Δ`.
///
/// `⋆₁` is the cotan weight. It vanishes on edges opposite two right
/// angles; such edges carry no mass and the pencil has infinite
/// eigenvalues there, which the shift-invert solver never reaches.
pub fn hodge_laplacian_1forms(mesh: &TriangleMesh) -> Result<(SparseHermitianOperator, MassMatrix)> {
    let star1 = par::map_range(mesh.n_edges(), |e| mesh.cotan_weight(e));
    if let Some(e) = star1.iter().position(|&w| w < 0.0) {
        return Err(Error::InvalidMesh(format!(
            "edge {e} has negative dual length {:.3e}; the diagonal Hodge star needs a Delaunay mesh",
            star1[e]
        )));
    }
    let areas = mesh.vertex_areas();

    // ⋆₁d₀⋆₀⁻¹d₀ᵀ⋆₁: one dense block per vertex star.
    let vertex_blocks = par::map_range(mesh.n_vertices(), |v| {
        let star: Vec<(usize, f64)> = mesh
            .outgoing(v)
            .map(|h| {
                let e = mesh.halfedge_edge(h);
                // d₀ puts -1 on the edge's first vertex.
                let s = if mesh.edges()[e].vertices[0] == v { -1.0 } else { 1.0 };
                (e, s * star1[e])
            })
            .collect();
        let mut out: Vec<Triplet> = Vec::with_capacity(star.len() * star.len());
        for &(a, wa) in &star {
            for &(b, wb) in &star {
                out.push((a, b, real(wa * wb / areas[v])));
            }
        }
        out
    });
    // d₁ᵀ⋆₂d₁: one 3x3 block per face.
    let face_blocks = par::map_range(mesh.n_faces(), |f| {
        let sides: Vec<(usize, f64)> =
            (0..3).map(|c| (mesh.halfedge_edge(3 * f + c), mesh.halfedge_sign(3 * f + c))).collect();
        let inv = 1.0 / mesh.face_area(f);
        let mut out: Vec<Triplet> = Vec::with_capacity(9);
        for &(a, sa) in &sides {
            for &(b, sb) in &sides {
                out.push((a, b, real(sa * sb * inv)));
            }
        }
        out
    });
    let triplets = vertex_blocks.into_iter().chain(face_blocks).flatten().collect();
    let s = SparseHermitianOperator::from_triplets(mesh.n_edges(), triplets)?;
    Ok((s, MassMatrix::new(star1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_flat_torus, generate_icosphere};
    use crate::operators::build_connection;

    #[test]
    fn cotan_kills_constants() {
        let m = generate_icosphere(1.0, 2).unwrap();
        let (l, mass) = cotan_laplacian(&m).unwrap();
        let y = l.apply(&vec![real(1.0); m.n_vertices()]);
        assert!(y.iter().all(|v| v.norm() < 1e-12));
        assert!((mass.trace() - m.total_area()).abs() < 1e-12);
        assert_eq!(l.hermitian_defect(), 0.0);
    }

    #[test]
    fn torus_cotan_is_five_point() {
        let m = generate_flat_torus(4.0, 4.0, 4, 4).unwrap();
        let (l, _) = cotan_laplacian(&m).unwrap();
        for v in 0..16 {
            assert!((l.get(v, v).re - 4.0).abs() < 1e-14);
            let (_, vals) = l.row(v);
            let off: Vec<f64> = vals.iter().map(|x| x.re).filter(|x| *x != 0.0 && (*x - 4.0).abs() > 1e-9).collect();
            assert_eq!(off.len(), 4, "vertex {v}: {off:?}");
        }
    }

    #[test]
    fn connection_laplacian_is_hermitian() {
        let m = generate_icosphere(1.0, 2).unwrap();
        let c = build_connection(&m).unwrap();
        let (l, _) = connection_laplacian_1forms(&m, &c).unwrap();
        assert!(l.hermitian_defect() < 1e-15);
    }

    #[test]
    fn hodge_energy_of_gradient_matches_cotan() {
        let m = generate_icosphere(1.0, 1).unwrap();
        let (s, mass) = hodge_laplacian_1forms(&m).unwrap();
        assert!(mass.is_positive());
        assert_eq!(s.hermitian_defect(), 0.0);
        // d₁d₀ = 0: a gradient form has zero curl energy, so xᴴSx equals
        // the divergence part only; compare with the cotan Laplacian.
        let f: Vec<f64> = m.vertices().iter().map(|p| p[2]).collect();
        let df: Vec<Complex64> = m.edges().iter().map(|e| real(f[e.vertices[1]] - f[e.vertices[0]])).collect();
        let (l0, m0) = cotan_laplacian(&m).unwrap();
        let lf = l0.apply(&f.iter().map(|&x| real(x)).collect::<Vec<_>>());
        let expect: f64 = lf.iter().zip(m0.weights()).map(|(v, a)| v.re * v.re / a).sum();
        let sx = s.apply(&df);
        let got: f64 = df.iter().zip(&sx).map(|(a, b)| (a.conj() * b).re).sum();
        assert!((got - expect).abs() < 1e-10 * expect);
    }
}
