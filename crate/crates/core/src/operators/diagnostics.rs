use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_connection, connection_laplacian_1forms, hodge_laplacian_1forms, ConnectionData};
use crate::eigen::{first_positive, smallest_eigenpairs, SolverConfig};
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// One pair of the Weitzenböck comparison `μ = λ + K` on surface 1-forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeitzenboeckPair {
    pub hodge: f64,
    pub rough: f64,
    pub curvature_shift: f64,
    /// `|μ - (λ + K)| / max(μ, μ₊)` with `μ₊` the first positive Hodge
    /// eigenvalue; the floor keeps harmonic pairs (`μ ≈ 0`) finite.
    pub residual: f64,
}

/// Pairs the `k` smallest Hodge eigenvalues with the `k` smallest rough
/// eigenvalues counted over the reals (each complex eigenvalue of the
/// connection Laplacian is a real eigenvalue of multiplicity two).
pub fn weitzenboeck_eigen_check(
    mesh: &TriangleMesh,
    k: usize,
    curvature: f64,
    config: &SolverConfig,
) -> Result<Vec<WeitzenboeckPair>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let conn = build_connection(mesh)?;
    let (lr, mr) = connection_laplacian_1forms(mesh, &conn)?;
    let rough = smallest_eigenpairs(&lr, &mr, &SolverConfig { k: k / 2 + 2, ..config.clone() })?;
    let mut rough_real: Vec<f64> = rough.values.iter().flat_map(|&v| [v, v]).collect();
    rough_real.sort_by(f64::total_cmp);

    let (lh, mh) = hodge_laplacian_1forms(mesh)?;
    let hodge = smallest_eigenpairs(&lh, &mh, &SolverConfig { k, ..config.clone() })?;
    let floor = first_positive(&hodge, 1e-8).unwrap_or(0.0);

    Ok(hodge
        .values
        .iter()
        .zip(&rough_real)
        .map(|(&mu, &lambda)| WeitzenboeckPair {
            hodge: mu,
            rough: lambda,
            curvature_shift: curvature,
            residual: (mu - (lambda + curvature)).abs() / mu.max(floor),
        })
        .collect())
}

/// Fraction of faces where the discrete Kato inequality
/// `|∇|θ|| ≤ (1 + slack)|∇θ|` holds for the piecewise-linear interpolants.
/// Values are transported into the frame of each face's first corner.
pub fn kato_fraction(mesh: &TriangleMesh, conn: &ConnectionData, theta: &[Complex64], slack: f64) -> Result<f64> {
    if theta.len() != mesh.n_vertices() {
        return Err(Error::DimensionMismatch { expected: mesh.n_vertices(), found: theta.len() });
    }
    let mut good = 0usize;
    for (f, &[a, b, c]) in mesh.faces().iter().enumerate() {
        let h0 = 3 * f;
        let h2 = 3 * f + 2;
        let u = [theta[a], conn.rotation(mesh.twin(h0)) * theta[b], conn.rotation(h2) * theta[c]];
        let l01 = mesh.halfedge_length(h0);
        let l02 = mesh.halfedge_length(h2);
        let alpha = mesh.corner_angle(f, 0);
        let (x2, y2) = (l02 * alpha.cos(), l02 * alpha.sin());
        // Gradient of the linear interpolant with values g at the corners.
        let grad = |g: [f64; 3]| {
            let gx = (g[1] - g[0]) / l01;
            let gy = ((g[2] - g[0]) - gx * x2) / y2;
            gx * gx + gy * gy
        };
        let full = grad(u.map(|z| z.re)) + grad(u.map(|z| z.im));
        let modulus = grad(u.map(|z| z.norm()));
        if modulus.sqrt() <= (1.0 + slack) * full.sqrt() + 1e-300 {
            good += 1;
        }
    }
    Ok(good as f64 / mesh.n_faces() as f64)
}
