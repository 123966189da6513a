mod common;

use common::{dense_pencil_eigenvalues, rel_close};
use num_complex::Complex64;
use roughlap::eigen::{smallest_eigenpairs, SolverConfig};
use roughlap::mesh::{generate_flat_torus, generate_icosphere};
use roughlap::operators::{build_connection, connection_laplacian_1forms, cotan_laplacian, hodge_laplacian_1forms};
use roughlap::Error;

#[test]
fn connection_laplacian_matches_dense_on_sphere_s3() {
    let mesh = generate_icosphere(1.0, 3).unwrap();
    let conn = build_connection(&mesh).unwrap();
    let (l, m) = connection_laplacian_1forms(&mesh, &conn).unwrap();
    let dense = dense_pencil_eigenvalues(&l, &m);
    let r = smallest_eigenpairs(&l, &m, &SolverConfig::with_k(8)).unwrap();
    for (i, (a, b)) in r.values.iter().zip(&dense).enumerate() {
        assert!(rel_close(*a, *b, 1e-8), "pair {i}: {a} vs {b}");
    }
}

#[test]
fn cotan_and_hodge_match_dense_on_sphere_s2() {
    let mesh = generate_icosphere(1.0, 2).unwrap();
    for (l, m) in [cotan_laplacian(&mesh).unwrap(), hodge_laplacian_1forms(&mesh).unwrap()] {
        let dense = dense_pencil_eigenvalues(&l, &m);
        let r = smallest_eigenpairs(&l, &m, &SolverConfig::with_k(10)).unwrap();
        for (a, b) in r.values.iter().zip(&dense) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn residuals_and_orthonormality() {
    let mesh = generate_flat_torus(2.0, 3.0, 12, 18).unwrap();
    let conn = build_connection(&mesh).unwrap();
    let (l, m) = connection_laplacian_1forms(&mesh, &conn).unwrap();
    let config = SolverConfig::with_k(7);
    let r = smallest_eigenpairs(&l, &m, &config).unwrap();
    assert!(r.values.windows(2).all(|w| w[0] <= w[1]));
    for (i, x) in r.vectors.iter().enumerate() {
        let lx = l.apply(x);
        let mx = m.apply(x);
        let res: f64 = lx.iter().zip(&mx).map(|(a, b)| (a - b * r.values[i]).norm_sqr()).sum::<f64>().sqrt();
        let mx_norm: f64 = mx.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(res <= config.tol * mx_norm);
        for (j, y) in r.vectors.iter().enumerate() {
            let g = m.inner(x, y);
            let expect = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            assert!((g - expect).norm() < 1e-8, "<{i},{j}> = {g}");
        }
    }
}

#[test]
fn hodge_with_zero_mass_edges() {
    // Diagonals of the torus grid sit opposite two right angles.
    let mesh = generate_flat_torus(2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI, 16, 16).unwrap();
    let (l, m) = hodge_laplacian_1forms(&mesh).unwrap();
    assert!(!m.is_positive());
    let r = smallest_eigenpairs(&l, &m, &SolverConfig::with_k(4)).unwrap();
    assert!(r.values[0].abs() < 1e-10 && r.values[1].abs() < 1e-10);
    assert!((r.values[2] - 1.0).abs() < 0.02);
}

#[test]
fn deterministic_given_seed() {
    let mesh = generate_icosphere(1.0, 3).unwrap();
    let conn = build_connection(&mesh).unwrap();
    let (l, m) = connection_laplacian_1forms(&mesh, &conn).unwrap();
    let a = smallest_eigenpairs(&l, &m, &SolverConfig::with_k(5)).unwrap();
    let b = smallest_eigenpairs(&l, &m, &SolverConfig::with_k(5)).unwrap();
    assert_eq!(a, b);
    let c = smallest_eigenpairs(&l, &m, &SolverConfig { seed: 7, ..SolverConfig::with_k(5) }).unwrap();
    for (x, y) in a.values.iter().zip(&c.values) {
        assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
    }
}

#[test]
fn leading_values_do_not_depend_on_k() {
    let mesh = generate_icosphere(1.0, 3).unwrap();
    let (l, m) = cotan_laplacian(&mesh).unwrap();
    let small = smallest_eigenpairs(&l, &m, &SolverConfig::with_k(4)).unwrap();
    let large = smallest_eigenpairs(&l, &m, &SolverConfig::with_k(9)).unwrap();
    for (a, b) in small.values.iter().zip(&large.values) {
        assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn non_convergence_reports_residuals() {
    let mesh = generate_icosphere(1.0, 3).unwrap();
    let (l, m) = cotan_laplacian(&mesh).unwrap();
    let config = SolverConfig { k: 6, tol: 1e-15, max_iter: 2, ..Default::default() };
    match smallest_eigenpairs(&l, &m, &config) {
        Err(Error::NoConvergence { iterations, residuals, worst_residual }) => {
            assert_eq!(iterations, 2);
            assert_eq!(residuals.len(), 6);
            assert!(worst_residual > 1e-15);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}
