#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use roughlap::operators::{MassMatrix, SparseHermitianOperator};

/// All eigenvalues of `Lx = λMx` for positive diagonal `M`, via the dense
/// Hermitian matrix `M^{-1/2} L M^{-1/2}`.
pub fn dense_pencil_eigenvalues(l: &SparseHermitianOperator, m: &MassMatrix) -> Vec<f64> {
    assert!(m.is_positive(), "dense oracle needs a positive mass matrix");
    let n = l.dim();
    let s: Vec<f64> = m.weights().iter().map(|w| 1.0 / w.sqrt()).collect();
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    for (r, c, v) in l.triplets() {
        a[(r, c)] = v * (s[r] * s[c]);
    }
    let a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
