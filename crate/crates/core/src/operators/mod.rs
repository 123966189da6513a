//! Discrete Laplacians on closed surface meshes: the cotan function
//! Laplacian, the connection (rough) Laplacian on tangent vectors/1-forms,
//! and the DEC Hodge Laplacian on edge 1-forms.
//!
//! Tangent vectors at a vertex are complex numbers in a frame whose angular
//! coordinate is the corner-angle sum rescaled to `2π`, so the connection
//! Laplacian is a complex Hermitian matrix with one unknown per vertex.

mod assemble;
mod connection;
mod diagnostics;

pub use assemble::{connection_laplacian_1forms, cotan_laplacian, hodge_laplacian_1forms};
pub use connection::{build_connection, killing_rotation_field, sample_tangent_field, ConnectionData};
pub use diagnostics::{kato_fraction, weitzenboeck_eigen_check, WeitzenboeckPair};

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::par;

/// Hermitian matrix in compressed sparse rows. Built from coordinate
/// triplets; duplicates are summed in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitianOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseHermitianOperator {
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|t| t.0 >= dim || t.1 >= dim) {
            return Err(domain(format!("entry ({r}, {c}) outside a {dim}x{dim} matrix")));
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; dim + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseHermitianOperator { dim, row_ptr, col_idx, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(row, col, value)` for every stored entry, row-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn row(&self, r: usize) -> (&[usize], &[Complex64]) {
        let s = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[s.clone()], &self.values[s])
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// `y = A x`, rows in parallel; each row is summed in column order.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        par::fill_indexed(y, |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).fold(Complex64::new(0.0, 0.0), |acc, (&c, &v)| acc + v * x[c])
        });
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec(x, &mut y);
        y
    }

    /// `max |A_ij - conj(A_ji)|` over stored entries.
    pub fn hermitian_defect(&self) -> f64 {
        self.triplets().map(|(r, c, v)| (v - self.get(c, r).conj()).norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum (equal to the row sum for Hermitian A).
    pub fn norm_1(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).1.iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Whether every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Dense copy, row-major. Intended for small cross-checks.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut a = vec![vec![Complex64::new(0.0, 0.0); self.dim]; self.dim];
        for (r, c, v) in self.triplets() {
            a[r][c] = v;
        }
        a
    }

    /// MatrixMarket coordinate file (`complex general`, or `real general`
    /// when every entry is real), 1-based indices.
    pub fn write_matrix_market(&self, path: &Path) -> Result<()> {
        let real = self.is_real();
        let mut out = String::new();
        let field = if real { "real" } else { "complex" };
        writeln!(out, "%%MatrixMarket matrix coordinate {field} general").unwrap();
        writeln!(out, "{} {} {}", self.dim, self.dim, self.nnz()).unwrap();
        for (r, c, v) in self.triplets() {
            if real {
                writeln!(out, "{} {} {:e}", r + 1, c + 1, v.re).unwrap();
            } else {
                writeln!(out, "{} {} {:e} {:e}", r + 1, c + 1, v.re, v.im).unwrap();
            }
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Lumped (diagonal) mass matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MassMatrix {
    weights: Vec<f64>,
}

impl MassMatrix {
    /// Accepts nonnegative finite weights. Zero weights are allowed for
    /// edge masses whose dual edge has zero length; see
    /// [`hodge_laplacian_1forms`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(domain(format!("mass weight {i} is {} (must be finite and >= 0)", weights[i])));
        }
        Ok(MassMatrix { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn trace(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        x.iter().zip(&self.weights).map(|(v, w)| v * w).collect()
    }

    /// `xᴴ M y`.
    pub fn inner(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        par::sum_range(x.len(), Complex64::new(0.0, 0.0), |i| x[i].conj() * y[i] * self.weights[i])
    }
}

/// `xᴴLx / xᴴMx`.
pub fn rayleigh_quotient(l: &SparseHermitianOperator, m: &MassMatrix, x: &[Complex64]) -> Result<f64> {
    if x.len() != l.dim() || m.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: x.len().min(m.dim()) });
    }
    let den = m.inner(x, x).re;
    if !(den > 0.0) {
        return Err(domain("vector has zero mass norm"));
    }
    let lx = l.apply(x);
    let num = par::sum_range(x.len(), Complex64::new(0.0, 0.0), |i| x[i].conj() * lx[i]).re;
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = SparseHermitianOperator::from_triplets(
            2,
            vec![(0, 0, c(1.0, 0.0)), (1, 0, c(0.0, 1.0)), (0, 0, c(2.0, 0.0)), (0, 1, c(0.0, -1.0)), (1, 1, c(5.0, 0.0))],
        )
        .unwrap();
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.get(0, 0), c(3.0, 0.0));
        assert_eq!(a.hermitian_defect(), 0.0);
        let y = a.apply(&[c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(y, vec![c(4.0, 0.0), c(0.0, 6.0)]);
        assert!(SparseHermitianOperator::from_triplets(2, vec![(2, 0, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn rayleigh_homogeneous() {
        let a = SparseHermitianOperator::from_triplets(2, vec![(0, 0, c(1.0, 0.0)), (1, 1, c(3.0, 0.0))]).unwrap();
        let m = MassMatrix::new(vec![1.0, 2.0]).unwrap();
        let x = [c(1.0, 1.0), c(0.5, -2.0)];
        let r = rayleigh_quotient(&a, &m, &x).unwrap();
        let s = c(-0.3, 2.0);
        let xs: Vec<_> = x.iter().map(|v| v * s).collect();
        assert!((rayleigh_quotient(&a, &m, &xs).unwrap() - r).abs() < 1e-14);
        assert!(rayleigh_quotient(&a, &m, &[c(0.0, 0.0); 2]).is_err());
    }

    #[test]
    fn mass_rejects_negative() {
        assert!(MassMatrix::new(vec![1.0, -1e-3]).is_err());
        assert!(!MassMatrix::new(vec![1.0, 0.0]).unwrap().is_positive());
    }

    #[test]
    fn matrix_market_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.mtx");
        let a = SparseHermitianOperator::from_triplets(2, vec![(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, -1.0))]).unwrap();
        a.write_matrix_market(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate complex general\n2 2 2\n"));
    }
}
