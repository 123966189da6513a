//! Smallest eigenpairs of a Hermitian pencil `(L, M)` with `L` positive
//! semidefinite and `M` diagonal, by block Krylov iteration on the
//! shift-inverted operator `(L - σM)⁻¹M` with Rayleigh–Ritz extraction.
//!
//! The sparse Cholesky factorization comes from faer and is run
//! single-threaded so that results do not depend on the thread count.
//! Every Krylov block starts from `(L - σM)⁻¹M` applied to something, so
//! directions in the null space of `M` (zero-mass edges) never enter the
//! basis and `M` defines a proper inner product on it.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par, Side};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::operators::{MassMatrix, SparseHermitianOperator};
use crate::par;

type C = Complex64;

fn zero() -> C {
    C::new(0.0, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub k: usize,
    /// Bound on `‖Lx - λMx‖ / ‖Mx‖` for every returned pair.
    pub tol: f64,
    /// Maximum number of Krylov block expansions.
    pub max_iter: usize,
    pub seed: u64,
    /// Shift `σ`; `None` picks `-1e-8` times the largest `L_ii / M_ii`,
    /// which keeps `L - σM` definite when `L` has a kernel.
    pub shift: Option<f64>,
    /// Block size; `None` uses `k + 4`.
    pub block: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { k: 6, tol: 1e-8, max_iter: 300, seed: 20_240_601, shift: None, block: None }
    }
}

impl SolverConfig {
    pub fn with_k(k: usize) -> Self {
        SolverConfig { k, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(domain("k must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(domain("tolerance must be positive"));
        }
        if self.max_iter == 0 {
            return Err(domain("max_iter must be at least 1"));
        }
        if matches!(self.block, Some(0)) {
            return Err(domain("block size must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Ascending.
    pub values: Vec<f64>,
    /// `M`-orthonormal.
    pub vectors: Vec<Vec<C>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub shift: f64,
    /// Largest `L_ii / M_ii`, the scale used for relative thresholds.
    pub scale: f64,
}

/// Largest diagonal ratio `L_ii / M_ii` over entries with `M_ii > 0`.
pub fn spectral_scale(l: &SparseHermitianOperator, m: &MassMatrix) -> f64 {
    l.diagonal()
        .iter()
        .zip(m.weights())
        .filter(|(_, &w)| w > 0.0)
        .map(|(d, w)| d / w)
        .fold(0.0, f64::max)
}

struct ShiftInvert<'a> {
    mass: &'a MassMatrix,
    llt: faer::sparse::linalg::solvers::Llt<usize, C>,
}

impl<'a> ShiftInvert<'a> {
    fn new(l: &SparseHermitianOperator, mass: &'a MassMatrix, sigma: f64) -> Result<Self> {
        faer::set_global_parallelism(Par::Seq);
        let n = l.dim();
        let mut triplets: Vec<Triplet<usize, usize, C>> =
            l.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        for (i, &w) in mass.weights().iter().enumerate() {
            if w != 0.0 {
                triplets.push(Triplet::new(i, i, C::new(-sigma * w, 0.0)));
            }
        }
        let a = SparseColMat::<usize, C>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let llt = a
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Factorization(format!("L - σM is not positive definite at σ = {sigma:e}: {e:?}")))?;
        Ok(ShiftInvert { mass, llt })
    }

    /// `(L - σM)⁻¹ M x` for every vector of the block.
    fn apply(&self, block: &[Vec<C>]) -> Vec<Vec<C>> {
        let n = self.mass.dim();
        let w = self.mass.weights();
        let mut rhs = Mat::<C>::from_fn(n, block.len(), |i, j| block[j][i] * w[i]);
        self.llt.solve_in_place(rhs.as_mut());
        (0..block.len()).map(|j| (0..n).map(|i| rhs[(i, j)]).collect()).collect()
    }
}

fn dot(x: &[C], y: &[C]) -> C {
    x.iter().zip(y).fold(zero(), |acc, (a, b)| acc + a.conj() * b)
}

fn norm2(x: &[C]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `w ← w - Σ c_i q_i`, entries in parallel.
fn subtract_combination(w: &mut [C], basis: &[Vec<C>], coeffs: &[C]) {
    let old = w.to_vec();
    par::fill_indexed(w, |r| {
        basis.iter().zip(coeffs).fold(old[r], |acc, (q, c)| acc - c * q[r])
    });
}

/// Appends the `M`-orthonormalized candidates to `basis` (two passes of
/// classical Gram–Schmidt) and returns how many survived.
fn extend_basis(basis: &mut Vec<Vec<C>>, candidates: Vec<Vec<C>>, mass: &MassMatrix) -> usize {
    let mut added = 0;
    for mut w in candidates {
        let before = mass.inner(&w, &w).re.sqrt();
        if !(before > 0.0) {
            continue;
        }
        for _ in 0..2 {
            let mw = mass.apply(&w);
            let coeffs = par::map_slice(basis, |q| dot(q, &mw));
            subtract_combination(&mut w, basis, &coeffs);
        }
        let after = mass.inner(&w, &w).re.sqrt();
        if after > 1e-10 * before {
            w.iter_mut().for_each(|v| *v /= after);
            basis.push(w);
            added += 1;
        }
    }
    added
}

fn random_block(n: usize, b: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C>> {
    (0..b)
        .map(|_| (0..n).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .collect()
}

/// Linear combinations `Σ_i s_ij v_i` for the selected columns `j`.
fn combine(vectors: &[Vec<C>], s: &DMatrix<C>, cols: &[usize]) -> Vec<Vec<C>> {
    let n = vectors[0].len();
    cols.iter()
        .map(|&j| {
            let mut out = vec![zero(); n];
            par::fill_indexed(&mut out, |r| {
                vectors.iter().enumerate().fold(zero(), |acc, (i, v)| acc + s[(i, j)] * v[r])
            });
            out
        })
        .collect()
}

/// Rayleigh–Ritz for `(L, M)` on the span of `vectors`; returns ascending
/// values with `M`-orthonormal Ritz vectors.
fn rayleigh_ritz(l: &SparseHermitianOperator, m: &MassMatrix, vectors: Vec<Vec<C>>) -> (Vec<f64>, Vec<Vec<C>>) {
    let mut q = Vec::with_capacity(vectors.len());
    extend_basis(&mut q, vectors, m);
    if q.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let lq: Vec<Vec<C>> = par::map_slice(&q, |x| l.apply(x));
    let s = q.len();
    let a = DMatrix::from_fn(s, s, |i, j| if i == j { C::new(dot(&q[i], &lq[j]).re, 0.0) } else { dot(&q[i], &lq[j]) });
    let a = (&a + a.adjoint()) * C::new(0.5, 0.0);
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]).then(x.cmp(&y)));
    let values = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    (values, combine(&q, &eig.eigenvectors, &order))
}

/// The `k` smallest eigenpairs of `Lx = λMx`.
pub fn smallest_eigenpairs(l: &SparseHermitianOperator, m: &MassMatrix, config: &SolverConfig) -> Result<EigenResult> {
    config.validate()?;
    let n = l.dim();
    if m.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
    }
    if config.k >= n {
        return Err(domain(format!("k = {} must be below the dimension {n}", config.k)));
    }
    let scale = spectral_scale(l, m);
    if !(scale > 0.0) {
        return Err(domain("operator has no positive diagonal entry with positive mass"));
    }
    let sigma = config.shift.unwrap_or(-1e-8 * scale);
    let op = ShiftInvert::new(l, m, sigma)?;

    let k = config.k;
    let b = config.block.unwrap_or(k + 4).max(k).min(n);
    let max_basis = (6 * b).max(2 * b + k).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut basis: Vec<Vec<C>> = Vec::new();
    let mut images: Vec<Vec<C>> = Vec::new();
    let mut h: Vec<Vec<C>> = Vec::new();
    let mut candidates = op.apply(&random_block(n, b, &mut rng));
    let mut worst = vec![f64::INFINITY; k];

    for iteration in 1..=config.max_iter {
        let start = basis.len();
        let added = extend_basis(&mut basis, candidates, m);
        if added == 0 {
            // Krylov space exhausted; refill with fresh random directions.
            candidates = op.apply(&random_block(n, b, &mut rng));
            continue;
        }
        let new_images = op.apply(&basis[start..]);
        images.extend(new_images.iter().cloned());

        // Grow H = Qᴴ M Z by the new columns and mirror them.
        let size = basis.len();
        for row in h.iter_mut() {
            row.resize(size, zero());
        }
        h.resize(size, vec![zero(); size]);
        let new_cols: Vec<Vec<C>> = par::map_range(size - start, |jj| {
            let mz = m.apply(&images[start + jj]);
            basis.iter().map(|q| dot(q, &mz)).collect()
        });
        for (jj, col) in new_cols.into_iter().enumerate() {
            let j = start + jj;
            for (i, v) in col.into_iter().enumerate() {
                if i >= start && i > j {
                    continue;
                }
                h[i][j] = v;
                h[j][i] = v.conj();
            }
        }
        for (i, row) in h.iter_mut().enumerate().skip(start) {
            row[i] = C::new(row[i].re, 0.0);
        }

        let hm = DMatrix::from_fn(size, size, |i, j| h[i][j]);
        let eig = SymmetricEigen::new(hm);
        let mut order: Vec<usize> = (0..size).collect();
        // Largest θ of the inverted operator first; ties broken by index.
        order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&c)));

        let top: Vec<usize> = order.iter().take(k.min(size)).copied().collect();
        // One free inverse-iteration step: the images of the Ritz vectors are
        // already available, and they carry far less of the stiff part of the
        // spectrum than the Ritz vectors themselves.
        let (lambdas, ritz) = rayleigh_ritz(l, m, combine(&images, &eig.eigenvectors, &top));
        let residuals: Vec<f64> = par::map_range(ritz.len(), |j| {
            let x = &ritz[j];
            let lx = l.apply(x);
            let mx = m.apply(x);
            let r: Vec<C> = lx.iter().zip(&mx).map(|(a, b)| a - b * lambdas[j]).collect();
            norm2(&r) / norm2(&mx)
        });
        if ritz.len() == k {
            worst = residuals.clone();
        }
        if ritz.len() == k && residuals.iter().all(|&r| r <= config.tol) {
            return Ok(EigenResult {
                values: lambdas,
                vectors: ritz,
                residuals,
                iterations: iteration,
                shift: sigma,
                scale,
            });
        }

        if size + b > max_basis {
            // Thick restart on the best half-basis of Ritz vectors; their images follow
            // by linearity, so no extra solves are needed.
            let keep: Vec<usize> = order.iter().take((max_basis / 2).max(b).min(size)).copied().collect();
            basis = combine(&basis, &eig.eigenvectors, &keep);
            images = combine(&images, &eig.eigenvectors, &keep);
            h = (0..keep.len())
                .map(|i| {
                    let mut row = vec![zero(); keep.len()];
                    row[i] = C::new(eig.eigenvalues[keep[i]], 0.0);
                    row
                })
                .collect();
            candidates = images[..b.min(images.len())].to_vec();
        } else {
            candidates = new_images;
        }
    }
    let worst_residual = worst.iter().copied().fold(0.0, f64::max);
    Err(Error::NoConvergence { iterations: config.max_iter, worst_residual, residuals: worst })
}

/// Greedy clustering of ascending values: the next value joins the current
/// cluster while `|b - a| < rel_gap · max(|a|, |b|)`. Values whose
/// magnitude is below `1e-8` of the largest magnitude count as zero and
/// cluster together. Returns `(mean, count)` per cluster.
pub fn cluster_multiplicities(values: &[f64], rel_gap: f64) -> Vec<(f64, usize)> {
    let floor = 1e-8 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut current: Vec<f64> = Vec::new();
    for &v in values {
        let joins = match current.last() {
            None => true,
            Some(&a) => {
                let tiny = a.abs() <= floor && v.abs() <= floor;
                tiny || (v - a).abs() < rel_gap * a.abs().max(v.abs())
            }
        };
        if !joins {
            out.push((current.iter().sum::<f64>() / current.len() as f64, current.len()));
            current.clear();
        }
        current.push(v);
    }
    if !current.is_empty() {
        out.push((current.iter().sum::<f64>() / current.len() as f64, current.len()));
    }
    out
}

/// Smallest value above `zero_tol · result.scale`.
pub fn first_positive(result: &EigenResult, zero_tol: f64) -> Option<f64> {
    let threshold = zero_tol * result.scale;
    result.values.iter().copied().find(|&v| v > threshold)
}
