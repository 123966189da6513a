//! Closed-form spectra of model manifolds and the product rule for 1-forms.
//!
//! A spectrum is truncated at `cutoff` and contains every eigenvalue up to
//! it, so sums formed by the product rule are complete below the smallest
//! cutoff involved.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Values closer than this (relative) are merged into one entry.
const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSpectrum {
    /// `(eigenvalue, multiplicity)`, ascending.
    pub entries: Vec<(f64, usize)>,
    pub form_degree: u8,
    pub manifold: String,
    pub cutoff: f64,
}

impl AnalyticSpectrum {
    fn from_values(values: Vec<(f64, usize)>, form_degree: u8, manifold: String, cutoff: f64) -> Self {
        AnalyticSpectrum { entries: merge(values), form_degree, manifold, cutoff }
    }

    /// Smallest nonzero eigenvalue, if any is below the cutoff.
    pub fn first_positive(&self) -> Option<(f64, usize)> {
        self.entries.iter().copied().find(|&(v, _)| v > 0.0)
    }

    /// Total multiplicity below the cutoff.
    pub fn count(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Eigenvalues repeated by multiplicity, ascending, at most `limit`.
    pub fn expanded(&self, limit: usize) -> Vec<f64> {
        self.entries.iter().flat_map(|&(v, m)| std::iter::repeat_n(v, m)).take(limit).collect()
    }

    /// Every eigenvalue shifted by `shift` (Weitzenböck comparisons).
    pub fn shifted(&self, shift: f64) -> Self {
        AnalyticSpectrum {
            entries: self.entries.iter().map(|&(v, m)| (v + shift, m)).collect(),
            cutoff: self.cutoff + shift,
            ..self.clone()
        }
    }

    /// CSV with header `eigenvalue,multiplicity`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["eigenvalue", "multiplicity"])?;
        for &(v, m) in &self.entries {
            w.write_record([format!("{v:e}"), m.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sorts and merges numerically equal values, keeping the first
/// representative so that exact values stay exact.
fn merge(mut values: Vec<(f64, usize)>) -> Vec<(f64, usize)> {
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for (v, m) in values {
        match out.last_mut() {
            Some(last) if (v - last.0).abs() <= MERGE_TOL * v.abs().max(last.0.abs()) => last.1 += m,
            _ => out.push((v, m)),
        }
    }
    out
}

fn check_lengths(lx: f64, ly: f64) -> Result<()> {
    if !(lx > 0.0 && ly > 0.0) || !lx.is_finite() || !ly.is_finite() {
        return Err(domain(format!("torus side lengths must be positive, got {lx} x {ly}")));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(domain(format!("radius must be positive, got {r}")));
    }
    Ok(())
}

/// `(2πk/lx)² + (2πm/ly)²` over integer `(k, m)`.
pub fn torus_function_spectrum(lx: f64, ly: f64, cutoff: f64) -> Result<AnalyticSpectrum> {
    check_lengths(lx, ly)?;
    let tag = format!("flat_torus({lx},{ly})");
    let (fx, fy) = ((2.0 * PI / lx).powi(2), (2.0 * PI / ly).powi(2));
    let mut values = Vec::new();
    if cutoff >= 0.0 {
        let kmax = (cutoff / fx).sqrt().floor() as i64;
        let mmax = (cutoff / fy).sqrt().floor() as i64;
        for k in -kmax..=kmax {
            for m in -mmax..=mmax {
                let v = fx * (k * k) as f64 + fy * (m * m) as f64;
                if v <= cutoff {
                    values.push((v, 1));
                }
            }
        }
    }
    Ok(AnalyticSpectrum::from_values(values, 0, tag, cutoff))
}

/// The flat torus has trivial holonomy, so 1-forms are pairs of functions in
/// the parallel frame `dx, dy`.
pub fn torus_oneform_rough_spectrum(lx: f64, ly: f64, cutoff: f64) -> Result<AnalyticSpectrum> {
    let f = torus_function_spectrum(lx, ly, cutoff)?;
    let entries = f.entries.iter().map(|&(v, m)| (v, 2 * m)).collect();
    Ok(AnalyticSpectrum { entries, form_degree: 1, ..f })
}

/// `l(l+1)/r²` with multiplicity `2l+1`.
pub fn sphere_function_spectrum(radius: f64, cutoff: f64) -> Result<AnalyticSpectrum> {
    check_radius(radius)?;
    let r2 = radius * radius;
    let values = (0u64..)
        .map(|l| ((l * (l + 1)) as f64 / r2, 2 * l as usize + 1))
        .take_while(|&(v, _)| v <= cutoff)
        .collect();
    Ok(AnalyticSpectrum::from_values(values, 0, format!("sphere({radius})"), cutoff))
}

/// Hodge spectrum on 1-forms (`l(l+1)/r²`, exact plus coexact, multiplicity
/// `2(2l+1)`) shifted down by the Ricci curvature `1/r²`.
pub fn sphere_oneform_rough_spectrum(radius: f64, cutoff: f64) -> Result<AnalyticSpectrum> {
    check_radius(radius)?;
    let r2 = radius * radius;
    let values = (1u64..)
        .map(|l| (((l * (l + 1)) as f64 - 1.0) / r2, 2 * (2 * l as usize + 1)))
        .take_while(|&(v, _)| v <= cutoff)
        .collect();
    Ok(AnalyticSpectrum::from_values(values, 1, format!("sphere({radius})"), cutoff))
}

/// Rough Laplacian on 1-forms of `M × N`: `Λ¹(M×N) = Λ¹M ⊕ Λ¹N`, and each
/// summand's eigenvalues are sums with the other factor's function spectrum.
pub fn product_oneform_spectrum(
    m0: &AnalyticSpectrum,
    m1: &AnalyticSpectrum,
    n0: &AnalyticSpectrum,
    n1: &AnalyticSpectrum,
    cutoff: f64,
) -> Result<AnalyticSpectrum> {
    for (name, s, d) in [("m0", m0, 0), ("m1", m1, 1), ("n0", n0, 0), ("n1", n1, 1)] {
        if s.form_degree != d {
            return Err(domain(format!("{name} must have form degree {d}, got {}", s.form_degree)));
        }
    }
    let cutoff = [m0.cutoff, m1.cutoff, n0.cutoff, n1.cutoff].into_iter().fold(cutoff, f64::min);
    let mut values = Vec::new();
    for (a, b) in [(m1, n0), (m0, n1)] {
        for &(x, mx) in &a.entries {
            for &(y, my) in &b.entries {
                if x + y <= cutoff {
                    values.push((x + y, mx * my));
                }
            }
        }
    }
    let tag = format!("{} x {}", m0.manifold, n0.manifold);
    Ok(AnalyticSpectrum::from_values(values, 1, tag, cutoff))
}

/// Multiplicity of the zero eigenvalue.
pub fn parallel_form_count(spec: &AnalyticSpectrum) -> usize {
    spec.entries.iter().filter(|e| e.0 == 0.0).map(|e| e.1).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_torus_lattice() {
        let s = torus_function_spectrum(2.0 * PI, 2.0 * PI, 5.0).unwrap();
        assert_eq!(s.entries, vec![(0.0, 1), (1.0, 4), (2.0, 4), (4.0, 4), (5.0, 8)]);
        let one = torus_oneform_rough_spectrum(2.0 * PI, 2.0 * PI, 2.0).unwrap();
        assert_eq!(one.entries, vec![(0.0, 2), (1.0, 8), (2.0, 8)]);
        assert_eq!(parallel_form_count(&one), 2);
        assert!(torus_function_spectrum(1.0, 1.0, -1.0).unwrap().entries.is_empty());
        assert!(torus_function_spectrum(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn torus_scaling() {
        let a = torus_function_spectrum(1.0, 1.5, 400.0).unwrap();
        let b = torus_function_spectrum(2.0, 3.0, 100.0).unwrap();
        assert_eq!(a.entries.len(), b.entries.len());
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x.0 / 4.0 - y.0).abs() < 1e-12 * x.0.max(1.0));
            assert_eq!(x.1, y.1);
        }
    }

    #[test]
    fn sphere_spectra() {
        let f = sphere_function_spectrum(1.0, 6.0).unwrap();
        assert_eq!(f.entries, vec![(0.0, 1), (2.0, 3), (6.0, 5)]);
        assert_eq!(sphere_function_spectrum(1.0, 1.0).unwrap().entries, vec![(0.0, 1)]);
        let f2 = sphere_function_spectrum(2.0, 1.5).unwrap();
        assert_eq!(f2.entries, vec![(0.0, 1), (0.5, 3), (1.5, 5)]);
        let r = sphere_oneform_rough_spectrum(1.0, 5.0).unwrap();
        assert_eq!(r.entries, vec![(1.0, 6), (5.0, 10)]);
        assert_eq!(parallel_form_count(&r), 0);
        assert_eq!(parallel_form_count(&f), 1);
        assert!(sphere_oneform_rough_spectrum(-1.0, 5.0).is_err());
    }

    #[test]
    fn sphere_product() {
        let f = sphere_function_spectrum(1.0, 10.0).unwrap();
        let r = sphere_oneform_rough_spectrum(1.0, 10.0).unwrap();
        let p = product_oneform_spectrum(&f, &r, &f, &r, 10.0).unwrap();
        assert_eq!(p.first_positive(), Some((1.0, 12)));
        assert!(product_oneform_spectrum(&r, &r, &f, &r, 10.0).is_err());
    }

    #[test]
    fn csv_export() {
        let s = sphere_function_spectrum(1.0, 2.0).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "eigenvalue,multiplicity\n0e0,1\n2e0,3\n");
    }
}
