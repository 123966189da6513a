use num_complex::Complex64;
use proptest::prelude::*;
use roughlap::constants::{
    a_n, c_lambda_root_detailed, moser_product_bound, moser_product_partial, omega, theorem_t3_rhs,
    AbstractConstants, GeometryBudget,
};
use roughlap::eigen::cluster_multiplicities;
use roughlap::mesh::{generate_flat_torus, generate_icosphere, MeshGeometry};
use roughlap::operators::{rayleigh_quotient, MassMatrix, SparseHermitianOperator};
use roughlap::spectra::{
    product_oneform_spectrum, sphere_function_spectrum, sphere_oneform_rough_spectrum, torus_function_spectrum,
    torus_oneform_rough_spectrum,
};

fn budget(kappa: f64, riem: f64, d: f64) -> GeometryBudget {
    GeometryBudget { dim: 4, kappa, diameter: d, riem_2p: riem, ric_minus_p: 0.0, p_exponent: 4.0 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lambda_c_sandwich(n in 2usize..=8, log_l in -2.0f64..1.0) {
        let lambda = 10f64.powf(log_l);
        let r = c_lambda_root_detailed(n, lambda).unwrap();
        let w = omega(n).unwrap();
        prop_assert!(r.residual.abs() < 1e-10 * w);
        prop_assert!(r.product() <= w);
        prop_assert!(r.product() >= a_n(n).unwrap() * (-((n - 1) as f64) * lambda).exp());
    }

    #[test]
    fn moser_partial_products_increase_below_bound(t in 0.01f64..100.0, gamma in 1.05f64..5.0, n in 1usize..60) {
        let a = moser_product_partial(t, gamma, n).unwrap();
        let b = moser_product_partial(t, gamma, n + 1).unwrap();
        prop_assert!(b >= a);
        prop_assert!(b <= moser_product_bound(t, gamma).unwrap());
    }

    #[test]
    fn bound_non_increasing_in_curvature(k in 0.0f64..5.0, dk in 0.0f64..5.0, r in 0.0f64..5.0, dr in 0.0f64..5.0, d in 0.1f64..5.0) {
        let c = AbstractConstants::default();
        let base = theorem_t3_rhs(&budget(k, r, d), &c).unwrap();
        prop_assert!(theorem_t3_rhs(&budget(k + dk, r, d), &c).unwrap() <= base);
        prop_assert!(theorem_t3_rhs(&budget(k, r + dr, d), &c).unwrap() <= base);
        prop_assert!(base <= 1.0);
    }

    #[test]
    fn product_rule_commutes(r1 in 0.5f64..2.0, lx in 1.0f64..8.0, ly in 1.0f64..8.0) {
        let cutoff = 6.0;
        let s0 = sphere_function_spectrum(r1, cutoff).unwrap();
        let s1 = sphere_oneform_rough_spectrum(r1, cutoff).unwrap();
        let t0 = torus_function_spectrum(lx, ly, cutoff).unwrap();
        let t1 = torus_oneform_rough_spectrum(lx, ly, cutoff).unwrap();
        let a = product_oneform_spectrum(&s0, &s1, &t0, &t1, cutoff).unwrap();
        let b = product_oneform_spectrum(&t0, &t1, &s0, &s1, cutoff).unwrap();
        prop_assert_eq!(a.expanded(usize::MAX).len(), b.expanded(usize::MAX).len());
        for (x, y) in a.expanded(usize::MAX).iter().zip(b.expanded(usize::MAX)) {
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }
        // The torus contributes two parallel forms.
        prop_assert_eq!(roughlap::spectra::parallel_form_count(&a), 2);
    }

    #[test]
    fn torus_spectrum_scales(lx in 1.0f64..8.0, ly in 1.0f64..8.0, s in 0.25f64..4.0) {
        let a = torus_function_spectrum(lx, ly, 20.0).unwrap();
        let b = torus_function_spectrum(s * lx, s * ly, 20.0 / (s * s)).unwrap();
        prop_assert_eq!(a.entries.len(), b.entries.len());
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert!((x.0 - y.0 * s * s).abs() <= 1e-10 * x.0.max(1.0));
            prop_assert_eq!(x.1, y.1);
        }
    }

    #[test]
    fn clustering_preserves_count(mut v in proptest::collection::vec(0.0f64..10.0, 0..40), gap in 0.0f64..0.5) {
        v.sort_by(f64::total_cmp);
        let c = cluster_multiplicities(&v, gap);
        prop_assert_eq!(c.iter().map(|x| x.1).sum::<usize>(), v.len());
        prop_assert!(c.windows(2).all(|w| w[0].0 <= w[1].0));
    }

    #[test]
    fn rayleigh_quotient_is_scale_invariant(
        diag in proptest::collection::vec(0.1f64..10.0, 4),
        x in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
        s in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        let scale = Complex64::new(s.0, s.1);
        prop_assume!(scale.norm() > 1e-3);
        let x: Vec<Complex64> = x.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        prop_assume!(x.iter().map(|v| v.norm_sqr()).sum::<f64>() > 1e-6);
        let mut t: Vec<(usize, usize, Complex64)> = diag.iter().enumerate().map(|(i, &d)| (i, i, Complex64::new(d + 2.0, 0.0))).collect();
        t.push((0, 1, Complex64::new(0.3, 0.7)));
        t.push((1, 0, Complex64::new(0.3, -0.7)));
        let l = SparseHermitianOperator::from_triplets(4, t).unwrap();
        let m = MassMatrix::new(diag.clone()).unwrap();
        let a = rayleigh_quotient(&l, &m, &x).unwrap();
        let xs: Vec<Complex64> = x.iter().map(|v| v * scale).collect();
        prop_assert!((a - rayleigh_quotient(&l, &m, &xs).unwrap()).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn gauss_bonnet_on_tori(lx in 0.5f64..10.0, ly in 0.5f64..10.0, nx in 3usize..24, ny in 3usize..24) {
        let mesh = generate_flat_torus(lx, ly, nx, ny).unwrap();
        prop_assert_eq!(mesh.euler_characteristic(), 0);
        let defects: f64 = mesh.angle_defects().iter().sum();
        prop_assert!(defects.abs() < 1e-9);
        prop_assert!((mesh.total_area() - lx * ly).abs() < 1e-9 * lx * ly);
    }
}

#[test]
fn gauss_bonnet_on_spheres() {
    for s in 0..=5 {
        let mesh = generate_icosphere(1.3, s).unwrap();
        assert_eq!(mesh.euler_characteristic(), 2);
        let g = MeshGeometry::measure(&mesh).unwrap();
        assert!(g.gauss_bonnet_residual(2).abs() < 1e-9);
    }
}
