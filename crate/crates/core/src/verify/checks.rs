use std::f64::consts::PI;

use super::spec::analytic_diameter;
use super::{CheckOutcome, Status};
use crate::constants::{
    a_n, c_lambda_root_detailed, epsilon_threshold, li_yau_predicate, moser_product_bound, moser_product_converged,
    omega, sobolev_cs, theorem_t3_bound, AbstractConstants, ActiveBranch, BoundOptions, GeometryBudget, SecondBranch,
};
use crate::eigen::{first_positive, smallest_eigenpairs, EigenResult, SolverConfig};
use crate::error::{domain, Result};
use crate::mesh::{face_gradient_norms, graph_diameter, ModelManifold, TriangleMesh};
use crate::operators::{
    build_connection, connection_laplacian_1forms, killing_rotation_field, rayleigh_quotient, sample_tangent_field,
    weitzenboeck_eigen_check,
};
use crate::spectra::{
    product_oneform_spectrum, sphere_function_spectrum, sphere_oneform_rough_spectrum, torus_function_spectrum,
    torus_oneform_rough_spectrum, AnalyticSpectrum,
};

const ROOT_TOL: f64 = 1e-10;
const TAIL_TOL: f64 = 1e-12;
/// Eigenvalues below this multiple of the operator scale count as zero.
const ZERO_TOL: f64 = 1e-8;
const KILLING_BAND: f64 = 0.02;
const LIPSCHITZ_SLACK: f64 = 0.05;
const CONTINUITY_TOL: f64 = 1e-9;
const RAY_POINTS: usize = 10;

fn surface_mesh(manifold: &ModelManifold) -> Result<TriangleMesh> {
    if let ModelManifold::Product { .. } = manifold {
        return Err(domain("this check needs a surface mesh; products are spectral only"));
    }
    manifold.build_mesh()
}

fn rough_eigenpairs(mesh: &TriangleMesh, k: usize, solver: &SolverConfig) -> Result<EigenResult> {
    let conn = build_connection(mesh)?;
    let (l, m) = connection_laplacian_1forms(mesh, &conn)?;
    smallest_eigenpairs(&l, &m, &SolverConfig { k, ..solver.clone() })
}

/// Sandwich `a_n e^{-(n-1)Λ} ≤ ΛC(Λ) ≤ ω_n` and root residuals on a grid.
pub fn check_lemma_l2_grid(dims: &[usize], lambdas: &[f64]) -> Result<CheckOutcome> {
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
        return Err(domain(format!("Λ grid points must be positive and finite, got {l}")));
    }
    let mut out = CheckOutcome::new("lemma_l2_grid", Status::Pass);
    out.tolerance = Some(ROOT_TOL);
    for &n in dims {
        let w = omega(n)?;
        let a = a_n(n)?;
        for &lambda in lambdas {
            let root = c_lambda_root_detailed(n, lambda)?;
            let product = root.product();
            let lower = a * (-((n - 1) as f64) * lambda).exp();
            let residual = root.residual.abs() / w;
            let key = format!("n={n},lambda={lambda:e}");
            out.measure(format!("lambda_c[{key}]"), product);
            out.measure(format!("relative_residual[{key}]"), residual);
            out.bound(format!("lower[{key}]"), lower);
            out.bound(format!("upper[{key}]"), w);
            out.assert(lower <= product && product <= w && residual < ROOT_TOL);
        }
    }
    Ok(out)
}

/// Converged Moser product against its closed-form bound.
pub fn check_lemma_l6_grid(t_grid: &[f64], gamma_grid: &[f64]) -> Result<CheckOutcome> {
    if let Some(g) = gamma_grid.iter().find(|g| !(**g > 1.0)) {
        return Err(domain(format!("γ grid points must exceed 1, got {g}")));
    }
    let mut out = CheckOutcome::new("lemma_l6_grid", Status::Pass);
    out.tolerance = Some(TAIL_TOL);
    for &t in t_grid {
        for &gamma in gamma_grid {
            let (product, terms, tail) = moser_product_converged(t, gamma, TAIL_TOL)?;
            let bound = moser_product_bound(t, gamma)?;
            let key = format!("t={t:e},gamma={gamma:e}");
            out.measure(format!("product[{key}]"), product);
            out.measure(format!("terms[{key}]"), terms as f64);
            out.measure(format!("log_tail[{key}]"), tail);
            out.measure(format!("slack_ratio[{key}]"), bound / product);
            out.bound(format!("closed_form[{key}]"), bound);
            out.assert(product <= bound && tail < TAIL_TOL);
        }
    }
    Ok(out)
}

fn weitzenboeck_tolerance(manifold: &ModelManifold) -> Result<f64> {
    match manifold {
        ModelManifold::IcoSphere { .. } => Ok(0.03),
        ModelManifold::FlatTorus { .. } => Ok(0.05),
        ModelManifold::Product { .. } => Err(domain("the Weitzenböck check needs a surface mesh")),
    }
}

/// Hodge versus shifted rough spectrum on the configured mesh and on the
/// mesh it refines. Passes when the worst relative residual is under the
/// tolerance on the configured mesh and strictly smaller than on the coarser
/// one.
pub fn check_weitzenboeck(manifold: &ModelManifold, k: usize, solver: &SolverConfig) -> Result<CheckOutcome> {
    let tol = weitzenboeck_tolerance(manifold)?;
    let mut out = CheckOutcome::new("weitzenboeck", Status::Pass);
    out.tolerance = Some(tol);
    if k == 0 {
        out.note("k = 0: nothing to compare");
        return Ok(out);
    }
    let curvature = manifold.gaussian_curvature().unwrap_or(0.0);
    let coarse = manifold
        .coarsened()
        .ok_or_else(|| domain("the configured mesh has no coarser parent to compare against"))?;
    let worst = |pairs: &[crate::operators::WeitzenboeckPair]| pairs.iter().map(|p| p.residual).fold(0.0, f64::max);

    let fine_pairs = weitzenboeck_eigen_check(&manifold.build_mesh()?, k, curvature, solver)?;
    let coarse_pairs = weitzenboeck_eigen_check(&coarse.build_mesh()?, k, curvature, solver)?;
    for (i, p) in fine_pairs.iter().enumerate() {
        out.measure(format!("hodge[{i}]"), p.hodge);
        out.measure(format!("rough[{i}]"), p.rough);
        out.measure(format!("residual[{i}]"), p.residual);
    }
    let (fine, coarse_worst) = (worst(&fine_pairs), worst(&coarse_pairs));
    out.measure("worst_residual", fine);
    out.measure("worst_residual_coarse", coarse_worst);
    out.bound("curvature_shift", curvature);
    out.bound("tolerance", tol);
    out.assert(fine < tol && fine < coarse_worst);
    out.note("residual = |μ - (λ + K)| / max(μ, first positive μ)");
    Ok(out)
}

/// Either parallel 1-forms exist or `λ₁ ≤ κ`; records which branch holds.
pub fn check_prop_p3(manifold: &ModelManifold, solver: &SolverConfig) -> Result<CheckOutcome> {
    let mesh = surface_mesh(manifold)?;
    let chi = mesh.euler_characteristic();
    let b1 = 2 - chi;
    let mut out = CheckOutcome::new("prop_p3", Status::Reported);
    out.measure("euler_characteristic", chi as f64);
    out.measure("first_betti_number", b1 as f64);
    if b1 <= 0 {
        out.note("not applicable: first Betti number is zero");
        return Ok(out);
    }
    let r = rough_eigenpairs(&mesh, solver.k.max(3), solver)?;
    let threshold = ZERO_TOL * r.scale;
    let kernel = r.values.iter().filter(|&&v| v < threshold).count();
    for (i, v) in r.values.iter().enumerate() {
        out.measure(format!("eigenvalue[{i}]"), *v);
    }
    // Each complex eigenvector of the connection Laplacian is a 2-plane of
    // real 1-forms.
    out.measure("kernel_real_dimension", 2.0 * kernel as f64);
    out.bound("zero_threshold", threshold);
    if kernel > 0 {
        out.assert(true);
        out.note("branch: parallel 1-forms");
    } else {
        let kappa = manifold.gaussian_curvature().unwrap_or(0.0).max(0.0);
        out.bound("kappa", kappa);
        out.assert(r.values[0] <= kappa + threshold);
        out.note("branch: first eigenvalue below the Ricci upper bound");
    }
    Ok(out)
}

/// Rayleigh quotient of a Killing field's dual (rotation on a sphere,
/// translation on a torus) against `sup Ric`, plus min-max consistency.
pub fn check_prop_p4(manifold: &ModelManifold, solver: &SolverConfig) -> Result<CheckOutcome> {
    let mesh = surface_mesh(manifold)?;
    let conn = build_connection(&mesh)?;
    let (l, m) = connection_laplacian_1forms(&mesh, &conn)?;
    let field = match manifold {
        ModelManifold::IcoSphere { .. } => killing_rotation_field(&mesh, &conn, [0.0, 0.0, 1.0]),
        _ => sample_tangent_field(&mesh, &conn, |_| [1.0, 0.0, 0.0]),
    };
    let rq = rayleigh_quotient(&l, &m, &field)?;
    let r = smallest_eigenpairs(&l, &m, &SolverConfig { k: 1, ..solver.clone() })?;
    let kappa = manifold.gaussian_curvature().unwrap_or(0.0);
    let slack = ZERO_TOL * r.scale;
    let mut out = CheckOutcome::new("prop_p4", Status::Pass);
    out.tolerance = Some(KILLING_BAND);
    out.measure("rayleigh_quotient", rq);
    out.measure("lambda_min", r.values[0]);
    out.bound("sup_ricci", kappa);
    out.bound("band_low", kappa * (1.0 - KILLING_BAND) - slack);
    out.bound("band_high", kappa * (1.0 + KILLING_BAND) + slack);
    out.assert((rq - kappa).abs() <= KILLING_BAND * kappa + slack);
    out.assert(r.values[0] <= rq + slack);
    Ok(out)
}

/// Pinching ratio of the first eigenform against `1 - 2ε`. Only asserted
/// when `ε < 1/2`.
pub fn check_pinching(
    manifold: &ModelManifold,
    budget: &GeometryBudget,
    consts: &AbstractConstants,
    epsilon_dim: usize,
    solver: &SolverConfig,
) -> Result<CheckOutcome> {
    let mesh = surface_mesh(manifold)?;
    let r = rough_eigenpairs(&mesh, 1, solver)?;
    let theta = &r.vectors[0];
    let sq: Vec<f64> = theta.iter().map(|z| z.norm_sqr()).collect();
    let rho = sq.iter().copied().fold(f64::INFINITY, f64::min) / sq.iter().copied().fold(0.0, f64::max);
    let lambda = r.values[0];
    let mut out = CheckOutcome::new("pinching", Status::Reported);
    out.measure("lambda", lambda);
    out.measure("pinching_ratio", rho);
    let epsilon = if lambda < ZERO_TOL * r.scale {
        out.note("first eigenvalue is zero to solver accuracy; ε taken at its λ → 0 limit");
        0.0
    } else {
        let b = GeometryBudget { dim: epsilon_dim, ..*budget };
        let cs = sobolev_cs(&b, consts)?;
        out.note(format!("ε evaluated at dimension {epsilon_dim}"));
        epsilon_threshold(&b, lambda, cs, consts)?
    };
    out.measure("epsilon", epsilon);
    out.bound("one_minus_two_epsilon", 1.0 - 2.0 * epsilon);
    if epsilon < 0.5 {
        out.tolerance = Some(1e-6);
        out.assert(rho >= 1.0 - 2.0 * epsilon - 1e-6);
    } else {
        out.note("ε >= 1/2: the pinching bound is vacuous");
    }
    Ok(out)
}

/// The eigenvalue fed to the bound and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct T3Measurement {
    pub lambda1: f64,
    pub euler_characteristic: i64,
    pub source: String,
}

fn factor_spectra(m: &ModelManifold, cutoff: f64) -> Result<(AnalyticSpectrum, AnalyticSpectrum, i64)> {
    match *m {
        ModelManifold::FlatTorus { lx, ly, .. } => {
            Ok((torus_function_spectrum(lx, ly, cutoff)?, torus_oneform_rough_spectrum(lx, ly, cutoff)?, 0))
        }
        ModelManifold::IcoSphere { radius, .. } => {
            Ok((sphere_function_spectrum(radius, cutoff)?, sphere_oneform_rough_spectrum(radius, cutoff)?, 2))
        }
        ModelManifold::Product { .. } => Err(domain("nested products are not supported")),
    }
}

impl T3Measurement {
    /// Measured on the mesh for surfaces, composed from analytic spectra for
    /// two-factor products, or taken from `lambda1` when given.
    pub fn obtain(
        manifold: &ModelManifold,
        mesh: Option<&TriangleMesh>,
        lambda1: Option<f64>,
        solver: &SolverConfig,
    ) -> Result<Self> {
        match manifold {
            ModelManifold::Product { factors } => {
                let [a, b] = factors.as_slice() else {
                    return Err(domain("products need exactly two factors"));
                };
                // Every first eigenvalue of the factors is below this.
                let cutoff = 10.0 * [a, b].iter().map(|f| (2.0 * PI / analytic_diameter(f)).powi(2)).fold(0.0, f64::max);
                let (a0, a1, ca) = factor_spectra(a, cutoff)?;
                let (b0, b1, cb) = factor_spectra(b, cutoff)?;
                let spec = product_oneform_spectrum(&a0, &a1, &b0, &b1, cutoff)?;
                let measured = match lambda1 {
                    Some(v) => v,
                    None => spec.first_positive().ok_or_else(|| domain("no positive eigenvalue below the cutoff"))?.0,
                };
                Ok(T3Measurement { lambda1: measured, euler_characteristic: ca * cb, source: "product spectrum".into() })
            }
            _ => {
                let owned;
                let mesh = match mesh {
                    Some(m) => m,
                    None => {
                        owned = manifold.build_mesh()?;
                        &owned
                    }
                };
                let chi = mesh.euler_characteristic();
                if let Some(v) = lambda1 {
                    return Ok(T3Measurement { lambda1: v, euler_characteristic: chi, source: "given".into() });
                }
                let r = rough_eigenpairs(mesh, solver.k.max(4), solver)?;
                let v = first_positive(&r, ZERO_TOL).ok_or_else(|| domain("no positive eigenvalue among those computed"))?;
                Ok(T3Measurement { lambda1: v, euler_characteristic: chi, source: "connection Laplacian".into() })
            }
        }
    }
}

/// Reports `√λ₁ D` next to the lower bound and asserts the bound's
/// structure: non-increasing along `κ` and `‖Riem‖_{2p}` rays and
/// continuous where the active branch switches.
pub fn check_theorem_t3(
    budget: &GeometryBudget,
    consts: &AbstractConstants,
    options: BoundOptions,
    measured: &T3Measurement,
) -> Result<Vec<CheckOutcome>> {
    let bound = theorem_t3_bound(budget, consts, options)?;
    let lhs = measured.lambda1.sqrt() * budget.diameter;
    let mut report = CheckOutcome::new("theorem_t3", Status::Reported);
    report.measure("lambda1", measured.lambda1);
    report.measure("sqrt_lambda1_diameter", lhs);
    report.measure("euler_characteristic", measured.euler_characteristic as f64);
    report.bound("rhs", bound.value);
    report.bound("curvature_branch", bound.curvature_branch);
    report.bound("exponential_branch", bound.exponential_branch);
    report.bound("tilde_c", bound.tilde_c);
    report.measure("ratio", lhs / bound.value);
    report.note(format!("eigenvalue from {}", measured.source));
    report.note(format!(
        "active branch: {}",
        match bound.active {
            ActiveBranch::Curvature => "curvature",
            ActiveBranch::Exponential => "exponential",
        }
    ));
    if measured.euler_characteristic == 0 {
        report.note("χ = 0: the bound's hypothesis does not hold here");
    }

    let mut structure = CheckOutcome::new("theorem_t3_structure", Status::Pass);
    structure.tolerance = Some(CONTINUITY_TOL);
    let rhs = |b: &GeometryBudget, c: &AbstractConstants| theorem_t3_bound(b, c, options).map(|x| x.value);
    let ray = |i: usize| 10.0 * i as f64 / (RAY_POINTS - 1) as f64;
    for (name, set) in [
        ("kappa", (|b: &mut GeometryBudget, v: f64| b.kappa = v) as fn(&mut GeometryBudget, f64)),
        ("riem_2p", |b: &mut GeometryBudget, v: f64| b.riem_2p = v),
    ] {
        let mut values = Vec::with_capacity(RAY_POINTS);
        for i in 0..RAY_POINTS {
            let mut b = *budget;
            set(&mut b, ray(i));
            let v = rhs(&b, consts)?;
            structure.measure(format!("{name}_ray[{}]", ray(i)), v);
            values.push(v);
        }
        structure.assert(values.windows(2).all(|w| w[1] <= w[0]));
    }

    // The branches meet where C̃ = (1 + √(‖Riem‖D²)) d^{1/e - 1} with
    // d = e^{-(2n-1)Λ} and e the curvature exponent; reach it by rescaling
    // C₀, which enters C̃ as 1/C₀.
    let d = bound.exponential_branch / if matches!(options.second_branch, SecondBranch::Corollary) { bound.tilde_c } else { 1.0 };
    let riem = (budget.riem_2p * budget.diameter * budget.diameter).sqrt();
    let target = match options.second_branch {
        SecondBranch::Theorem => (1.0 + riem) * d.powf(1.0 / bound.exponent - 1.0),
        SecondBranch::Corollary => {
            ((1.0 + riem).powf(bound.exponent) * d.powf(1.0 - bound.exponent)).powf(1.0 / (bound.exponent - 1.0))
        }
    };
    let c0_switch = consts.c0_np * bound.tilde_c / target;
    let side = |f: f64| {
        let c = AbstractConstants { c0_np: c0_switch * f, ..*consts };
        theorem_t3_bound(budget, &c, options)
    };
    let (below, above) = (side(1.0 - 1e-12)?, side(1.0 + 1e-12)?);
    let jump = (below.value - above.value).abs();
    structure.measure("switch_c0_np", c0_switch);
    structure.measure("switch_jump", jump);
    structure.bound("switch_jump_max", CONTINUITY_TOL);
    structure.assert(jump < CONTINUITY_TOL && below.active != above.active);
    Ok(vec![report, structure])
}

type TestFunction = (&'static str, Box<dyn Fn([f64; 3]) -> f64>);

fn lipschitz_battery(manifold: &ModelManifold) -> Vec<TestFunction> {
    match *manifold {
        ModelManifold::IcoSphere { radius: r, .. } => vec![
            ("constant", Box::new(|_| 1.0)),
            ("x", Box::new(move |p: [f64; 3]| p[0] / r)),
            ("y", Box::new(move |p: [f64; 3]| p[1] / r)),
            ("z", Box::new(move |p: [f64; 3]| p[2] / r)),
            ("xy", Box::new(move |p: [f64; 3]| p[0] * p[1] / (r * r))),
            ("zonal_2", Box::new(move |p: [f64; 3]| (3.0 * p[2] * p[2] - r * r) / (2.0 * r * r))),
        ],
        ModelManifold::FlatTorus { lx, ly, .. } => vec![
            ("constant", Box::new(|_| 1.0)),
            ("cos_x", Box::new(move |p: [f64; 3]| (2.0 * PI * p[0] / lx).cos())),
            ("sin_y", Box::new(move |p: [f64; 3]| (2.0 * PI * p[1] / ly).sin())),
            ("cos_x_plus_y", Box::new(move |p: [f64; 3]| (2.0 * PI * (p[0] / lx + p[1] / ly)).cos())),
        ],
        ModelManifold::Product { .. } => Vec::new(),
    }
}

/// `osc f ≤ (1 + 5%) ‖∇f‖_∞ D` for low-order test functions, with the
/// discrete gradient sup taken over faces and `D` the graph diameter.
pub fn check_lipschitz(manifold: &ModelManifold) -> Result<CheckOutcome> {
    let mesh = surface_mesh(manifold)?;
    let diameter = graph_diameter(&mesh)?.value;
    let mut out = CheckOutcome::new("lipschitz", Status::Pass);
    out.tolerance = Some(LIPSCHITZ_SLACK);
    out.measure("graph_diameter", diameter);
    for (name, f) in lipschitz_battery(manifold) {
        let values: Vec<f64> = mesh.vertices().iter().map(|&p| f(p)).collect();
        let osc = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().copied().fold(f64::INFINITY, f64::min);
        let grad = face_gradient_norms(&mesh, &values)?.into_iter().fold(0.0, f64::max);
        let bound = (1.0 + LIPSCHITZ_SLACK) * grad * diameter;
        out.measure(format!("oscillation[{name}]"), osc);
        out.measure(format!("gradient_sup[{name}]"), grad);
        out.bound(format!("lipschitz[{name}]"), bound);
        out.assert(osc <= bound);
    }
    Ok(out)
}

/// Logic gate: when the Li–Yau predicate holds and
/// `c e^{-c√(κD²)} > (n-1)κD²`, a harmonic non-parallel 1-form cannot exist.
pub fn prop_p5_implication(
    lambda1: f64,
    diameter: f64,
    kappa: f64,
    c: f64,
    dim: usize,
    has_nonparallel_harmonic: bool,
) -> Result<CheckOutcome> {
    if !(diameter > 0.0) || !(kappa >= 0.0) || !(c > 0.0) || dim < 2 {
        return Err(domain("need D > 0, κ >= 0, c > 0 and dim >= 2"));
    }
    let k = kappa * diameter * diameter;
    let predicate = li_yau_predicate(lambda1, diameter, kappa, c);
    let lhs = c * (-c * k.sqrt()).exp();
    let rhs = (dim - 1) as f64 * k;
    let mut out = CheckOutcome::new("prop_p5_implication", Status::Pass);
    out.measure("li_yau_predicate", if predicate { 1.0 } else { 0.0 });
    out.measure("condition_lhs", lhs);
    out.bound("condition_rhs", rhs);
    out.measure("has_nonparallel_harmonic", if has_nonparallel_harmonic { 1.0 } else { 0.0 });
    let forced = predicate && lhs > rhs;
    if forced {
        out.note("hypotheses hold: harmonic 1-forms must be parallel");
    } else {
        out.note("hypotheses void: no constraint");
    }
    out.assert(!(forced && has_nonparallel_harmonic));
    Ok(out)
}
