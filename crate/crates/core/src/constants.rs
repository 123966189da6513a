//! Explicit constants and bound formulas: the Bishop–Gromov type Poincaré
//! radius `R(Λ)`, the Sobolev constant used by Moser iteration, sup-norm
//! bounds for eigenforms and their gradients, and the lower bound for the
//! first eigenvalue of the rough Laplacian on 1-forms.
//!
//! Dimension convention: every function that takes a [`GeometryBudget`]
//! reads `dim` as the ambient dimension. The eigenvalue lower bound is
//! stated for even dimension `dim = 2n` and derives `n = dim / 2` itself.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::integrate;
use crate::roots::increasing_root;

const QUAD_ABS_TOL: f64 = 1e-13;
const QUAD_REL_TOL: f64 = 1e-14;

/// Hypotheses feeding every bound: Ricci lower bound `Ric ≥ -(dim-1)κ`,
/// diameter bound, normalized curvature norms and the integrability exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryBudget {
    pub dim: usize,
    pub kappa: f64,
    pub diameter: f64,
    /// Normalized `‖Riem‖_{2p}`.
    pub riem_2p: f64,
    /// Normalized `‖Ric⁻‖_p`.
    pub ric_minus_p: f64,
    pub p_exponent: f64,
}

impl GeometryBudget {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(domain("dimension must be positive"));
        }
        if !(self.diameter > 0.0) || !self.diameter.is_finite() {
            return Err(domain(format!("diameter must be positive, got {}", self.diameter)));
        }
        if !(self.kappa >= 0.0) {
            return Err(domain(format!("kappa must be nonnegative, got {}", self.kappa)));
        }
        if !(self.riem_2p >= 0.0) || !(self.ric_minus_p >= 0.0) {
            return Err(domain("curvature norms must be nonnegative"));
        }
        if !(self.p_exponent >= 1.0) || !self.p_exponent.is_finite() {
            return Err(domain(format!("exponent p must be finite and >= 1, got {}", self.p_exponent)));
        }
        Ok(())
    }

    /// `Λ = √(κD²)`.
    pub fn lambda_scale(&self) -> f64 {
        (self.kappa * self.diameter * self.diameter).sqrt()
    }

    /// Half-dimension `n` for `dim = 2n`, checking parity and `p > n`.
    pub fn half_dim(&self) -> Result<usize> {
        self.validate()?;
        if !self.dim.is_multiple_of(2) {
            return Err(domain(format!("dimension must be even, got {}", self.dim)));
        }
        let n = self.dim / 2;
        if !(self.p_exponent > n as f64) {
            return Err(domain(format!("need p > n = {n}, got p = {}", self.p_exponent)));
        }
        Ok(n)
    }
}

/// Dimensional constants that are only known to exist. They are explicit
/// inputs so every formula can be evaluated and swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AbstractConstants {
    /// `C(n)` in the Moser sup bound and the Sobolev constant.
    pub c_n: f64,
    /// `C(n,p)` in the gradient sup bound.
    pub c_np: f64,
    /// `C₀(n,p)` absorbing `1 + √t`.
    pub c0_np: f64,
}

impl Default for AbstractConstants {
    fn default() -> Self {
        Self { c_n: 1.0, c_np: 1.0, c0_np: 1.0 }
    }
}

impl AbstractConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c_n", self.c_n), ("c_np", self.c_np), ("c0_np", self.c0_np)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Quantities of the Moser iteration for `|∇θ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoserParameters {
    /// `B = λ + ‖Ric⁻‖_p + ‖Riem‖_{2p}`.
    pub b_value: f64,
    /// `t = 4 C_s √B √(1 + B D²)`.
    pub t_value: f64,
    /// `α = 2pn/(2p-n)`.
    pub alpha: f64,
    /// `β = 2pn/(2p-n+pn)`.
    pub beta: f64,
    /// `γ = n(p-1)/(p(n-2))`.
    pub gamma: f64,
    /// `γ₀ = 2np/(2p-n)`.
    pub gamma0: f64,
    pub sobolev_cs: f64,
}

/// Which exponent `δ` enters `C̃(n,p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaBranch {
    /// `δ = 2pn/(p-n)`, the exponent of the stated bound.
    #[default]
    Main,
    /// `δ = 2pn/(p-n+pn)`.
    Secondary,
}

impl DeltaBranch {
    pub fn delta(self, n: f64, p: f64) -> f64 {
        match self {
            DeltaBranch::Main => 2.0 * p * n / (p - n),
            DeltaBranch::Secondary => 2.0 * p * n / (p - n + p * n),
        }
    }
}

/// Form of the second entry of the outer minimum in the eigenvalue bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondBranch {
    /// `e^{-(2n-1)√(κD²)}` as in the theorem.
    #[default]
    Theorem,
    /// `C̃ e^{-(2n-1)√(κD²)}` as in the isometry-group corollary.
    Corollary,
}

/// Which entry of the outer minimum is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveBranch {
    Curvature,
    Exponential,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundOptions {
    pub delta_branch: DeltaBranch,
    pub second_branch: SecondBranch,
}

/// Evaluated lower bound for `√λ₁ D` with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueBound {
    pub value: f64,
    pub curvature_branch: f64,
    pub exponential_branch: f64,
    pub active: ActiveBranch,
    pub tilde_c: f64,
    pub exponent: f64,
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(domain(format!("dimension must be >= 2, got {n}")));
    }
    Ok(())
}

/// `ω_n = ∫₀^π sin^{n-1} t dt`.
pub fn omega(n: usize) -> Result<f64> {
    check_dim(n)?;
    let k = (n - 1) as i32;
    Ok(integrate(|t| t.sin().powi(k), 0.0, std::f64::consts::PI, QUAD_ABS_TOL, QUAD_REL_TOL)?.value)
}

/// `a_n = ω_n (1 + ω_n)^{1-n}`.
pub fn a_n(n: usize) -> Result<f64> {
    let w = omega(n)?;
    Ok(w * (1.0 + w).powi(1 - n as i32))
}

/// Details of the root solve behind [`c_lambda_root`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRoot {
    pub n: usize,
    pub lambda: f64,
    pub root: f64,
    pub omega: f64,
    /// `F(root) - ω_n`.
    pub residual: f64,
}

impl LambdaRoot {
    pub fn product(&self) -> f64 {
        self.lambda * self.root
    }
}

fn root_function(n: usize, lambda: f64, x: f64) -> Result<(f64, f64)> {
    let k = (n - 1) as i32;
    let base = |t: f64| t.cosh() + x * t.sinh();
    let i0 = integrate(|t| base(t).powi(k), 0.0, lambda, 0.0, QUAD_REL_TOL)?.value;
    let i1 = if n >= 2 {
        integrate(|t| base(t).powi(k - 1) * t.sinh(), 0.0, lambda, 0.0, QUAD_REL_TOL)?.value
    } else {
        0.0
    };
    Ok((x * i0, i0 + x * (n - 1) as f64 * i1))
}

/// Solves `x ∫₀^Λ (cosh t + x sinh t)^{n-1} dt = ω_n` for its unique
/// positive root and reports the residual.
pub fn c_lambda_root_detailed(n: usize, lambda: f64) -> Result<LambdaRoot> {
    check_dim(n)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Degenerate(format!(
            "Λ must be positive and finite (got {lambda}); the integral vanishes"
        )));
    }
    let w = omega(n)?;
    let k = (n - 1) as i32;
    let cosh_int = integrate(|t| t.cosh().powi(k), 0.0, lambda, 0.0, QUAD_REL_TOL)?.value;
    let mut hi = w / cosh_int;
    // F(hi) >= ω analytically; widen if rounding says otherwise.
    for _ in 0..60 {
        if root_function(n, lambda, hi)?.0 >= w {
            break;
        }
        hi *= 2.0;
    }
    let g = |x: f64| root_function(n, lambda, x).map(|(v, d)| (v - w, d));
    let root = increasing_root(g, 0.0, hi, 1e-13 * w)?;
    Ok(LambdaRoot { n, lambda, root: root.x, omega: w, residual: root.residual })
}

/// `C(Λ)`: the unique positive root above.
pub fn c_lambda_root(n: usize, lambda: f64) -> Result<f64> {
    Ok(c_lambda_root_detailed(n, lambda)?.root)
}

/// Limit of `Λ C(Λ)` as `Λ → 0⁺`: `(1 + n ω_n)^{1/n} - 1`.
///
/// For small Λ the root grows like `1/Λ`, so `x sinh t` stays of order one
/// on `[0, Λ]` and the equation reduces to `((1 + y)^n - 1)/n = ω_n` in `y = ΛC`.
pub fn lambda_c_small_limit(n: usize) -> Result<f64> {
    let w = omega(n)?;
    Ok((1.0 + n as f64 * w).powf(1.0 / n as f64) - 1.0)
}

/// `Λ C(Λ)` including `Λ = 0`, where the limit value is returned.
pub fn lambda_c_product(n: usize, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        lambda_c_small_limit(n)
    } else {
        Ok(c_lambda_root_detailed(n, lambda)?.product())
    }
}

/// `R(Λ) = D / (Λ C(Λ))`.
pub fn r_lambda(diameter: f64, n: usize, lambda: f64) -> Result<f64> {
    if !(diameter > 0.0) {
        return Err(domain(format!("diameter must be positive, got {diameter}")));
    }
    Ok(diameter / c_lambda_root_detailed(n, lambda)?.product())
}

/// Poincaré–Sobolev constant
/// `S_{p,q} = (Vol/Vol(Sⁿ))^{1/p-1/q} R(Λ) Σ(n,p,q)` with `p` taken from the
/// budget and `Σ(n,p,q)` supplied by the caller. `κ = 0` uses the `Λ → 0⁺`
/// limit of `R(Λ)`.
pub fn sobolev_s_pq(budget: &GeometryBudget, vol_ratio: f64, sigma_npq: f64, q: f64) -> Result<f64> {
    budget.validate()?;
    let n = budget.dim;
    check_dim(n)?;
    let p = budget.p_exponent;
    if !(q >= 1.0) || !q.is_finite() {
        return Err(domain(format!("need 1 <= q < ∞, got q = {q}")));
    }
    let nf = n as f64;
    if q < nf && p > nf * q / (nf - q) {
        return Err(domain(format!("need p <= nq/(n-q) = {}, got p = {p}", nf * q / (nf - q))));
    }
    if !(vol_ratio > 0.0) || !(sigma_npq > 0.0) {
        return Err(domain("volume ratio and Σ(n,p,q) must be positive"));
    }
    let r = budget.diameter / lambda_c_product(n, budget.lambda_scale())?;
    Ok(vol_ratio.powf(1.0 / p - 1.0 / q) * r * sigma_npq)
}

/// `C_s = C(n) D e^{(m-1)√(κD²)}` with `m = budget.dim`.
pub fn sobolev_cs(budget: &GeometryBudget, consts: &AbstractConstants) -> Result<f64> {
    budget.validate()?;
    consts.validate()?;
    if budget.dim <= 2 {
        return Err(domain(format!(
            "Sobolev exponent 2m/(m-2) needs m >= 3, got m = {}",
            budget.dim
        )));
    }
    let m = budget.dim as f64;
    Ok(consts.c_n * budget.diameter * ((m - 1.0) * budget.lambda_scale()).exp())
}

/// `exp{C(n) √c C_s} ‖u‖₂`, the sup bound for subsolutions `u Δu ≤ c u²`.
pub fn moser_sup_bound(c: f64, cs: f64, l2_norm: f64, consts: &AbstractConstants) -> Result<f64> {
    if !(c >= 0.0) || !(cs >= 0.0) || !(l2_norm >= 0.0) {
        return Err(domain("c, C_s and the L² norm must be nonnegative"));
    }
    Ok((consts.c_n * c.sqrt() * cs).exp() * l2_norm)
}

/// `exp{C(n) √λ C_s} ‖θ‖₂` for an eigenform `∇*∇θ = λθ`.
pub fn eigenform_sup_bound(lambda: f64, cs: f64, l2_norm: f64, consts: &AbstractConstants) -> Result<f64> {
    moser_sup_bound(lambda, cs, l2_norm, consts)
}

/// Fills [`MoserParameters`] with `n = budget.dim`.
pub fn moser_parameters(budget: &GeometryBudget, lambda: f64, cs: f64) -> Result<MoserParameters> {
    budget.validate()?;
    if !(lambda > 0.0) {
        return Err(domain(format!("eigenvalue must be positive, got {lambda}")));
    }
    if !(cs >= 0.0) {
        return Err(domain("C_s must be nonnegative"));
    }
    let n = budget.dim as f64;
    let p = budget.p_exponent;
    if budget.dim <= 2 {
        return Err(domain(format!("need n > 2, got {}", budget.dim)));
    }
    if !(2.0 * p > n) {
        return Err(domain(format!("need 2p > n, got p = {p}, n = {n}")));
    }
    let d2 = budget.diameter * budget.diameter;
    let b = lambda + budget.ric_minus_p + budget.riem_2p;
    Ok(MoserParameters {
        b_value: b,
        t_value: 4.0 * cs * b.sqrt() * (1.0 + b * d2).sqrt(),
        alpha: 2.0 * p * n / (2.0 * p - n),
        beta: 2.0 * p * n / (2.0 * p - n + p * n),
        gamma: n * (p - 1.0) / (p * (n - 2.0)),
        gamma0: 2.0 * n * p / (2.0 * p - n),
        sobolev_cs: cs,
    })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(domain(format!("γ must exceed 1 for the product to converge, got {gamma}")));
    }
    Ok(())
}

/// `exp{2√γ/(γ-1)} (1+√t)^{2/(γ-1)}`, the closed-form bound on
/// `∏_{i≥0} (1 + tγ^{i+1})^{1/γ^{i+1}}`.
pub fn moser_product_bound(t: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(t >= 0.0) {
        return Err(domain(format!("t must be nonnegative, got {t}")));
    }
    Ok((2.0 * gamma.sqrt() / (gamma - 1.0)).exp() * (1.0 + t.sqrt()).powf(2.0 / (gamma - 1.0)))
}

/// Partial product `∏_{i<N} (1 + tγ^{i+1})^{1/γ^{i+1}}`, accumulated in logs.
pub fn moser_product_partial(t: f64, gamma: f64, n_terms: usize) -> Result<f64> {
    check_gamma(gamma)?;
    if n_terms == 0 {
        return Err(domain("need at least one factor"));
    }
    if !(t >= 0.0) {
        return Err(domain(format!("t must be nonnegative, got {t}")));
    }
    let mut log_sum = 0.0;
    for i in 0..n_terms {
        let g = gamma.powi(i as i32 + 1);
        log_sum += (t * g).ln_1p() / g;
    }
    Ok(log_sum.exp())
}

/// Upper bound on the log-tail `Σ_{k>N} ln(1 + tγ^k)/γ^k` using
/// `ln(1 + tγ^k) <= ln(1 + t) + k ln γ`.
pub fn moser_log_tail_bound(t: f64, gamma: f64, n_terms: usize) -> Result<f64> {
    check_gamma(gamma)?;
    let r = 1.0 / gamma;
    let k0 = (n_terms + 1) as f64;
    let geom = r.powf(k0) / (1.0 - r);
    let weighted = r.powf(k0) * (k0 * (1.0 - r) + r) / ((1.0 - r) * (1.0 - r));
    Ok(t.ln_1p() * geom + gamma.ln() * weighted)
}

/// Converged product: terms are added until the rigorous log-tail bound is
/// below `tail_tol`. Returns `(product, n_terms, tail_bound)`.
pub fn moser_product_converged(t: f64, gamma: f64, tail_tol: f64) -> Result<(f64, usize, f64)> {
    check_gamma(gamma)?;
    let mut n = 1;
    while moser_log_tail_bound(t, gamma, n)? >= tail_tol {
        n += 1;
        if n > 100_000 {
            return Err(domain("product tail does not fall below the tolerance"));
        }
    }
    Ok((moser_product_partial(t, gamma, n)?, n, moser_log_tail_bound(t, gamma, n)?))
}

/// The two entries of the gradient bound for `D‖∇θ‖_∞`, before the minimum.
fn gradient_branches(params: &MoserParameters, lambda: f64, diameter: f64, consts: &AbstractConstants) -> (f64, f64) {
    let s = (lambda * diameter * diameter).sqrt();
    let one_t = 1.0 + params.t_value.sqrt();
    let first = consts.c_np * one_t.powf(params.alpha) * s;
    let second = consts.c_np
        * one_t.powf(params.beta)
        * s.powf(params.beta / params.alpha)
        * (consts.c_np * lambda.sqrt() * params.sobolev_cs).exp();
    (first, second)
}

/// Sup bound on `‖∇θ‖_∞` for an eigenform with `‖θ‖₂ = l2_norm`: the
/// two-branch minimum divided by `D`.
pub fn gradient_sup_bound(
    params: &MoserParameters,
    lambda: f64,
    diameter: f64,
    l2_norm: f64,
    consts: &AbstractConstants,
) -> Result<f64> {
    consts.validate()?;
    if !(lambda > 0.0) {
        return Err(domain(format!("eigenvalue must be positive, got {lambda}")));
    }
    if !(diameter > 0.0) || !(l2_norm >= 0.0) {
        return Err(domain("diameter must be positive and the L² norm nonnegative"));
    }
    let (a, b) = gradient_branches(params, lambda, diameter, consts);
    Ok(a.min(b) * l2_norm / diameter)
}

/// Both entries of `ε` (dimensionless), in order `(polynomial, exponential)`.
pub fn epsilon_branches(
    budget: &GeometryBudget,
    lambda: f64,
    cs: f64,
    consts: &AbstractConstants,
) -> Result<(f64, f64)> {
    consts.validate()?;
    let params = moser_parameters(budget, lambda, cs)?;
    Ok(gradient_branches(&params, lambda, budget.diameter, consts))
}

/// `ε`, the pinching threshold: eigenforms satisfy
/// `inf|θ|²/sup|θ|² ≥ 1 - 2ε`.
pub fn epsilon_threshold(budget: &GeometryBudget, lambda: f64, cs: f64, consts: &AbstractConstants) -> Result<f64> {
    let (a, b) = epsilon_branches(budget, lambda, cs, consts)?;
    Ok(a.min(b))
}

/// `C̃(n,p) = (4C(n,p))^{-1/δ} C₀(n,p)^{-1} e^{-C(n)/δ}` for half-dimension `n`.
pub fn tilde_c(n: usize, p: f64, branch: DeltaBranch, consts: &AbstractConstants) -> Result<f64> {
    consts.validate()?;
    if n == 0 {
        return Err(domain("half-dimension must be positive"));
    }
    let nf = n as f64;
    if !(p > nf) || !p.is_finite() {
        return Err(domain(format!("need p > n = {n}, got p = {p}")));
    }
    let delta = branch.delta(nf, p);
    Ok((4.0 * consts.c_np).powf(-1.0 / delta) / consts.c0_np * (-consts.c_n / delta).exp())
}

/// Lower bound for `√λ₁ D` on a closed `2n`-manifold with `χ ≠ 0`, with the
/// branch structure exposed.
pub fn theorem_t3_bound(
    budget: &GeometryBudget,
    consts: &AbstractConstants,
    options: BoundOptions,
) -> Result<EigenvalueBound> {
    let n = budget.half_dim()?;
    let nf = n as f64;
    let p = budget.p_exponent;
    let tc = tilde_c(n, p, options.delta_branch, consts)?;
    let decay = (-(2.0 * nf - 1.0) * budget.lambda_scale()).exp();
    let exponent = 2.0 * p * nf / (p - nf);
    let riem = (budget.riem_2p * budget.diameter * budget.diameter).sqrt();
    let curvature_branch = (tc / (1.0 + riem) * decay).powf(exponent);
    let exponential_branch = match options.second_branch {
        SecondBranch::Theorem => decay,
        SecondBranch::Corollary => tc * decay,
    };
    let (value, active) = if curvature_branch <= exponential_branch {
        (curvature_branch, ActiveBranch::Curvature)
    } else {
        (exponential_branch, ActiveBranch::Exponential)
    };
    Ok(EigenvalueBound { value, curvature_branch, exponential_branch, active, tilde_c: tc, exponent })
}

/// `min{(C̃/(1+√(‖Riem‖_{2p}D²)) e^{-(2n-1)√(κD²)})^{2pn/(p-n)}, e^{-(2n-1)√(κD²)}}`.
pub fn theorem_t3_rhs(budget: &GeometryBudget, consts: &AbstractConstants) -> Result<f64> {
    Ok(theorem_t3_bound(budget, consts, BoundOptions::default())?.value)
}

/// Li–Yau function bound `c⁻¹ exp{-[1 + (1 + 2c²Λ²)^{1/2}]}` with `Λ² = κD²`.
pub fn li_yau_rhs_functions(n: usize, kappa: f64, diameter: f64, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("dimension must be positive"));
    }
    if !(c > 0.0) || !(kappa >= 0.0) || !(diameter > 0.0) {
        return Err(domain("need c > 0, κ >= 0, D > 0"));
    }
    let l2 = kappa * diameter * diameter;
    Ok((-(1.0 + (1.0 + 2.0 * c * c * l2).sqrt())).exp() / c)
}

/// Whether `λ₁D² ≥ c e^{-c√(κD²)}` (boundary equality counts).
pub fn li_yau_predicate(lambda1: f64, diameter: f64, kappa: f64, c: f64) -> bool {
    let lhs = lambda1 * diameter * diameter;
    let rhs = c * (-c * (kappa * diameter * diameter).sqrt()).exp();
    lhs >= rhs
}
