use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::checks::*;
use super::CheckOutcome;
use crate::constants::{AbstractConstants, BoundOptions, GeometryBudget};
use crate::eigen::SolverConfig;
use crate::error::{domain, Error, Result};
use crate::mesh::{curvature_lp_norm, graph_diameter, ModelManifold, TriangleMesh};

/// Either explicit values or `count` log-spaced points in `[start, end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    LogSpaced { start: f64, end: f64, count: usize },
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        match *self {
            Grid::Values(ref v) => Ok(v.clone()),
            Grid::LogSpaced { start, end, count } => {
                if !(start > 0.0 && end >= start) {
                    return Err(domain(format!("log-spaced grid needs 0 < start <= end, got [{start}, {end}]")));
                }
                if count < 2 {
                    return Ok(vec![start; count]);
                }
                let (a, b) = (start.ln(), end.ln());
                Ok((0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect())
            }
        }
    }
}

/// Values that replace the ones derived from the manifold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetOverrides {
    pub dim: Option<usize>,
    pub kappa: Option<f64>,
    pub diameter: Option<f64>,
    pub riem_2p: Option<f64>,
    pub ric_minus_p: Option<f64>,
    pub p_exponent: Option<f64>,
    /// `|Riem| = convention_scale · |K|` on surfaces; default 2.
    pub convention_scale: Option<f64>,
}

fn default_k() -> usize {
    6
}

fn default_epsilon_dim() -> usize {
    4
}

/// One entry of the `checks` list, selected by its `check` field. Checks
/// that need a geometry take an optional `manifold` overriding the spec's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckConfig {
    LemmaL2Grid {
        dims: Vec<usize>,
        lambdas: Grid,
    },
    LemmaL6Grid {
        t: Vec<f64>,
        gamma: Vec<f64>,
    },
    Weitzenboeck {
        #[serde(default)]
        manifold: Option<ModelManifold>,
        #[serde(default = "default_k")]
        k: usize,
    },
    PropP3 {
        #[serde(default)]
        manifold: Option<ModelManifold>,
    },
    PropP4 {
        #[serde(default)]
        manifold: Option<ModelManifold>,
    },
    Pinching {
        #[serde(default)]
        manifold: Option<ModelManifold>,
        /// Dimension at which the pinching threshold is evaluated; the
        /// Sobolev and Moser constants need at least 3.
        #[serde(default = "default_epsilon_dim")]
        epsilon_dim: usize,
    },
    TheoremT3 {
        #[serde(default)]
        manifold: Option<ModelManifold>,
        /// Use this eigenvalue instead of measuring one.
        #[serde(default)]
        lambda1: Option<f64>,
        #[serde(default)]
        options: BoundOptions,
    },
    Lipschitz {
        #[serde(default)]
        manifold: Option<ModelManifold>,
    },
    PropP5Implication {
        lambda1: f64,
        diameter: f64,
        kappa: f64,
        c: f64,
        dim: usize,
        has_nonparallel_harmonic: bool,
    },
}

impl CheckConfig {
    fn manifold_override(&self) -> Option<&ModelManifold> {
        match self {
            CheckConfig::Weitzenboeck { manifold, .. }
            | CheckConfig::PropP3 { manifold }
            | CheckConfig::PropP4 { manifold }
            | CheckConfig::Pinching { manifold, .. }
            | CheckConfig::TheoremT3 { manifold, .. }
            | CheckConfig::Lipschitz { manifold } => manifold.as_ref(),
            _ => None,
        }
    }

    pub(crate) fn run(&self, spec: &ExperimentSpec) -> Result<Vec<CheckOutcome>> {
        let manifold = self.manifold_override().unwrap_or(&spec.manifold);
        let solver = &spec.solver;
        let one = |o: CheckOutcome| Ok(vec![o]);
        match self {
            CheckConfig::LemmaL2Grid { dims, lambdas } => one(check_lemma_l2_grid(dims, &lambdas.points()?)?),
            CheckConfig::LemmaL6Grid { t, gamma } => one(check_lemma_l6_grid(t, gamma)?),
            CheckConfig::Weitzenboeck { k, .. } => one(check_weitzenboeck(manifold, *k, solver)?),
            CheckConfig::PropP3 { .. } => one(check_prop_p3(manifold, solver)?),
            CheckConfig::PropP4 { .. } => one(check_prop_p4(manifold, solver)?),
            CheckConfig::Pinching { epsilon_dim, .. } => {
                let (budget, _) = budget_for(manifold, &spec.budget)?;
                one(check_pinching(manifold, &budget, &spec.constants, *epsilon_dim, solver)?)
            }
            CheckConfig::TheoremT3 { lambda1, options, .. } => {
                let (budget, mesh) = budget_for(manifold, &spec.budget)?;
                let m = T3Measurement::obtain(manifold, mesh.as_ref(), *lambda1, solver)?;
                check_theorem_t3(&budget, &spec.constants, *options, &m)
            }
            CheckConfig::Lipschitz { .. } => one(check_lipschitz(manifold)?),
            &CheckConfig::PropP5Implication { lambda1, diameter, kappa, c, dim, has_nonparallel_harmonic } => {
                one(prop_p5_implication(lambda1, diameter, kappa, c, dim, has_nonparallel_harmonic)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    pub manifold: ModelManifold,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub budget: BudgetOverrides,
    #[serde(default)]
    pub constants: AbstractConstants,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
}

impl ExperimentSpec {
    /// Parses JSON; `origin` names the source in error locations.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("{origin}:{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        spec.validate().map_err(|e| Error::Parse { location: origin.to_string(), message: e.to_string() })?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.constants.validate()?;
        check_overrides(&self.manifold, &self.budget)?;
        for c in &self.checks {
            if let Some(m) = c.manifold_override() {
                check_overrides(m, &self.budget)?;
            }
        }
        Ok(())
    }
}

/// Rejects overrides that contradict the manifold's geometry.
fn check_overrides(manifold: &ModelManifold, o: &BudgetOverrides) -> Result<()> {
    manifold.validate()?;
    if let ModelManifold::FlatTorus { .. } = manifold {
        if o.kappa.is_some_and(|k| k != 0.0) || o.riem_2p.is_some_and(|r| r != 0.0) {
            return Err(domain("a flat torus has κ = 0 and zero curvature norms"));
        }
    }
    let expected = surface_count(manifold)? * 2;
    if let Some(d) = o.dim {
        if d != expected {
            return Err(domain(format!("dimension override {d} does not match the manifold's dimension {expected}")));
        }
    }
    Ok(())
}

fn surface_count(m: &ModelManifold) -> Result<usize> {
    match m {
        ModelManifold::Product { factors } => factors.iter().map(|f| match f {
            ModelManifold::Product { .. } => Err(domain("nested products are not supported")),
            _ => Ok(1),
        })
        .sum(),
        _ => Ok(1),
    }
}

/// Intrinsic diameter of a smooth factor.
pub(crate) fn analytic_diameter(m: &ModelManifold) -> f64 {
    match *m {
        ModelManifold::FlatTorus { lx, ly, .. } => 0.5 * lx.hypot(ly),
        ModelManifold::IcoSphere { radius, .. } => PI * radius,
        ModelManifold::Product { ref factors } => factors.iter().map(analytic_diameter).map(|d| d * d).sum::<f64>().sqrt(),
    }
}

/// Budget for a manifold: measured on the mesh for surfaces, analytic for
/// products (which have no mesh). Both model families have `Ric ≥ 0`, so
/// `κ = 0` and `‖Ric⁻‖_p = 0` unless overridden.
pub fn budget_for(manifold: &ModelManifold, o: &BudgetOverrides) -> Result<(GeometryBudget, Option<TriangleMesh>)> {
    check_overrides(manifold, o)?;
    let p = o.p_exponent.unwrap_or(4.0);
    let scale = o.convention_scale.unwrap_or(2.0);
    let (dim, diameter, riem, mesh) = match manifold {
        ModelManifold::Product { factors } => {
            let k2: f64 = factors.iter().map(|f| f.gaussian_curvature().unwrap_or(0.0).powi(2)).sum();
            (2 * factors.len(), analytic_diameter(manifold), scale * k2.sqrt(), None)
        }
        _ => {
            let mesh = manifold.build_mesh()?;
            let d = match o.diameter {
                Some(d) => d,
                None => graph_diameter(&mesh)?.value,
            };
            let riem = match o.riem_2p {
                Some(r) => r,
                None => curvature_lp_norm(&mesh, 2.0 * p, scale)?,
            };
            (2, d, riem, Some(mesh))
        }
    };
    let budget = GeometryBudget {
        dim: o.dim.unwrap_or(dim),
        kappa: o.kappa.unwrap_or(0.0),
        diameter: o.diameter.unwrap_or(diameter),
        riem_2p: o.riem_2p.unwrap_or(riem),
        ric_minus_p: o.ric_minus_p.unwrap_or(0.0),
        p_exponent: p,
    };
    budget.validate()?;
    Ok((budget, mesh))
}
