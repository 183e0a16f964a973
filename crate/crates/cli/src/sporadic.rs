use qmark_core::complex_parse::parse_complex;
use qmark_core::modular::parse_theta_char;
use qmark_core::poly::Root;
use qmark_core::sporadic::{catalog, orbit_closure, run_pipeline, search_target, OrbitBasis, Recipe, SporadicReport, CATALOG};
use serde::Serialize;

use crate::config::{CliError, RunConfig};
use crate::json::C;

#[derive(Debug, Clone, Serialize)]
pub struct RootOut {
    pub value: C,
    pub multiplicity: usize,
}

impl From<&Root> for RootOut {
    fn from(r: &Root) -> Self {
        RootOut {
            value: r.value.into(),
            multiplicity: r.multiplicity,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LygOut {
    pub kappa: C,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineOut {
    pub orbit: String,
    pub members: Vec<String>,
    pub size: usize,
    pub weight: u32,
    pub dimension: usize,
    pub fit_residual: f64,
    pub refit_gap: f64,
    pub poly_noise: f64,
    /// Coefficients of `P(κ)`, constant term first.
    pub poly_coeffs: Vec<C>,
    pub roots: Vec<RootOut>,
    #[serde(rename = "roots_in_D")]
    pub roots_in_d: Vec<RootOut>,
    pub lyg_residuals: Vec<LygOut>,
}

pub fn pipeline_out(orbit: &OrbitBasis, r: &SporadicReport) -> PipelineOut {
    PipelineOut {
        orbit: r.label.clone(),
        members: orbit.members.iter().map(|c| format!("({}, {})", c.a, c.b)).collect(),
        size: r.size,
        weight: orbit.weight(),
        dimension: r.dimension,
        fit_residual: r.fit_residual,
        refit_gap: r.refit_gap,
        poly_noise: r.poly_noise,
        poly_coeffs: r.poly.coeffs().iter().map(|&c| c.into()).collect(),
        roots: r.roots.iter().map(RootOut::from).collect(),
        roots_in_d: r.roots_in_d.iter().map(RootOut::from).collect(),
        lyg_residuals: r
            .lyg_residuals
            .iter()
            .map(|&(k, res)| LygOut {
                kappa: k.into(),
                residual: res,
            })
            .collect(),
    }
}

/// A catalog name, or a seed characteristic `a,b` whose orbit is closed.
pub fn resolve_orbit(spec: &str, weight: Option<u32>, pairs: bool) -> Result<OrbitBasis, CliError> {
    let power = match weight {
        Some(k) if k == 0 || k % 2 == 1 => {
            return Err(CliError::Usage(format!("--weight {k} must be a positive even integer")))
        }
        Some(k) => 2 * k,
        None => 4,
    };
    let mut basis = if CATALOG.contains(&spec) {
        let mut b = catalog(spec)?;
        b.power = power;
        b
    } else if spec.contains(',') {
        orbit_closure(&parse_theta_char(spec)?, power)?
    } else {
        return Err(CliError::Usage(format!(
            "'{spec}' is neither a catalog entry ({}) nor a characteristic 'a,b'",
            CATALOG.join(", ")
        )));
    };
    if pairs {
        basis = basis.with_recipe(Recipe::PairProducts);
    }
    Ok(basis)
}

pub fn sporadic(spec: &str, weight: Option<u32>, pairs: bool, cfg: &RunConfig) -> Result<PipelineOut, CliError> {
    let basis = resolve_orbit(spec, weight, pairs)?;
    let report = run_pipeline(&basis.functions(), cfg.seed as usize)?;
    Ok(pipeline_out(&basis, &report))
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchRow {
    pub basis: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closest_root: Option<C>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_at_target: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOut {
    pub target: C,
    pub searched: usize,
    pub found_in: Vec<String>,
    pub entries: Vec<SearchRow>,
}

pub fn search(target: &str, cfg: &RunConfig) -> Result<SearchOut, CliError> {
    let t = parse_complex(target)?;
    let s = search_target(t, cfg.seed as usize)?;
    Ok(SearchOut {
        target: t.into(),
        searched: s.entries.len(),
        found_in: s.found_in,
        entries: s
            .entries
            .iter()
            .map(|e| SearchRow {
                basis: e.label.clone(),
                error: e.outcome.as_ref().err().cloned(),
                closest_root: e.closest.map(|c| c.0.into()),
                distance: e.closest.map(|c| c.1),
                residual_at_target: e.target_residual,
            })
            .collect(),
    })
}
