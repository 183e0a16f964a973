//! Three operations for the demo page. Each returns a flat `Float64Array`;
//! the plain functions below the bindings do the work and are usable (and
//! tested) off the web.

use qmark_core::measures::{mu_eval, QSequence};
use qmark_core::period::{g_series, DomainD};
use qmark_core::sporadic::{catalog, in_domain, run_pipeline};
use qmark_core::Complex64;
use wasm_bindgen::prelude::*;

const MAX_UNFOLD: usize = 4000;
const MAX_GRID: usize = 1 << 16;

/// `[x, re μ, im μ, error bound]` for each of `grid + 1` points of `[0, 1]`.
pub fn curve(spec: &str, grid: usize) -> Result<Vec<f64>, String> {
    if grid == 0 || grid > MAX_GRID {
        return Err(format!("grid must lie in 1..={MAX_GRID}"));
    }
    let q: QSequence = spec.parse().map_err(|e: qmark_core::QmarkError| e.to_string())?;
    let depth = q.depth_for(1e-12).min(MAX_UNFOLD);
    let mut out = Vec::with_capacity(4 * (grid + 1));
    for i in 0..=grid {
        let x = i as f64 / grid as f64;
        let e = mu_eval(&q, x, depth).map_err(|e| e.to_string())?;
        out.extend([x, e.value.re, e.value.im, e.error_bound]);
    }
    Ok(out)
}

/// `[re G, im G, residual estimate]` from the tree series.
pub fn period(kappa: Complex64, z: Complex64, depth: u32) -> Result<Vec<f64>, String> {
    if depth > 22 {
        return Err("depth above 22 is too slow for the page".into());
    }
    let d = if kappa == Complex64::new(1.0, 0.0) {
        DomainD::limit_one()
    } else {
        DomainD::new(kappa).map_err(|e| e.to_string())?
    };
    let g = g_series(&d, z, depth).map_err(|e| e.to_string())?;
    Ok(vec![g.value.re, g.value.im, g.residual_estimate])
}

/// `[re, im, multiplicity, in 𝒟 (0 or 1), residual]` for each root of the
/// determinant polynomial of a catalog basis. The residual of the three-term
/// equation is only computed inside the domain; elsewhere it is `-1`.
pub fn roots(name: &str) -> Result<Vec<f64>, String> {
    let basis = catalog(name).map_err(|e| e.to_string())?;
    let report = run_pipeline(&basis.functions(), 0).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for r in &report.roots {
        let inside = in_domain(r.value);
        let residual = report
            .lyg_residuals
            .iter()
            .find(|(k, _)| (k - r.value).norm() < 1e-9)
            .map_or(-1.0, |&(_, res)| res);
        out.extend([r.value.re, r.value.im, r.multiplicity as f64, if inside { 1.0 } else { 0.0 }, residual]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn mu_curve(spec: &str, grid: usize) -> Result<Vec<f64>, JsError> {
    curve(spec, grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn g_value(kappa_re: f64, kappa_im: f64, z_re: f64, z_im: f64, depth: u32) -> Result<Vec<f64>, JsError> {
    period(Complex64::new(kappa_re, kappa_im), Complex64::new(z_re, z_im), depth).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sporadic_roots(name: &str) -> Result<Vec<f64>, JsError> {
    roots(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn catalog_names() -> Vec<String> {
    qmark_core::sporadic::CATALOG.iter().map(|s| s.to_string()).collect()
}
