use std::fmt::Write;
use std::sync::Arc;

use qmark_core::complex_parse::parse_complex;
use qmark_core::mmf::{extract_coordinates, g_function, residual_lyg, ArcSpec, KappaFunction, SlashContext};
use qmark_core::modular::{eisenstein_e4, eisenstein_e6, parse_theta_char, theta, theta_prime, TruncationSpec, UpperHalfPoint};
use qmark_core::period::{g_series, g_stieltjes, DomainD, GEvaluation, GMethod};
use qmark_core::quadrature::QuadratureSpec;
use qmark_core::Complex64;
use serde::Serialize;

use crate::config::{CliError, Format, RunConfig};
use crate::json::{render, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Series,
    Stieltjes,
    Both,
}

#[derive(Debug, Clone, Serialize)]
pub struct GValue {
    pub method: String,
    pub value: C,
    pub residual_estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GReport {
    pub kappa: C,
    pub z: C,
    pub values: Vec<GValue>,
    /// Present for `both`: whether the two values differ by at most the sum
    /// of their estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
}

/// Unfolding depth for the measure behind Riemann–Stieltjes sums.
const QUAD_UNFOLD: usize = 80;

fn domain(kappa: Complex64) -> Result<DomainD, CliError> {
    if kappa == Complex64::new(1.0, 0.0) {
        Ok(DomainD::limit_one())
    } else {
        Ok(DomainD::new(kappa)?)
    }
}

fn method_name(m: GMethod) -> String {
    match m {
        GMethod::Series { depth } => format!("series(depth={depth})"),
        GMethod::Stieltjes { cells } => format!("stieltjes(cells={cells})"),
        GMethod::ClosedForm => "closed-form".into(),
    }
}

pub fn geval(kappa: &str, z: &str, method: Method, cfg: &RunConfig) -> Result<GReport, CliError> {
    let d = domain(parse_complex(kappa)?)?;
    let z = parse_complex(z)?;
    let mut evals: Vec<GEvaluation> = Vec::new();
    if method != Method::Stieltjes {
        evals.push(g_series(&d, z, cfg.depth)?);
    }
    if method != Method::Series {
        evals.push(g_stieltjes(&d, z, &QuadratureSpec::new(cfg.quad_cells, QUAD_UNFOLD)?)?);
    }
    let agree = (method == Method::Both)
        .then(|| (evals[0].value - evals[1].value).norm() <= evals[0].residual_estimate + evals[1].residual_estimate);
    Ok(GReport {
        kappa: d.kappa().into(),
        z: z.into(),
        values: evals
            .iter()
            .map(|e| GValue {
                method: method_name(e.method),
                value: e.value.into(),
                residual_estimate: e.residual_estimate,
            })
            .collect(),
        agree,
    })
}

pub fn render_geval(report: &GReport, format: Format) -> String {
    match format {
        Format::Json => render(report),
        Format::Csv => {
            let mut out = String::from("method,re,im,residual_estimate\n");
            for v in &report.values {
                writeln!(out, "{},{:.16e},{:.16e},{:.16e}", v.method, v.value.re, v.value.im, v.residual_estimate).unwrap();
            }
            out
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaReport {
    pub a: String,
    pub b: String,
    pub level: u32,
    pub z: C,
    pub theta: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_prime: Option<C>,
}

pub fn theta_value(ch: &str, z: &str, derivative: bool, cfg: &RunConfig) -> Result<ThetaReport, CliError> {
    let c = parse_theta_char(ch)?;
    let w = UpperHalfPoint::new(parse_complex(z)?)?;
    let trunc = TruncationSpec::new(cfg.tolerance, 100_000)?;
    Ok(ThetaReport {
        a: c.a.to_string(),
        b: c.b.to_string(),
        level: c.k,
        z: w.z().into(),
        theta: theta(&c, w, &trunc)?.into(),
        theta_prime: if derivative { Some(theta_prime(&c, w, &trunc)?.into()) } else { None },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Form {
    /// The period-function form `g(κ, z)`.
    G,
    /// `E₄³ + κE₆²`, weight 12 and height 1.
    E4e6,
}

fn form(which: Form, cfg: &RunConfig) -> (KappaFunction, u32) {
    match which {
        Form::G => (g_function(cfg.depth), 2),
        Form::E4e6 => {
            let trunc = TruncationSpec::default();
            let a0 = move |w: Complex64| Ok(eisenstein_e4(UpperHalfPoint::new(w)?, &trunc)?.powu(3));
            let a1 = move |w: Complex64| Ok(eisenstein_e6(UpperHalfPoint::new(w)?, &trunc)?.powu(2));
            (KappaFunction::polynomial(vec![Arc::new(a0), Arc::new(a1)]), 12)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoordReport {
    pub z: C,
    pub coordinates: Vec<C>,
}

pub fn mmf_coords(which: Form, z: &str, upto: usize, cfg: &RunConfig) -> Result<CoordReport, CliError> {
    let w = UpperHalfPoint::new(parse_complex(z)?)?;
    let (f, _) = form(which, cfg);
    let coords = extract_coordinates(&f, upto, w, &ArcSpec::default())?;
    Ok(CoordReport {
        z: w.z().into(),
        coordinates: coords.into_iter().map(C::from).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LygReport {
    pub kappa: C,
    pub z: C,
    pub weight: u32,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Tolerance for the three-term equation of a form evaluated by series.
pub const LYG_TOL: f64 = 1e-5;

pub fn mmf_lyg(which: Form, kappa: &str, z: &str, cfg: &RunConfig) -> Result<LygReport, CliError> {
    let kappa = parse_complex(kappa)?;
    let w = UpperHalfPoint::new(parse_complex(z)?)?;
    let (f, k) = form(which, cfg);
    let residual = residual_lyg(&f, kappa, SlashContext::new(k)?, w)?;
    Ok(LygReport {
        kappa: kappa.into(),
        z: w.z().into(),
        weight: k,
        residual,
        tolerance: LYG_TOL,
        pass: residual < LYG_TOL,
    })
}
