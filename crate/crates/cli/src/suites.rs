//! Verification suites. Each suite evaluates residuals of identities that must
//! hold, plus negative controls that must fail by a margin, against
//! tolerances pinned here.

use std::f64::consts::PI;
use std::sync::Arc;

use qmark_core::cfcodec::to_semiregular_cf;
use qmark_core::measures::{mu_eval, mu_kappa_closed_form, question_mark, question_mark_rational, QSequence};
use qmark_core::mmf::{
    extract_coordinates, extract_coordinate, g_function, residual_ide, residual_lyg, residual_perein, residual_prop4,
    ArcSpec, KappaFunction, SlashContext,
};
use qmark_core::modular::{
    eisenstein_e4, eisenstein_e6, eisenstein_g2, is_odd_characteristic, residual_jacobi, residual_prop5,
    residual_quasimodular, theta, Prop5Rule, ThetaChar, TruncationSpec, UpperHalfPoint,
};
use qmark_core::period::{centr_defect, g_series, g_stieltjes, residual_centr, residual_dyadic, DomainD};
use qmark_core::poly::CPoly;
use qmark_core::quadrature::QuadratureSpec;
use qmark_core::sporadic::{catalog, in_domain, run_pipeline, OrbitBasis, Recipe};
use qmark_core::{par_map, Complex64, Rational64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{CliError, RunConfig};

pub const SUITES: [&str; 13] = [
    "qmark-fe",
    "selfsim",
    "closed-form",
    "g-methods",
    "centr",
    "dyadic",
    "quasimodular",
    "lyg",
    "extract",
    "perein",
    "prop4",
    "prop5",
    "sporadic",
];

pub const QMARK_FE_TOL: f64 = 1e-12;
pub const QMARK_SPOT_TOL: f64 = 1e-14;
pub const CENTR_TOL: f64 = 1e-5;
pub const DYADIC_TOL: f64 = 1e-5;
pub const QUASIMODULAR_TOL: f64 = 1e-9;
pub const G2_CENTR_TOL: f64 = 1e-8;
pub const LYG_TOL: f64 = 1e-5;
pub const EXTRACT_TOL: f64 = 1e-8;
pub const PEREIN_TOL: f64 = 1e-7;
pub const PROP4_TOL: f64 = 1e-8;
pub const PROP5_TOL: f64 = 1e-8;
pub const JACOBI_TOL: f64 = 1e-10;
pub const ODD_THETA_TOL: f64 = 1e-12;
pub const POLY_TOL: f64 = 1e-7;
pub const KERNEL_LYG_TOL: f64 = 1e-6;
/// Negative controls must exceed this.
pub const CONTROL_MARGIN: f64 = 1e-2;

/// One residual and the limit it is held to. A control passes when its
/// residual is at least the limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub residual: f64,
    pub limit: f64,
    pub control: bool,
}

impl Check {
    fn new(label: impl Into<String>, residual: f64, limit: f64) -> Self {
        Check {
            label: label.into(),
            residual,
            limit,
            control: false,
        }
    }

    fn control(label: impl Into<String>, residual: f64) -> Self {
        Check {
            label: label.into(),
            residual,
            limit: CONTROL_MARGIN,
            control: true,
        }
    }

    pub fn passes(&self) -> bool {
        if self.control {
            self.residual >= self.limit
        } else {
            self.residual <= self.limit
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub n_checks: usize,
    /// Largest residual over the ordinary (non-control) checks.
    pub max_residual: f64,
    /// Largest residual / limit over the ordinary checks.
    pub worst_ratio: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn from_checks(suite: &str, checks: Vec<Check>, notes: Vec<String>) -> Self {
        let ordinary = checks.iter().filter(|c| !c.control);
        let max_residual = ordinary.clone().map(|c| c.residual).fold(0.0, f64::max);
        let worst_ratio = ordinary.map(|c| c.residual / c.limit).fold(0.0, f64::max);
        let failures: Vec<Check> = checks.iter().filter(|c| !c.passes()).cloned().collect();
        SuiteReport {
            suite: suite.to_string(),
            n_checks: checks.len(),
            max_residual,
            worst_ratio,
            pass: failures.is_empty(),
            controls: checks.iter().filter(|c| c.control).cloned().collect(),
            failures,
            notes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllReport {
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
}

pub fn run_suite(name: &str, cfg: &RunConfig) -> std::result::Result<SuiteReport, CliError> {
    let mut notes = Vec::new();
    let checks = match name {
        "qmark-fe" => qmark_fe(),
        "selfsim" => selfsim(),
        "closed-form" => closed_form(cfg),
        "g-methods" => g_methods(cfg),
        "centr" => centr(cfg),
        "dyadic" => dyadic(cfg),
        "quasimodular" => quasimodular(cfg),
        "lyg" => lyg(cfg),
        "extract" => extract(),
        "perein" => perein(),
        "prop4" => prop4(),
        "prop5" => prop5(cfg),
        "sporadic" => sporadic(cfg, &mut notes),
        _ => {
            return Err(CliError::Usage(format!("unknown suite '{name}'; known: {}", SUITES.join(", "))));
        }
    };
    // a residual that cannot be computed at all is a failure of the suite
    let checks = checks.map_err(|e| CliError::Residual(format!("suite {name}: {e}")))?;
    Ok(SuiteReport::from_checks(name, checks, notes))
}

pub fn run_all(cfg: &RunConfig) -> AllReport {
    let suites: Vec<SuiteReport> = SUITES
        .iter()
        .map(|s| {
            run_suite(s, cfg).unwrap_or_else(|e| SuiteReport {
                suite: s.to_string(),
                n_checks: 0,
                max_residual: f64::INFINITY,
                worst_ratio: f64::INFINITY,
                pass: false,
                controls: Vec::new(),
                failures: Vec::new(),
                notes: vec![e.to_string()],
            })
        })
        .collect();
    let pass = suites.iter().all(|s| s.pass);
    AllReport { suites, pass }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn h(re: f64, im: f64) -> UpperHalfPoint {
    UpperHalfPoint::new(c(re, im)).expect("point in the upper half plane")
}

fn rng(cfg: &RunConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

fn random_point(r: &mut ChaCha8Rng) -> UpperHalfPoint {
    h(r.random_range(-1.0..1.0), r.random_range(0.5..2.0))
}

const SPEC_KAPPAS: [(f64, f64); 3] = [(0.3, 0.0), (0.5, 0.0), (0.5, 0.4)];

// ---------------------------------------------------------------------------
// measures

fn qmark_fe() -> Result<Vec<Check>> {
    let one = Rational64::from_integer(1);
    let mut out = Vec::new();
    for i in 0..1000 {
        let x = Rational64::new(2 * i + 1, 2000);
        let qx = question_mark_rational(x)?;
        let reflected = question_mark_rational(one - x)?;
        let halved = question_mark_rational(x / (x + one))?;
        out.push(Check::new(format!("reflection at {x}"), (qx - 1.0 + reflected).abs(), QMARK_FE_TOL));
        out.push(Check::new(format!("halving at {x}"), (halved - qx / 2.0).abs(), QMARK_FE_TOL));
        let float = question_mark(*x.numer() as f64 / *x.denom() as f64, 1e-17)?;
        out.push(Check::new(format!("float vs exact at {x}"), (float - qx).abs(), QMARK_FE_TOL));
    }
    for (x, v) in [(1.0 / 3.0, 0.25), (0.4, 0.375)] {
        out.push(Check::new(format!("?({x})"), (question_mark(x, 1e-17)? - v).abs(), QMARK_SPOT_TOL));
    }
    Ok(out)
}

fn sequences() -> Result<Vec<QSequence>> {
    Ok(vec![
        QSequence::finite_real(&[2.0 / 3.0, 1.0 / 3.0])?,
        QSequence::finite_real(&[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0])?,
        QSequence::finite_real(&[-1.0 / 7.0, 4.0 / 7.0, 4.0 / 7.0])?,
        QSequence::geometric(c(0.5, 0.0))?,
        QSequence::geometric(c(0.3, 0.0))?,
        QSequence::geometric(c(0.6, 0.3))?,
    ])
}

const SELFSIM_DEPTH: usize = 60;

fn selfsim() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for q in sequences()? {
        let bound = 2.0 * q.contraction_constant() * q.delta().powi(SELFSIM_DEPTH as i32);
        for l in 2..=6i64 {
            for i in 0..100 {
                let x = (i as f64 + 0.5) / 100.0;
                let lhs = mu_eval(&q, 1.0 / (l as f64 - x), SELFSIM_DEPTH)?;
                let inner = mu_eval(&q, x, SELFSIM_DEPTH)?;
                let residual = (lhs.value - q.q(l) * inner.value - q.tail(l)).norm();
                out.push(Check::new(format!("{q:?} l={l} x={x}"), residual, bound + 1e-14));
            }
        }
    }
    let half = QSequence::minkowski();
    for i in 0..=200 {
        let x = i as f64 / 200.0;
        let mu = mu_eval(&half, x, SELFSIM_DEPTH)?;
        let residual = (mu.value - question_mark(x, 1e-17)?).norm();
        out.push(Check::new(format!("kappa=1/2 vs ? at {x}"), residual, mu.error_bound + 1e-14));
    }
    Ok(out)
}

fn random_kappa(r: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let k = c(r.random_range(0.05..0.95), r.random_range(-0.45..0.45));
        if k.norm() < 0.98 && (1.0 - k).norm() < 0.98 {
            return k;
        }
    }
}

fn closed_form(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut r = rng(cfg, 3);
    let mut out = Vec::new();
    for _ in 0..50 {
        let kappa = random_kappa(&mut r);
        let p: i64 = r.random_range(1..500);
        let extra: i64 = r.random_range(1..500);
        let x = Rational64::new(p, p + extra);
        let closed = mu_kappa_closed_form(kappa, &to_semiregular_cf(x, 4096)?)?;
        let mu = mu_eval(&QSequence::geometric(kappa)?, p as f64 / (p + extra) as f64, 200)?;
        out.push(Check::new(format!("kappa={kappa} x={x}"), (closed - mu.value).norm(), mu.error_bound + 1e-12));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// period function

fn g_methods(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut r = rng(cfg, 4);
    let mut samples = Vec::new();
    while samples.len() < 20 {
        let k = random_kappa(&mut r);
        if (1.0 - k).norm() >= 0.9 {
            continue;
        }
        let mut z = c(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        if z.re >= 1.0 && z.im.abs() < 0.2 {
            z.im = 0.5;
        }
        samples.push((k, z));
    }
    let quad = QuadratureSpec::new(cfg.quad_cells, 80)?;
    let depth = cfg.depth.min(20);
    let results = par_map(&samples, |&(k, z)| -> Result<Check> {
        let d = DomainD::new(k)?;
        let s = g_series(&d, z, depth)?;
        let q = g_stieltjes(&d, z, &quad)?;
        Ok(Check::new(
            format!("series vs stieltjes at kappa={k} z={z}"),
            (s.value - q.value).norm(),
            s.residual_estimate + q.residual_estimate,
        ))
    });
    let mut out = results.into_iter().collect::<Result<Vec<_>>>()?;
    for z in [c(-1.0, 0.0), c(0.5, 2.0), c(-3.0, -1.0)] {
        let at_zero = g_series(&DomainD::real(0.0)?, z, depth)?.value;
        out.push(Check::new(format!("G(0,{z}) = 1/(1-z)"), (at_zero - 1.0 / (1.0 - z)).norm(), 1e-15));
        let at_one = g_series(&DomainD::limit_one(), z, depth)?.value;
        out.push(Check::new(format!("G(1,{z}) = 0"), at_one.norm(), 0.0));
    }
    Ok(out)
}

const CENTR_POINTS: [(f64, f64); 2] = [(-1.0, 1.0), (0.3, 0.8)];

fn centr(cfg: &RunConfig) -> Result<Vec<Check>> {
    let jobs: Vec<(Complex64, Complex64)> = SPEC_KAPPAS
        .iter()
        .flat_map(|&(a, b)| CENTR_POINTS.iter().map(move |&(x, y)| (c(a, b), c(x, y))))
        .collect();
    par_map(&jobs, |&(k, z)| {
        Ok(Check::new(format!("kappa={k} z={z}"), residual_centr(&DomainD::new(k)?, z, cfg.depth)?, CENTR_TOL))
    })
    .into_iter()
    .collect()
}

fn dyadic(cfg: &RunConfig) -> Result<Vec<Check>> {
    let points = [c(-1.0, 1.0), c(0.5, 0.5), c(0.0, 2.0), c(-0.5, 0.7)];
    par_map(&points, |&z| Ok(Check::new(format!("z={z}"), residual_dyadic(z, cfg.depth)?, DYADIC_TOL)))
        .into_iter()
        .collect()
}

// ---------------------------------------------------------------------------
// Eisenstein and theta

fn quasimodular(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut r = rng(cfg, 5);
    let mut out = Vec::new();
    for _ in 0..20 {
        let z = random_point(&mut r);
        out.push(Check::new(format!("G2 transformation at {}", z.z()), residual_quasimodular(z)?, QUASIMODULAR_TOL));
    }
    let trunc = TruncationSpec::default();
    let at_i = eisenstein_g2(h(0.0, 1.0), &trunc)?;
    out.push(Check::new("G2(i) = pi", (at_i - PI).norm(), QUASIMODULAR_TOL));
    let scaled = |z: Complex64| Ok(eisenstein_g2(UpperHalfPoint::new(z)?, &trunc)? * c(0.0, 1.0 / (2.0 * PI)));
    for kappa in [c(0.5, 0.0), c(0.3, 0.2), c(0.9, -0.1)] {
        for z in [c(0.0, 1.0), c(-0.4, 0.6), c(1.3, 0.9)] {
            let d = centr_defect(kappa, z, scaled)?;
            out.push(Check::new(format!("(i/2pi)G2 three-term at kappa={kappa} z={z}"), d.norm(), G2_CENTR_TOL));
        }
    }
    Ok(out)
}

fn prop5(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut r = rng(cfg, 8);
    let mut out = Vec::new();
    for _ in 0..24 {
        let ch = ThetaChar::new(
            Rational64::new(r.random_range(-12..12), r.random_range(1..9)),
            Rational64::new(r.random_range(-12..12), r.random_range(1..9)),
            r.random_range(1..4),
        )?;
        let z = random_point(&mut r);
        for rule in Prop5Rule::ALL {
            let res = residual_prop5(rule, &ch, z)?;
            out.push(Check::new(format!("rule {} at ({}, {})_{} z={}", rule.label(), ch.a, ch.b, ch.k, z.z()), res, PROP5_TOL));
        }
    }
    for _ in 0..10 {
        let z = random_point(&mut r);
        out.push(Check::new(format!("Jacobi identity at {}", z.z()), residual_jacobi(z)?, JACOBI_TOL));
    }
    let odd = ThetaChar::level_one(Rational64::new(1, 2), Rational64::new(1, 2));
    debug_assert!(is_odd_characteristic(&odd));
    for _ in 0..5 {
        let z = random_point(&mut r);
        let v = theta(&odd, z, &TruncationSpec::default())?;
        out.push(Check::new(format!("theta(1/2,1/2) at {}", z.z()), v.norm(), ODD_THETA_TOL));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// mean-modular forms

type Coord = fn(Complex64) -> Result<Complex64>;

fn e4(z: Complex64) -> Result<Complex64> {
    eisenstein_e4(UpperHalfPoint::new(z)?, &TruncationSpec::default())
}

fn e6(z: Complex64) -> Result<Complex64> {
    eisenstein_e6(UpperHalfPoint::new(z)?, &TruncationSpec::default())
}

fn zero(_: Complex64) -> Result<Complex64> {
    Ok(c(0.0, 0.0))
}

/// Weight 12, height 2: every polynomial in κ with coefficients in `M₁₂`.
fn height2_coords() -> [Coord; 3] {
    [
        |z| Ok(e4(z)?.powu(3)),
        |z| Ok(e6(z)?.powu(2)),
        |z| Ok(e4(z)?.powu(3) * 0.5 - e6(z)?.powu(2) * 2.0),
    ]
}

fn height2_form() -> KappaFunction {
    KappaFunction::polynomial(height2_coords().into_iter().map(|f| Arc::new(f) as _).collect())
}

/// Smooth on the upper half plane with no modular symmetry.
fn wobble(z: Complex64) -> Result<Complex64> {
    Ok((c(0.0, 2.0 * PI) * z).exp() + 1.0 / (z + c(0.3, 1.0)))
}

fn lyg(cfg: &RunConfig) -> Result<Vec<Check>> {
    let g = g_function(cfg.depth);
    let ctx = SlashContext::new(2)?;
    let jobs: Vec<(Complex64, UpperHalfPoint)> = SPEC_KAPPAS
        .iter()
        .flat_map(|&(a, b)| [h(0.2, 0.8), h(-0.3, 1.1)].map(|z| (c(a, b), z)))
        .collect();
    par_map(&jobs, |&(k, z)| Ok(Check::new(format!("g at kappa={k} z={}", z.z()), residual_lyg(&g, k, ctx, z)?, LYG_TOL)))
        .into_iter()
        .collect()
}

fn extract() -> Result<Vec<Check>> {
    let f = height2_form();
    let coords = height2_coords();
    let arc = ArcSpec::default();
    let mut out = Vec::new();
    for z in [h(0.1, 1.1), h(-0.3, 0.8), h(0.4, 0.9)] {
        let exact: Vec<Complex64> = coords.iter().map(|a| a(z.z())).collect::<Result<_>>()?;
        for j in 0..3 {
            let got = extract_coordinate(&f, j, z, &arc, &exact[..j])?;
            out.push(Check::new(format!("A_{j} at {}", z.z()), (got - exact[j]).norm(), EXTRACT_TOL));
        }
        let chained = extract_coordinates(&f, 1, z, &arc)?;
        for j in 0..2 {
            out.push(Check::new(format!("chained A_{j} at {}", z.z()), (chained[j] - exact[j]).norm(), EXTRACT_TOL));
        }
    }
    let ide = residual_ide(&wobble, SlashContext::new(2)?, h(0.0, 1.0))?;
    out.push(Check::control("non-modular function fails the first identity", ide[0]));
    Ok(out)
}

fn perein() -> Result<Vec<Check>> {
    let ctx = SlashContext::new(12)?;
    let mut out = Vec::new();
    let coords = height2_coords();
    let chain: Vec<Coord> = std::iter::once(zero as Coord).chain(coords).chain([zero as Coord]).collect();
    for z in [h(0.1, 1.1), h(-0.35, 0.95), h(0.25, 0.7)] {
        for (j, w) in chain.windows(2).enumerate() {
            let res = residual_perein(&w[0], &w[1], ctx, z)?;
            out.push(Check::new(format!("height-2 pair {j} at {}", z.z()), res, PEREIN_TOL));
        }
    }
    // the same relations on coordinates extracted from a height-1 form
    let f = KappaFunction::new(Some(1), |k: Complex64, w: Complex64| Ok(e4(w)?.powu(3) + k * e6(w)?.powu(2)));
    let arc = ArcSpec::default();
    let coord = |j: usize| {
        let f = f.clone();
        move |w: Complex64| -> Result<Complex64> { Ok(extract_coordinates(&f, j, UpperHalfPoint::new(w)?, &arc)?[j]) }
    };
    let (a0, a1) = (coord(0), coord(1));
    for z in [h(0.1, 1.1), h(-0.35, 0.95)] {
        out.push(Check::new(format!("extracted (0, A_0) at {}", z.z()), residual_perein(&zero, &a0, ctx, z)?, PEREIN_TOL));
        out.push(Check::new(format!("extracted (A_0, A_1) at {}", z.z()), residual_perein(&a0, &a1, ctx, z)?, PEREIN_TOL));
        out.push(Check::new(format!("extracted (A_1, 0) at {}", z.z()), residual_perein(&a1, &zero, ctx, z)?, PEREIN_TOL));
    }
    Ok(out)
}

fn prop4() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let points = [h(0.1, 0.9), h(-0.2, 0.7), h(0.45, 1.3)];
    for (name, f, k) in [("E4", e4 as Coord, 4), ("E6", e6 as Coord, 6)] {
        for z in points {
            let res = residual_prop4(&f, SlashContext::new(k)?, z)?;
            for (i, r) in res.iter().enumerate() {
                out.push(Check::new(format!("{name} identity {} at {}", i + 1, z.z()), *r, PROP4_TOL));
            }
        }
    }
    let theta4 = |w: Complex64| {
        let ch = ThetaChar::level_one(Rational64::from_integer(0), Rational64::from_integer(0));
        Ok(theta(&ch, UpperHalfPoint::new(w)?, &TruncationSpec::default())?.powu(4))
    };
    let res = residual_prop4(&theta4, SlashContext::new(2)?, h(0.1, 0.9))?;
    out.push(Check::control("theta^4(0,0) fails one identity", res.iter().cloned().fold(0.0, f64::max)));
    Ok(out)
}

// ---------------------------------------------------------------------------
// sporadic solutions

fn sporadic(cfg: &RunConfig, notes: &mut Vec<String>) -> Result<Vec<Check>> {
    let seed = cfg.seed as usize;
    let mut out = Vec::new();
    let gamma2 = run_pipeline(&catalog("gamma2-classic")?.functions(), seed)?;
    let expect = CPoly::from_real(&[0.0, 3.0, -3.0]);
    let coeff_gap = (0..3)
        .map(|i| {
            let got = gamma2.poly.coeffs().get(i).copied().unwrap_or_default();
            (got - expect.coeffs()[i]).norm()
        })
        .fold(0.0, f64::max);
    let extra_degree = gamma2.poly.coeffs().len().saturating_sub(3);
    out.push(Check::new("gamma2 P = 3k(1-k) coefficientwise", coeff_gap, POLY_TOL));
    out.push(Check::new("gamma2 P has degree 2", extra_degree as f64, 0.0));
    let inside: Vec<Complex64> = gamma2.roots_in_d.iter().map(|r| r.value).collect();
    out.push(Check::new("gamma2 roots in D are {0}", (inside.len() as f64 - 1.0).abs(), 0.0));
    if let Some(k) = inside.first() {
        out.push(Check::new("gamma2 root at 0", k.norm(), 1e-9));
    }
    let mut bases: Vec<OrbitBasis> = ["gamma2-classic", "jacobi-orbit", "quarter-orbit", "sixth-Q1", "sixth-Q23"]
        .iter()
        .map(|n| catalog(n))
        .collect::<Result<_>>()?;
    bases.push(catalog("quarter-orbit")?.with_recipe(Recipe::PairProducts));
    let runs = par_map(&bases, |b| run_pipeline(&b.functions(), seed));
    for (b, run) in bases.iter().zip(runs) {
        let report = run?;
        out.push(Check::new(format!("{} fit residual", b.label), report.fit_residual, 1e-8));
        let roots: Vec<String> = report.roots_in_d.iter().map(|r| format!("{:.6}", r.value)).collect();
        notes.push(format!("{}: dimension {}, roots in D [{}]", b.label, report.dimension, roots.join(", ")));
        for (k, r) in &report.lyg_residuals {
            out.push(Check::new(format!("{} kernel at {k:.6}", b.label), *r, KERNEL_LYG_TOL));
            out.push(Check::new(format!("{} root {k:.6} in D", b.label), if in_domain(*k) { 0.0 } else { 1.0 }, 0.0));
        }
    }
    for name in ["sixth-Q2", "sixth-Q3"] {
        if let Err(e) = run_pipeline(&catalog(name)?.functions(), seed) {
            notes.push(format!("{name}: {e}"));
        }
    }
    Ok(out)
}
