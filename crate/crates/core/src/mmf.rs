//! Weight-k slash operators, matrix words, and the residual checks of the
//! mean-modular equation
//!
//! ```text
//! f(κ, z) = κ f(κ, z − 1) + (1 − κ)(1 − z)^(−k) f(κ, z/(1 − z)),
//! ```
//!
//! i.e. `f = κ f|T⁻¹ + (1 − κ) f|R⁻¹`, together with the coordinate
//! relations and the height-one identity systems.
//!
//! The slash convention is `(f|γ)(z) = (cz + d)^(−k) f((az + b)/(cz + d))`,
//! a right action: `f|(γ₁γ₂) = (f|γ₁)|γ₂`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{config, domain, QmarkError, Result};
use crate::matrix::{Mat2, MatSum};
use crate::modular::{eisenstein_g2, TruncationSpec, UpperHalfPoint};
use crate::period::{g_series, DomainD};
use crate::quadrature::gauss_legendre;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A function on the upper half plane.
pub type ZFunction<'a> = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync + 'a;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlashContext {
    k: u32,
}

impl SlashContext {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 || k % 2 != 0 {
            return config(format!("weight k = {k} must be even and positive"));
        }
        Ok(SlashContext { k })
    }

    pub fn weight(&self) -> u32 {
        self.k
    }
}

/// `(f|γ)(z) = (cz + d)^(−k) f(γz)`.
pub fn slash(f: &ZFunction, gamma: &Mat2, ctx: SlashContext, z: UpperHalfPoint) -> Result<Complex64> {
    let w = z.z();
    let j = gamma.automorphy(w);
    if j.norm() == 0.0 {
        return domain(format!("{gamma} has a pole at z = {w}"));
    }
    let image = gamma.act(w);
    if !(image.im > 0.0) {
        return domain(format!("{gamma} maps z = {w} out of the upper half plane"));
    }
    Ok(f(image)? / j.powu(ctx.k))
}

/// `f|(Σ cᵢγᵢ)` at `z`.
pub fn slash_sum(f: &ZFunction, sum: &MatSum, ctx: SlashContext, z: UpperHalfPoint) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, m) in &sum.terms {
        acc += c * slash(f, m, ctx, z)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// matrix words

/// Parses a word over `U, S, T, R, I` with optional integer exponents, e.g.
/// `"U^2 S"`, `"SU^2S"`, `"T^-1"`, `"R^{-3}"`.
pub fn mat_word(word: &str) -> Result<Mat2> {
    let sum = parse_mat_sum(word)?;
    match sum.terms.as_slice() {
        [(c, m)] if *c == ONE => Ok(*m),
        _ => Err(QmarkError::Parse(format!("'{word}' is not a single matrix word"))),
    }
}

/// Parses a group-ring element such as `"(I-SUS)(I+S)"` or `"2I - T - R^-1"`.
pub fn parse_mat_sum(expr: &str) -> Result<MatSum> {
    let chars: Vec<char> = expr.chars().filter(|c| !c.is_whitespace() && *c != '*' && *c != '·').collect();
    if chars.is_empty() {
        return Err(QmarkError::Parse("empty matrix expression".into()));
    }
    let mut p = Parser { s: &chars, pos: 0 };
    let out = p.sum()?;
    if p.pos != chars.len() {
        return Err(p.error("unexpected character"));
    }
    Ok(out)
}

struct Parser<'a> {
    s: &'a [char],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.s.get(self.pos).copied()
    }

    fn error(&self, what: &str) -> QmarkError {
        let text: String = self.s.iter().collect();
        QmarkError::Parse(format!("{what} at position {} in '{text}'", self.pos))
    }

    fn sum(&mut self) -> Result<MatSum> {
        let mut acc = MatSum::zero();
        let mut sign = 1.0;
        if let Some(c @ ('+' | '-')) = self.peek() {
            sign = if c == '-' { -1.0 } else { 1.0 };
            self.pos += 1;
        }
        loop {
            acc = acc + self.product()? * Complex64::new(sign, 0.0);
            match self.peek() {
                Some('+') => sign = 1.0,
                Some('-') => sign = -1.0,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn product(&mut self) -> Result<MatSum> {
        let mut acc = MatSum::identity();
        if let Some(n) = self.integer(false)? {
            acc = acc * Complex64::new(n as f64, 0.0);
        }
        let mut factors = 0;
        loop {
            let factor = match self.peek() {
                Some('(') => {
                    self.pos += 1;
                    let inner = self.sum()?;
                    if self.peek() != Some(')') {
                        return Err(self.error("expected ')'"));
                    }
                    self.pos += 1;
                    let n = self.exponent()?;
                    if n < 0 {
                        return Err(self.error("negative power of a sum"));
                    }
                    (0..n).fold(MatSum::identity(), |a, _| a * inner.clone())
                }
                Some(c @ ('U' | 'S' | 'T' | 'R' | 'I')) => {
                    self.pos += 1;
                    let m = match c {
                        'U' => Mat2::U,
                        'S' => Mat2::S,
                        'T' => Mat2::T,
                        'R' => Mat2::R,
                        _ => Mat2::IDENTITY,
                    };
                    MatSum::single(m.pow(self.exponent()?))
                }
                _ => break,
            };
            acc = acc * factor;
            factors += 1;
        }
        if factors == 0 && acc == MatSum::identity() {
            return Err(self.error("expected a matrix letter"));
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<i64> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        let braced = self.peek() == Some('{');
        if braced {
            self.pos += 1;
        }
        let n = self.integer(true)?.ok_or_else(|| self.error("expected exponent"))?;
        if braced {
            if self.peek() != Some('}') {
                return Err(self.error("expected '}'"));
            }
            self.pos += 1;
        }
        Ok(n)
    }

    fn integer(&mut self, signed: bool) -> Result<Option<i64>> {
        let start = self.pos;
        if signed && matches!(self.peek(), Some('-' | '+')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.s[start..self.pos].iter().collect();
        if text.is_empty() {
            return Ok(None);
        }
        text.parse::<i64>()
            .map(Some)
            .map_err(|_| self.error("bad integer"))
    }
}

// ---------------------------------------------------------------------------
// functions of (κ, z)

type KappaEval = dyn Fn(Complex64, Complex64) -> Result<Complex64> + Send + Sync;

/// A function `f(κ, z)`, optionally known to be a polynomial of degree
/// `height` in `κ`.
#[derive(Clone)]
pub struct KappaFunction {
    eval: Arc<KappaEval>,
    pub height: Option<u32>,
}

impl fmt::Debug for KappaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KappaFunction").field("height", &self.height).finish()
    }
}

impl KappaFunction {
    pub fn new(height: Option<u32>, eval: impl Fn(Complex64, Complex64) -> Result<Complex64> + Send + Sync + 'static) -> Self {
        KappaFunction {
            eval: Arc::new(eval),
            height,
        }
    }

    /// `Σ κʲ Aⱼ(z)`.
    pub fn polynomial(coords: Vec<Arc<ZFunction<'static>>>) -> Self {
        let height = coords.len().saturating_sub(1) as u32;
        KappaFunction::new(Some(height), move |kappa, z| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in coords.iter().rev() {
                acc = acc * kappa + a(z)?;
            }
            Ok(acc)
        })
    }

    pub fn eval(&self, kappa: Complex64, z: Complex64) -> Result<Complex64> {
        (self.eval)(kappa, z)
    }
}

/// `g(κ, z) = G(κ, z + 1) − (i/2π) G₂(z)`, with `G` from the tree series at
/// the given depth.
pub fn g_function(depth: u32) -> KappaFunction {
    KappaFunction::new(None, move |kappa, z| {
        let d = DomainD::new(kappa)?;
        let big_g = g_series(&d, z + ONE, depth)?.value;
        let g2 = eisenstein_g2(UpperHalfPoint::new(z)?, &TruncationSpec::default())?;
        Ok(big_g - g2 * Complex64::new(0.0, 1.0 / (2.0 * PI)))
    })
}

/// Signed defect `f(κ,z) − κ f(κ,z−1) − (1−κ)(1−z)^(−k) f(κ, z/(1−z))`.
pub fn lyg_defect(f: &KappaFunction, kappa: Complex64, ctx: SlashContext, z: UpperHalfPoint) -> Result<Complex64> {
    let w = z.z();
    let moved = w / (ONE - w);
    if !(moved.im > 0.0) {
        return domain(format!("z/(1 - z) leaves the upper half plane at z = {w}"));
    }
    let jr = (ONE - w).powu(ctx.k);
    Ok(f.eval(kappa, w)? - kappa * f.eval(kappa, w - ONE)? - (ONE - kappa) * f.eval(kappa, moved)? / jr)
}

pub fn residual_lyg(f: &KappaFunction, kappa: Complex64, ctx: SlashContext, z: UpperHalfPoint) -> Result<f64> {
    Ok(lyg_defect(f, kappa, ctx, z)?.norm())
}

// ---------------------------------------------------------------------------
// coordinates

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSpec {
    pub epsilon: f64,
    pub nodes: usize,
}

impl ArcSpec {
    pub fn new(epsilon: f64, nodes: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return config(format!("arc radius {epsilon} must lie in (0, 1/2)"));
        }
        if nodes < 16 {
            return config(format!("{nodes} arc nodes, at least 16 required"));
        }
        Ok(ArcSpec { epsilon, nodes })
    }
}

impl Default for ArcSpec {
    fn default() -> Self {
        ArcSpec {
            epsilon: 1.0 / 512.0,
            nodes: 48,
        }
    }
}

/// Acceptance threshold for the last two extrapolants, relative to
/// `max(1, max |f|)` on the arc.
pub const EXTRACTION_TOL: f64 = 1e-8;

/// `(1/πi) ∫ κ^(−j−1) (f(κ,z) − Σ_{s<j} κ^s A_s(z)) dκ` over the arc
/// `{|κ| = ε, |1 − κ| ≤ 1}` from the bottom upwards.
/// Also returns `max |f|` over the nodes.
fn arc_integral(f: &KappaFunction, j: usize, z: Complex64, prior: &[Complex64], eps: f64, gl: &(Vec<f64>, Vec<f64>)) -> Result<(Complex64, f64)> {
    let theta0 = (eps / 2.0).acos();
    // κ = εe^{iθ}, dκ = iκ dθ, so the integrand becomes κ^(−j) (·) / π
    let thetas: Vec<f64> = gl.0.iter().map(|&x| theta0 * x).collect();
    let values = crate::par_map(&thetas, |&theta| -> Result<(Complex64, f64)> {
        let kappa = Complex64::from_polar(eps, theta);
        let value = f.eval(kappa, z)?;
        let mut rest = value;
        let mut pow = ONE;
        for a in prior {
            rest -= pow * a;
            pow *= kappa;
        }
        Ok((rest / kappa.powu(j as u32), value.norm()))
    });
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for (v, w) in values.into_iter().zip(&gl.1) {
        let (v, size) = v?;
        acc += v * *w;
        scale = scale.max(size);
    }
    Ok((acc * theta0 / PI, scale))
}

/// The `j`-th coordinate of `f` at `z`, given `A_0(z), …, A_{j−1}(z)`.
///
/// The arc integral is taken at radii `ε, ε/2, ε/4` and extrapolated to
/// `ε → 0`. For `f` analytic at `κ = 0` its error is a series in odd powers of
/// `ε`, so the `ε` and then the `ε³` terms are eliminated. Errors in `prior`
/// enter with negative powers of `ε` and show up as divergence.
pub fn extract_coordinate(f: &KappaFunction, j: usize, z: UpperHalfPoint, arc: &ArcSpec, prior: &[Complex64]) -> Result<Complex64> {
    if prior.len() != j {
        return config(format!("coordinate {j} needs {j} prior values, got {}", prior.len()));
    }
    let gl = gauss_legendre(arc.nodes);
    let mut levels = [Complex64::new(0.0, 0.0); 3];
    let mut scale = 1.0f64;
    for (i, slot) in levels.iter_mut().enumerate() {
        let (v, size) = arc_integral(f, j, z.z(), prior, arc.epsilon / (1 << i) as f64, &gl)?;
        *slot = v;
        scale = scale.max(size);
    }
    let first_coarse = levels[1] * 2.0 - levels[0];
    let first_fine = levels[2] * 2.0 - levels[1];
    let extrapolated = (first_fine * 8.0 - first_coarse) / 7.0;
    let gap = (extrapolated - first_fine).norm();
    if !(gap < EXTRACTION_TOL * scale) {
        return Err(QmarkError::Precision(format!(
            "coordinate {j} at z = {}: extrapolants differ by {gap:.3e}",
            z.z()
        )));
    }
    Ok(extrapolated)
}

/// `A_0(z), …, A_{upto}(z)`, each extracted with the previous ones as prior.
pub fn extract_coordinates(f: &KappaFunction, upto: usize, z: UpperHalfPoint, arc: &ArcSpec) -> Result<Vec<Complex64>> {
    let mut coords = Vec::with_capacity(upto + 1);
    for j in 0..=upto {
        let a = extract_coordinate(f, j, z, arc, &coords)?;
        coords.push(a);
    }
    Ok(coords)
}

// ---------------------------------------------------------------------------
// identity systems

fn word(s: &str) -> MatSum {
    parse_mat_sum(s).expect("built-in word")
}

fn norms<const N: usize>(v: [Complex64; N]) -> [f64; N] {
    v.map(|c| c.norm())
}

/// Signed `A_{j+1}|(I − US) − A_j|(I − SU²S)`.
pub fn perein_defect(a_j: &ZFunction, a_next: &ZFunction, ctx: SlashContext, z: UpperHalfPoint) -> Result<Complex64> {
    Ok(slash_sum(a_next, &word("I-US"), ctx, z)? - slash_sum(a_j, &word("I-SU^2S"), ctx, z)?)
}

pub fn residual_perein(a_j: &ZFunction, a_next: &ZFunction, ctx: SlashContext, z: UpperHalfPoint) -> Result<f64> {
    Ok(perein_defect(a_j, a_next, ctx, z)?.norm())
}

/// For `f = A + κB`: the residuals of `A = A|R`, `A + B = (A + B)|T` and
/// `B = B|SUS`.
pub fn residual_height1(a: &ZFunction, b: &ZFunction, ctx: SlashContext, z: UpperHalfPoint) -> Result<[f64; 3]> {
    let sum = |w: Complex64| Ok(a(w)? + b(w)?);
    Ok(norms([
        slash_sum(a, &word("I-R"), ctx, z)?,
        slash_sum(&sum, &word("I-T"), ctx, z)?,
        slash_sum(b, &word("I-SUS"), ctx, z)?,
    ]))
}

/// Signed left-hand sides of `A|(I−US)`, `A|(I−SUS)(I+S)` and
/// `A|(I−SUS)(I+U+U²)`.
pub fn ide_defects(a: &ZFunction, ctx: SlashContext, z: UpperHalfPoint) -> Result<[Complex64; 3]> {
    Ok([
        slash_sum(a, &word("I-US"), ctx, z)?,
        slash_sum(a, &word("(I-SUS)(I+S)"), ctx, z)?,
        slash_sum(a, &word("(I-SUS)(I+U+U^2)"), ctx, z)?,
    ])
}

pub fn residual_ide(a: &ZFunction, ctx: SlashContext, z: UpperHalfPoint) -> Result<[f64; 3]> {
    Ok(norms(ide_defects(a, ctx, z)?))
}

/// Signed defects of the four identities for `C`:
/// `C(z+1) − C(z)`, `2C − C|S − (C|S)(z+3)`,
/// `3C − C|S − (C|S)(z+2) − (C|S)(z+4)` and `C − C|[[1,0],[−6,1]]`.
pub fn prop4_defects(c: &ZFunction, ctx: SlashContext, z: UpperHalfPoint) -> Result<[Complex64; 4]> {
    Ok([
        slash_sum(c, &word("T-I"), ctx, z)?,
        slash_sum(c, &word("2I - S - ST^3"), ctx, z)?,
        slash_sum(c, &word("3I - S - ST^2 - ST^4"), ctx, z)?,
        slash_sum(c, &(MatSum::identity() - MatSum::single(Mat2::new(1, 0, -6, 1))), ctx, z)?,
    ])
}

pub fn residual_prop4(c: &ZFunction, ctx: SlashContext, z: UpperHalfPoint) -> Result<[f64; 4]> {
    Ok(norms(prop4_defects(c, ctx, z)?))
}

/// Signed `C(z) + (C|S)(z) − (C|S)(z+1) − (C|S)(z−1)`.
pub fn svarbus_defect(c: &ZFunction, ctx: SlashContext, z: UpperHalfPoint) -> Result<Complex64> {
    slash_sum(c, &word("I + S - ST - ST^-1"), ctx, z)
}
