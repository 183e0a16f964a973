//! Isolated solutions of the mean-modular equation inside spaces of modular
//! forms spanned by powers of theta constants.
//!
//! For a basis `u` of a space closed under `z ↦ z − 1` and
//! `u ↦ (1 − z)^(−k) u(z/(1 − z))`, write `u(z − 1) = A u(z)` and
//! `(1 − z)^(−k) u(z/(1 − z)) = B u(z)`. A combination `aᵀu` satisfies the
//! equation at `κ` exactly when `aᵀ(I − κA − (1 − κ)B) = 0`, so the admissible
//! `κ` are the roots of `P(κ) = det(I − B + κ(B − A))`.

use std::collections::HashSet;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{config, QmarkError, Result};
use crate::mmf::{residual_lyg, KappaFunction, SlashContext};
use crate::modular::{is_odd_characteristic, theta, ThetaChar, TruncationSpec, UpperHalfPoint};
use crate::poly::{CPoly, Root};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest orbit the closure will build.
pub const MAX_ORBIT: usize = 64;

/// How basis functions are built from the characteristics of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recipe {
    /// `ϑ(c)^power` for each member.
    Power,
    /// `ϑ(cᵢ)^(power/2) ϑ(cⱼ)^(power/2)` for each pair `i ≤ j`.
    PairProducts,
}

/// Level-one characteristics closed under the modular action, with the
/// recipe turning them into weight `power/2` functions.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitBasis {
    pub label: String,
    pub members: Vec<ThetaChar>,
    pub power: u32,
    pub recipe: Recipe,
    /// Size of the characteristic orbit the members came from, counting
    /// characteristics whose theta constant vanishes.
    pub orbit_size: usize,
    pub excluded_zero: bool,
}

impl OrbitBasis {
    pub fn weight(&self) -> u32 {
        self.power / 2
    }

    pub fn with_recipe(mut self, recipe: Recipe) -> OrbitBasis {
        if recipe == Recipe::PairProducts {
            self.label = format!("{}*pairs", self.label);
        }
        self.recipe = recipe;
        self
    }

    /// The basis functions as theta monomials.
    pub fn functions(&self) -> FunctionBasis {
        let monomials = match self.recipe {
            Recipe::Power => self.members.iter().map(|&c| vec![(c, self.power)]).collect(),
            Recipe::PairProducts => {
                let half = self.power / 2;
                let mut out = Vec::new();
                for (i, &c) in self.members.iter().enumerate() {
                    out.push(vec![(c, self.power)]);
                    for &d in &self.members[i + 1..] {
                        out.push(vec![(c, half), (d, half)]);
                    }
                }
                out
            }
        };
        FunctionBasis {
            label: self.label.clone(),
            weight: self.weight(),
            monomials,
        }
    }
}

/// `Π ϑ(c)^e` over its factors.
pub type Monomial = Vec<(ThetaChar, u32)>;

/// Products of theta constants, all of the same weight.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionBasis {
    pub label: String,
    pub weight: u32,
    pub monomials: Vec<Monomial>,
}

impl FunctionBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn eval(&self, z: UpperHalfPoint) -> Result<Vec<Complex64>> {
        let trunc = TruncationSpec::default();
        let mut cache: Vec<(ThetaChar, Complex64)> = Vec::new();
        let mut out = Vec::with_capacity(self.monomials.len());
        for mono in &self.monomials {
            let mut acc = ONE;
            for &(c, e) in mono {
                let v = match cache.iter().find(|(d, _)| *d == c) {
                    Some(&(_, v)) => v,
                    None => {
                        let v = theta(&c, z, &trunc)?;
                        cache.push((c, v));
                        v
                    }
                };
                acc *= v.powu(e);
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn subset(&self, keep: &[usize]) -> FunctionBasis {
        FunctionBasis {
            monomials: keep.iter().map(|&i| self.monomials[i].clone()).collect(),
            ..self.clone()
        }
    }
}

/// Readable form of a monomial, e.g. `t(1/4,0)^4` or `t(0,1/4)^2*t(1/4,0)^2`.
pub fn monomial_label(m: &Monomial) -> String {
    m.iter()
        .map(|(c, e)| format!("t({},{})^{e}", c.a, c.b))
        .collect::<Vec<_>>()
        .join("*")
}

fn r(p: i64, q: i64) -> Rational64 {
    Rational64::new(p, q)
}

fn frac(x: Rational64) -> Rational64 {
    x - x.floor()
}

/// Representative of `±(a, b) mod 1` with the smaller `(b, a)`.
pub fn canonical(ch: &ThetaChar) -> ThetaChar {
    let p = (frac(ch.a), frac(ch.b));
    let m = (frac(-ch.a), frac(-ch.b));
    let (a, b) = if (m.1, m.0) < (p.1, p.0) { m } else { p };
    ThetaChar::level_one(a, b)
}

/// `z ↦ z + 1` on characteristics: `(a, b) ↦ (a, b + a + 1/2)`.
fn act_t(ch: &ThetaChar) -> ThetaChar {
    canonical(&ThetaChar::level_one(ch.a, ch.b + ch.a + r(1, 2)))
}

/// `z ↦ −1/z` on characteristics: `(a, b) ↦ (b, −a)`.
fn act_s(ch: &ThetaChar) -> ThetaChar {
    canonical(&ThetaChar::level_one(ch.b, -ch.a))
}

/// The orbit of `seed` under the actions of `T` and `S`, members in
/// breadth-first discovery order. Characteristics with a vanishing theta
/// constant are dropped and flagged.
pub fn orbit_closure(seed: &ThetaChar, power: u32) -> Result<OrbitBasis> {
    if power == 0 || power % 4 != 0 {
        return config(format!("power {power} must be a positive multiple of 4 (even weight)"));
    }
    if seed.k != 1 {
        return config("orbit closure works with level-one characteristics");
    }
    let start = canonical(seed);
    let mut seen = HashSet::from([start]);
    let mut order = vec![start];
    let mut next = 0;
    while next < order.len() {
        let ch = order[next];
        next += 1;
        for image in [act_t(&ch), act_s(&ch)] {
            if seen.insert(image) {
                order.push(image);
                if order.len() > MAX_ORBIT {
                    return config(format!("orbit of {:?} exceeds {MAX_ORBIT} members", seed));
                }
            }
        }
    }
    let orbit_size = order.len();
    let members: Vec<ThetaChar> = order.into_iter().filter(|c| !is_odd_characteristic(c)).collect();
    Ok(OrbitBasis {
        label: format!("orbit({}, {})", start.a, start.b),
        excluded_zero: members.len() < orbit_size,
        members,
        power,
        recipe: Recipe::Power,
        orbit_size,
    })
}

/// All orbits of characteristics with `den·a, den·b ∈ ℤ`, skipping those with
/// `skip·a, skip·b ∈ ℤ`. Orbits are listed by their smallest member.
pub fn partition(den: i64, skip: Option<i64>, power: u32) -> Result<Vec<OrbitBasis>> {
    if den <= 0 {
        return config("denominator must be positive");
    }
    let mut covered = HashSet::new();
    let mut out = Vec::new();
    for bn in 0..den {
        for an in 0..den {
            let ch = canonical(&ThetaChar::level_one(r(an, den), r(bn, den)));
            if let Some(s) = skip {
                if (ch.a * s).is_integer() && (ch.b * s).is_integer() {
                    continue;
                }
            }
            if covered.contains(&ch) {
                continue;
            }
            let orbit = orbit_closure(&ch, power)?;
            let mut all = vec![ch];
            // re-walk to mark zero members as covered too
            let mut frontier = vec![ch];
            while let Some(c) = frontier.pop() {
                for image in [act_t(&c), act_s(&c)] {
                    if !all.contains(&image) {
                        all.push(image);
                        frontier.push(image);
                    }
                }
            }
            covered.extend(all);
            out.push(orbit);
        }
    }
    Ok(out)
}

/// The catalog of characteristics with `4a, 4b ∈ ℤ`: orbit sizes 1, 3, 6.
pub fn quarter_partition() -> Result<Vec<OrbitBasis>> {
    partition(4, None, 4)
}

/// The catalog with `6a, 6b ∈ ℤ` and `(2a, 2b) ∉ ℤ²`. Under the `T` rule
/// `(1/3, 1/3) ↦ (1/3, 1/6)`, so the classical four- and eight-member lists
/// of thirds and sixths form a single orbit: sizes are 4 and 12.
pub fn sixth_partition() -> Result<Vec<OrbitBasis>> {
    partition(6, Some(2), 4)
}

/// Names accepted by [`catalog`].
pub const CATALOG: [&str; 7] = [
    "gamma2-classic",
    "jacobi-orbit",
    "quarter-orbit",
    "sixth-Q1",
    "sixth-Q2",
    "sixth-Q3",
    "sixth-Q23",
];

/// Named fourth-power bases, members listed as in the classical tables.
/// `sixth-Q2` and `sixth-Q3` are not invariant on their own; `sixth-Q23` is
/// their union.
pub fn catalog(name: &str) -> Result<OrbitBasis> {
    if name == "sixth-Q23" {
        let mut q = catalog("sixth-Q2")?;
        q.members.extend(catalog("sixth-Q3")?.members);
        q.label = name.to_string();
        q.orbit_size = q.members.len();
        return Ok(q);
    }
    let list: Vec<(i64, i64, i64, i64)> = match name {
        "gamma2-classic" => vec![(0, 1, 1, 2), (1, 2, 0, 1)],
        "jacobi-orbit" => vec![(0, 1, 0, 1), (1, 2, 0, 1), (0, 1, 1, 2)],
        "quarter-orbit" => vec![(0, 1, 1, 4), (1, 4, 0, 1), (1, 4, 1, 4), (3, 4, 1, 4), (1, 4, 1, 2), (1, 2, 1, 4)],
        "sixth-Q1" => vec![(1, 6, 1, 6), (5, 6, 1, 6), (1, 6, 1, 2), (1, 2, 1, 6)],
        "sixth-Q2" => vec![(1, 3, 1, 3), (1, 3, 1, 2), (1, 2, 1, 3), (2, 3, 1, 3)],
        "sixth-Q3" => vec![
            (0, 1, 1, 6),
            (0, 1, 1, 3),
            (1, 6, 0, 1),
            (1, 6, 1, 3),
            (1, 3, 0, 1),
            (1, 3, 1, 6),
            (2, 3, 1, 6),
            (5, 6, 1, 3),
        ],
        _ => {
            return Err(QmarkError::Parse(format!(
                "unknown catalog entry '{name}', expected one of {}",
                CATALOG.join(", ")
            )))
        }
    };
    let members: Vec<ThetaChar> = list
        .into_iter()
        .map(|(p, q, s, t)| ThetaChar::level_one(r(p, q), r(s, t)))
        .collect();
    let orbit_size = if name == "gamma2-classic" { 3 } else { members.len() };
    Ok(OrbitBasis {
        label: name.to_string(),
        members,
        power: 4,
        recipe: Recipe::Power,
        orbit_size,
        excluded_zero: false,
    })
}

/// `n` deterministic sample points in `{|Re z| ≤ 1/2, 0.35 ≤ Im z ≤ 1}` from
/// a Kronecker sequence, starting at index `offset`.
pub fn sample_points(n: usize, offset: usize) -> Vec<UpperHalfPoint> {
    let (g1, g2) = (0.618_033_988_749_894_8, 0.754_877_666_246_692_7);
    (offset..offset + n)
        .map(|i| {
            let i = i as f64 + 1.0;
            let x = (i * g1).fract() - 0.5;
            let y = 0.35 + 0.65 * (i * g2).fract();
            UpperHalfPoint::new(Complex64::new(x, y)).expect("sample in upper half plane")
        })
        .collect()
}

// ---------------------------------------------------------------------------
// fitting

#[derive(Debug, Clone, PartialEq)]
pub struct TransformPair {
    pub mat_a: DMatrix<Complex64>,
    pub mat_b: DMatrix<Complex64>,
    /// Largest row residual of either fit, relative to the largest row of
    /// the fitted values.
    pub fit_residual: f64,
}

/// Fits with a larger relative residual mean the span is not invariant.
pub const FIT_TOL: f64 = 1e-8;

fn eval_rows(basis: &FunctionBasis, points: &[Complex64]) -> Result<DMatrix<Complex64>> {
    let mut m = DMatrix::from_element(points.len(), basis.len(), ZERO);
    for (row, &z) in points.iter().enumerate() {
        for (col, x) in basis.eval(UpperHalfPoint::new(z)?)?.into_iter().enumerate() {
            m[(row, col)] = x;
        }
    }
    Ok(m)
}

fn check_rank(u: &DMatrix<Complex64>) -> Result<()> {
    let sv = u.clone().svd(false, false).singular_values;
    let (max, min) = (sv.max(), sv.min());
    if !(min > 1e-10 * max) {
        return Err(QmarkError::Sampling(format!(
            "sample matrix is rank deficient (singular values {max:.3e} .. {min:.3e})"
        )));
    }
    Ok(())
}

/// Functions linearly independent on the samples, chosen greedily in order.
pub fn independent_members(basis: &FunctionBasis, samples: &[UpperHalfPoint]) -> Result<FunctionBasis> {
    let points: Vec<Complex64> = samples.iter().map(|s| s.z()).collect();
    let u = eval_rows(basis, &points)?;
    let mut kept = Vec::new();
    let mut ortho: Vec<DVector<Complex64>> = Vec::new();
    for col in 0..u.ncols() {
        let original = u.column(col).into_owned();
        let mut v = original.clone();
        // twice, for stability
        for _ in 0..2 {
            for q in &ortho {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        if v.norm() > 1e-8 * original.norm() {
            ortho.push(v.normalize());
            kept.push(col);
        }
    }
    Ok(basis.subset(&kept))
}

/// Least-squares fit of `A` and `B` from evaluations at `samples`.
pub fn fit_transform_pair(basis: &FunctionBasis, ctx: SlashContext, samples: &[UpperHalfPoint]) -> Result<TransformPair> {
    let l = basis.len();
    if l == 0 {
        return config("empty basis");
    }
    if ctx.weight() != basis.weight {
        return config(format!(
            "basis has weight {} but the slash weight is {}",
            basis.weight,
            ctx.weight()
        ));
    }
    if samples.len() < 2 * l {
        return Err(QmarkError::Sampling(format!(
            "{} samples for a basis of {l}, need at least {}",
            samples.len(),
            2 * l
        )));
    }
    let z: Vec<Complex64> = samples.iter().map(|s| s.z()).collect();
    let u = eval_rows(basis, &z)?;
    check_rank(&u)?;
    let shifted: Vec<Complex64> = z.iter().map(|&w| w - ONE).collect();
    let y_a = eval_rows(basis, &shifted)?;
    let moved: Vec<Complex64> = z.iter().map(|&w| w / (ONE - w)).collect();
    let mut y_b = eval_rows(basis, &moved)?;
    for (row, &w) in z.iter().enumerate() {
        let factor = (ONE - w).powu(ctx.weight()).inv();
        for col in 0..l {
            y_b[(row, col)] *= factor;
        }
    }
    let svd = u.clone().svd(true, true);
    let solve = |y: &DMatrix<Complex64>| -> Result<DMatrix<Complex64>> {
        svd.solve(y, 0.0)
            .map(|x| x.transpose())
            .map_err(|e| QmarkError::Sampling(e.to_string()))
    };
    let mat_a = solve(&y_a)?;
    let mat_b = solve(&y_b)?;
    let row_max = |m: &DMatrix<Complex64>| (0..m.nrows()).map(|i| m.row(i).norm()).fold(0.0, f64::max);
    let rel = |m: &DMatrix<Complex64>, y: &DMatrix<Complex64>| row_max(&(&u * m.transpose() - y)) / row_max(y).max(f64::MIN_POSITIVE);
    let fit_residual = rel(&mat_a, &y_a).max(rel(&mat_b, &y_b));
    Ok(TransformPair {
        mat_a,
        mat_b,
        fit_residual,
    })
}

fn pencil(pair: &TransformPair, kappa: Complex64) -> DMatrix<Complex64> {
    let l = pair.mat_a.nrows();
    DMatrix::identity(l, l) - &pair.mat_b + (&pair.mat_b - &pair.mat_a) * kappa
}

/// `P(κ) = det(I − B + κ(B − A))`, interpolated at `ℓ + 1` points on the
/// circle `|κ − 1/2| = 1/2`.
pub fn det_polynomial(pair: &TransformPair) -> Result<CPoly> {
    let l = pair.mat_a.nrows();
    if pair.mat_a.ncols() != l || pair.mat_b.shape() != (l, l) {
        return config("transform matrices must be square and of equal size");
    }
    let n = l + 1;
    let omega = |m: usize| Complex64::from_polar(1.0, 2.0 * PI * (m % n) as f64 / n as f64);
    let values: Vec<Complex64> = (0..n).map(|m| pencil(pair, 0.5 + 0.5 * omega(m)).determinant()).collect();
    // coefficients in t = 2κ − 1
    let t_coeffs: Vec<Complex64> = (0..n)
        .map(|d| (0..n).map(|m| values[m] * omega(m * d).conj()).sum::<Complex64>() / n as f64)
        .collect();
    // expand Σ c_d (2κ − 1)^d
    let mut coeffs = vec![ZERO; n];
    let mut power = vec![ONE];
    for &c in &t_coeffs {
        for (i, &p) in power.iter().enumerate() {
            coeffs[i] += c * p;
        }
        let mut next = vec![ZERO; power.len() + 1];
        for (i, &p) in power.iter().enumerate() {
            next[i + 1] += p * 2.0;
            next[i] -= p;
        }
        power = next;
    }
    // drop top coefficients while their total weight on |κ| ≤ 1 is negligible
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut dropped = 0.0;
    while let Some(top) = coeffs.last() {
        if dropped + top.norm() > 1e-10 * scale {
            break;
        }
        dropped += top.norm();
        coeffs.pop();
    }
    let poly = CPoly::new(coeffs);
    for kappa in [ZERO, ONE, Complex64::new(0.3, 0.4), Complex64::new(0.6, -0.2)] {
        let direct = pencil(pair, kappa).determinant();
        if (direct - poly.eval(kappa)).norm() > 1e-8 * scale.max(direct.norm()) {
            return Err(QmarkError::Precision(format!(
                "interpolated determinant disagrees with direct evaluation at κ = {kappa}"
            )));
        }
    }
    Ok(poly)
}

/// Direct `det(I − κA − (1 − κ)B)`.
pub fn det_direct(pair: &TransformPair, kappa: Complex64) -> Complex64 {
    pencil(pair, kappa).determinant()
}

/// Refines a root of `P` against the matrices themselves with Newton steps
/// `κ ← κ − m·det/det'` on the direct determinant, keeping a step only when
/// `|det|` decreases.
pub fn polish_on_pencil(pair: &TransformPair, root: Root) -> Complex64 {
    let m = root.multiplicity as f64;
    let mut x = root.value;
    let mut fx = det_direct(pair, x).norm();
    for _ in 0..30 {
        let h = 1e-6 * x.norm().max(1.0);
        let d = (det_direct(pair, x + h) - det_direct(pair, x - h)) / (2.0 * h);
        let step = det_direct(pair, x) / d * m;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let y = x - step;
        let fy = det_direct(pair, y).norm();
        if fy >= fx {
            break;
        }
        x = y;
        fx = fy;
    }
    x
}

/// Slack on the domain boundary for numerically computed roots.
pub const ROOT_SLACK: f64 = 1e-9;

pub fn in_domain(kappa: Complex64) -> bool {
    in_domain_with_slack(kappa, ROOT_SLACK)
}

/// Domain test for a root known to within `slack`: roots that may lie on
/// `|κ| = 1` are left out, roots that may lie on `|1 − κ| = 1` are kept.
pub fn in_domain_with_slack(kappa: Complex64, slack: f64) -> bool {
    kappa.norm() < 1.0 - slack && (ONE - kappa).norm() <= 1.0 + slack
}

/// `p` without the leading coefficients the independent estimate `q` does
/// not reproduce to within a factor of ten.
pub fn supported_part(p: &CPoly, q: &CPoly) -> CPoly {
    let mut coeffs = p.coeffs().to_vec();
    while let Some(&top) = coeffs.last() {
        let other = q.coeffs().get(coeffs.len() - 1).copied().unwrap_or_default();
        if top.norm() > 10.0 * (top - other).norm() {
            break;
        }
        coeffs.pop();
    }
    CPoly::new(coeffs)
}

/// Relative coefficient accuracy assumed when none has been measured.
pub const POLY_NOISE: f64 = 1e-8;

/// Roots of `p` with `|κ| < 1` and `|1 − κ| ≤ 1`.
pub fn roots_in_d(p: &CPoly) -> Result<Vec<Root>> {
    roots_in_d_with_noise(p, POLY_NOISE)
}

pub fn roots_in_d_with_noise(p: &CPoly, noise: f64) -> Result<Vec<Root>> {
    Ok(p.roots_with_noise(noise)?.into_iter().filter(|r| in_domain(r.value)).collect())
}

/// A combination `Σ aᵢ uᵢ` of basis functions.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSolution {
    pub kappa: Complex64,
    pub coeffs: Vec<Complex64>,
    pub sigma_min: f64,
    pub basis: FunctionBasis,
}

impl KernelSolution {
    pub fn eval(&self, z: UpperHalfPoint) -> Result<Complex64> {
        Ok(self.basis.eval(z)?.iter().zip(&self.coeffs).map(|(u, a)| u * a).sum())
    }

    pub fn as_kappa_function(&self) -> KappaFunction {
        let this = self.clone();
        KappaFunction::new(Some(0), move |_, z| this.eval(UpperHalfPoint::new(z)?))
    }

    /// Largest residual of the mean-modular equation at `κ₀` over `points`,
    /// relative to `max(1, |f(z)|)`.
    pub fn lyg_residual(&self, points: &[UpperHalfPoint]) -> Result<f64> {
        let f = self.as_kappa_function();
        let ctx = SlashContext::new(self.basis.weight)?;
        let mut worst = 0.0f64;
        for &z in points {
            let res = residual_lyg(&f, self.kappa, ctx, z)?;
            worst = worst.max(res / self.eval(z)?.norm().max(1.0));
        }
        Ok(worst)
    }
}

/// Threshold on the smallest singular value for a kernel to count as
/// nontrivial.
pub const KERNEL_TOL: f64 = 1e-6;

/// Unit vector `a` with `aᵀ(I − κ₀A − (1 − κ₀)B) = 0`.
pub fn kernel_solution(pair: &TransformPair, kappa0: Complex64, basis: &FunctionBasis) -> Result<KernelSolution> {
    let l = pair.mat_a.nrows();
    if basis.len() != l {
        return config("basis size does not match the transform matrices");
    }
    let m = DMatrix::identity(l, l) - &pair.mat_a * kappa0 - &pair.mat_b * (ONE - kappa0);
    let svd = m.transpose().svd(false, true);
    let (idx, sigma_min) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &s)| if s < best.1 { (i, s) } else { best });
    if sigma_min > KERNEL_TOL {
        return Err(QmarkError::Inconsistency(format!(
            "κ = {kappa0} is not a root: smallest singular value {sigma_min:.3e}"
        )));
    }
    let v_t = svd.v_t.expect("requested V");
    let mut coeffs: Vec<Complex64> = v_t.row(idx).iter().map(|c| c.conj()).collect();
    // fix the phase so the largest entry is real and positive
    let pivot = coeffs
        .iter()
        .copied()
        .fold(ZERO, |best, c| if c.norm() > best.norm() { c } else { best });
    if !pivot.is_zero() {
        let phase = pivot.conj() / pivot.norm();
        for c in &mut coeffs {
            *c *= phase;
        }
    }
    Ok(KernelSolution {
        kappa: kappa0,
        coeffs,
        sigma_min,
        basis: basis.clone(),
    })
}

/// Everything the pipeline produces for one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SporadicReport {
    pub label: String,
    /// Functions before the independence reduction.
    pub size: usize,
    pub dimension: usize,
    pub fit_residual: f64,
    /// Largest entrywise difference of `A` and `B` fitted on a second,
    /// disjoint sample set.
    pub refit_gap: f64,
    /// Largest coefficient difference of `P` between the two fits, relative
    /// to its largest coefficient. Leading coefficients the refit does not
    /// reproduce are dropped.
    pub poly_noise: f64,
    pub poly: CPoly,
    pub roots: Vec<Root>,
    pub roots_in_d: Vec<Root>,
    /// `(κ₀, relative residual)` for every root in the domain.
    pub lyg_residuals: Vec<(Complex64, f64)>,
    pub solutions: Vec<KernelSolution>,
    pub pair: TransformPair,
    /// The independent functions the matrices act on.
    pub reduced: FunctionBasis,
}

/// Reduces `basis` to independent functions, fits `A` and `B`, builds `P`,
/// finds its roots, and checks the kernel function of every root in the
/// domain. A span that is not invariant is an inconsistency error.
pub fn run_pipeline(basis: &FunctionBasis, seed: usize) -> Result<SporadicReport> {
    let ctx = SlashContext::new(basis.weight)?;
    let probe = sample_points(3 * basis.len().max(4), seed);
    let reduced = independent_members(basis, &probe)?;
    let l = reduced.len();
    let n = 3 * l.max(2);
    let pair = fit_transform_pair(&reduced, ctx, &sample_points(n, seed + 1000))?;
    if pair.fit_residual > FIT_TOL {
        return Err(QmarkError::Inconsistency(format!(
            "span of '{}' is not invariant: fit residual {:.3e}",
            basis.label, pair.fit_residual
        )));
    }
    let refit = fit_transform_pair(&reduced, ctx, &sample_points(n, seed + 1000 + n))?;
    let gap = |x: &DMatrix<Complex64>, y: &DMatrix<Complex64>| (x - y).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let refit_gap = gap(&pair.mat_a, &refit.mat_a).max(gap(&pair.mat_b, &refit.mat_b));
    let raw = det_polynomial(&pair)?;
    let raw2 = det_polynomial(&refit)?;
    let poly_noise = raw.relative_distance(&raw2);
    let poly = supported_part(&raw, &raw2);
    let (roots, mut inside) = if poly.is_zero() {
        (Vec::new(), Vec::new())
    } else {
        let scale = (0..16)
            .map(|m| raw.eval(0.5 + 0.5 * Complex64::from_polar(1.0, PI * m as f64 / 8.0)).norm())
            .fold(0.0, f64::max);
        let pseudo_zero = |x: Complex64| raw.eval(x).norm() <= 10.0 * (raw.eval(x) - raw2.eval(x)).norm() + 1e-12 * scale;
        let roots = poly.roots_with(pseudo_zero)?;
        let other = supported_part(&raw2, &raw).roots_with(pseudo_zero)?;
        let inside = roots
            .iter()
            .copied()
            .filter(|r| {
                let moved = other.iter().map(|o| (o.value - r.value).norm()).fold(f64::INFINITY, f64::min);
                in_domain_with_slack(r.value, ROOT_SLACK.max(10.0 * moved))
            })
            .collect();
        (roots, inside)
    };
    let check = sample_points(6, seed + 5000);
    let mut lyg_residuals = Vec::new();
    let mut solutions = Vec::new();
    let mut roots = roots;
    for root in &mut inside {
        let polished = polish_on_pencil(&pair, *root);
        if let Some(r) = roots.iter_mut().find(|r| r.value == root.value) {
            r.value = polished;
        }
        root.value = polished;
        let sol = kernel_solution(&pair, root.value, &reduced)?;
        lyg_residuals.push((root.value, sol.lyg_residual(&check)?));
        solutions.push(sol);
    }
    Ok(SporadicReport {
        label: basis.label.clone(),
        size: basis.len(),
        dimension: l,
        fit_residual: pair.fit_residual,
        refit_gap,
        poly_noise,
        poly,
        roots,
        roots_in_d: inside,
        lyg_residuals,
        solutions,
        pair,
        reduced,
    })
}

/// One basis visited by [`search_target`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchEntry {
    pub label: String,
    pub outcome: std::result::Result<SporadicReport, String>,
    pub closest: Option<(Complex64, f64)>,
    /// Kernel solution taken at the target itself, when a root is near.
    pub at_target: Option<KernelSolution>,
    pub target_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSearch {
    pub target: Complex64,
    pub entries: Vec<SearchEntry>,
    pub found_in: Vec<String>,
}

/// Bases visited by the search: every orbit of both catalogs (dropping the
/// vanishing one) as fourth powers, and the smaller orbits also with pair
/// products.
pub fn search_space() -> Result<Vec<OrbitBasis>> {
    let mut out = Vec::new();
    for orbit in quarter_partition()?.into_iter().chain(sixth_partition()?) {
        if orbit.members.is_empty() {
            continue;
        }
        if orbit.members.len() <= 6 {
            out.push(orbit.clone().with_recipe(Recipe::PairProducts));
        }
        out.push(orbit);
    }
    Ok(out)
}

/// Runs the pipeline over [`search_space`] and reports how close any root
/// comes to `target`. The target counts as found in a basis when a root is
/// within [`TARGET_RADIUS`] and the kernel at the target solves the equation
/// to `1e−6`. A basis whose pipeline fails is listed with the error.
pub fn search_target(target: Complex64, seed: usize) -> Result<TargetSearch> {
    let mut entries = Vec::new();
    let mut found_in = Vec::new();
    let check = sample_points(6, seed + 5000);
    for basis in search_space()? {
        let outcome = run_pipeline(&basis.functions(), seed).map_err(|e| e.to_string());
        let mut entry = SearchEntry {
            label: basis.label.clone(),
            closest: None,
            at_target: None,
            target_residual: None,
            outcome,
        };
        if let Ok(report) = &entry.outcome {
            entry.closest = report
                .roots
                .iter()
                .map(|x| (x.value, (x.value - target).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            // multiple roots are only located to about the square root of the
            // coefficient noise, so confirm at the target itself
            if entry.closest.is_some_and(|c| c.1 < TARGET_RADIUS) {
                if let Ok(sol) = kernel_solution(&report.pair, target, &report.reduced) {
                    let res = sol.lyg_residual(&check)?;
                    if res < 1e-6 && in_domain(target) {
                        found_in.push(basis.label.clone());
                    }
                    entry.target_residual = Some(res);
                    entry.at_target = Some(sol);
                }
            }
        }
        entries.push(entry);
    }
    Ok(TargetSearch {
        target,
        entries,
        found_in,
    })
}

/// Roots this close to the target are checked with a kernel at the target.
pub const TARGET_RADIUS: f64 = 1e-3;
