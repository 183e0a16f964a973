//! The q-question-mark functions `μ_q`, Minkowski's `?(x)` and their
//! Laplace–Stieltjes transforms.
//!
//! `μ_q` is the unique continuous function on `[0, 1]` with `μ(0) = 0`,
//! `μ(1) = 1` and
//!
//! ```text
//! μ(1/(ℓ − x)) = q_ℓ μ(x) + Σ_{j>ℓ} q_j,   ℓ ≥ 2.
//! ```
//!
//! It is the limit of the iteration `μ₀(x) = x`,
//! `μ_{w+1}(x) = q_ℓ μ_w(ℓ − 1/x) + Σ_{j>ℓ} q_j` on `[1/ℓ, 1/(ℓ−1)]`. We evaluate
//! `μ_w(x)` pointwise by following the semi-regular digits of `x` and composing
//! the affine maps along the way, which costs `O(w)` per point.

use std::str::FromStr;

use num_complex::Complex64;

use crate::cfcodec::{SemiRegularCF, FLOAT_STOP};
use crate::complex_parse::parse_complex;
use crate::error::{config, domain, QmarkError, Result};
use crate::quadrature::QuadratureSpec;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Integer power that stays accurate for huge exponents.
pub(crate) fn cpow(base: Complex64, n: i64) -> Complex64 {
    if n == 0 {
        ONE
    } else if base == ZERO {
        ZERO
    } else if n.unsigned_abs() <= 64 {
        base.powi(n as i32)
    } else {
        (base.ln() * n as f64).exp()
    }
}

/// Coefficient sequence `q = (q₂, q₃, …)` of a q-question-mark function.
#[derive(Debug, Clone, PartialEq)]
pub enum QSequence {
    /// `q₂, …, q_L`; all later coefficients vanish.
    Finite { values: Vec<Complex64>, tails: Vec<Complex64> },
    /// `q_ℓ = (1 − κ) κ^(ℓ−2)`.
    Geometric { kappa: Complex64 },
}

impl QSequence {
    /// Finite sequence starting at `q₂`. The sum must be 1 to within `1e-12`
    /// and `sup |q_ℓ| < 1`.
    pub fn finite(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return config("finite q-sequence needs at least one coefficient");
        }
        let sum: Complex64 = values.iter().sum();
        if (sum - ONE).norm() > 1e-12 {
            return config(format!("q-sequence sums to {sum}, not 1"));
        }
        let delta = values.iter().map(|q| q.norm()).fold(0.0, f64::max);
        if delta >= 1.0 {
            return config(format!("sup |q_l| = {delta} is not below 1"));
        }
        // tails[i] = Σ_{j > i} values[j]
        let mut tails = vec![ZERO; values.len()];
        let mut acc = ZERO;
        for i in (0..values.len()).rev() {
            tails[i] = acc;
            acc += values[i];
        }
        Ok(QSequence::Finite { values, tails })
    }

    pub fn finite_real(values: &[f64]) -> Result<Self> {
        Self::finite(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Geometric sequence; requires `|κ| < 1` and `|1 − κ| < 1` so that the
    /// defining iteration contracts.
    pub fn geometric(kappa: Complex64) -> Result<Self> {
        if kappa.norm() >= 1.0 {
            return config(format!("|kappa| = {} must be below 1", kappa.norm()));
        }
        if (ONE - kappa).norm() >= 1.0 {
            return config(format!(
                "|1 - kappa| = {} must be below 1 for the measure construction",
                (ONE - kappa).norm()
            ));
        }
        Ok(QSequence::Geometric { kappa })
    }

    /// The coefficients of Minkowski's function, `q_ℓ = 2^(1−ℓ)`.
    pub fn minkowski() -> Self {
        QSequence::Geometric {
            kappa: Complex64::new(0.5, 0.0),
        }
    }

    /// `q_ℓ` for `ℓ ≥ 2`.
    pub fn q(&self, l: i64) -> Complex64 {
        match self {
            QSequence::Finite { values, .. } => {
                values.get((l - 2) as usize).copied().unwrap_or(ZERO)
            }
            QSequence::Geometric { kappa } => (ONE - kappa) * cpow(*kappa, l - 2),
        }
    }

    /// `Σ_{j>ℓ} q_j` for `ℓ ≥ 2`.
    pub fn tail(&self, l: i64) -> Complex64 {
        match self {
            QSequence::Finite { tails, .. } => tails.get((l - 2) as usize).copied().unwrap_or(ZERO),
            QSequence::Geometric { kappa } => cpow(*kappa, l - 1),
        }
    }

    /// `δ = sup_ℓ |q_ℓ|`.
    pub fn delta(&self) -> f64 {
        match self {
            QSequence::Finite { values, .. } => values.iter().map(|q| q.norm()).fold(0.0, f64::max),
            QSequence::Geometric { kappa } => (ONE - kappa).norm(),
        }
    }

    /// `Σ_ℓ |q_ℓ|`.
    pub fn abs_sum(&self) -> f64 {
        match self {
            QSequence::Finite { values, .. } => values.iter().map(|q| q.norm()).sum(),
            QSequence::Geometric { kappa } => (ONE - kappa).norm() / (1.0 - kappa.norm()),
        }
    }

    /// Bound on `sup |μ − μ₀|`: `(1 + Σ|q|)/(1 − δ)`.
    ///
    /// `1 + Σ|q|` bounds `sup |μ₁ − μ₀|` and each further iterate contracts by
    /// `δ`. The pointwise truncation error after `w` digits is at most this
    /// constant times the modulus of the accumulated product of `q`s, hence at
    /// most `contraction_constant() · δ^w`.
    pub fn contraction_constant(&self) -> f64 {
        (1.0 + self.abs_sum()) / (1.0 - self.delta())
    }

    /// Smallest unfolding depth whose a-priori bound is below `tol`.
    pub fn depth_for(&self, tol: f64) -> usize {
        let m = self.contraction_constant();
        let delta = self.delta();
        if delta == 0.0 {
            return 1;
        }
        ((tol / m).ln() / delta.ln()).ceil().max(1.0) as usize
    }

    pub fn is_real_nonnegative(&self) -> bool {
        match self {
            QSequence::Finite { values, .. } => values.iter().all(|q| q.im == 0.0 && q.re >= 0.0),
            QSequence::Geometric { kappa } => kappa.im == 0.0 && kappa.re >= 0.0,
        }
    }
}

impl FromStr for QSequence {
    type Err = QmarkError;

    /// `finite:2/3,1/3` (rationals, decimals or complex entries) or
    /// `kappa:0.5` (any complex literal).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("finite:") {
            let values = rest
                .split(',')
                .map(parse_coefficient)
                .collect::<Result<Vec<_>>>()?;
            QSequence::finite(values)
        } else if let Some(rest) = s.strip_prefix("kappa:") {
            QSequence::geometric(parse_complex(rest)?)
        } else {
            Err(QmarkError::Parse(format!(
                "q-spec '{s}' must start with 'finite:' or 'kappa:'"
            )))
        }
    }
}

fn parse_coefficient(item: &str) -> Result<Complex64> {
    let item = item.trim();
    if let Some((p, q)) = item.split_once('/') {
        let err = || QmarkError::Parse(format!("bad rational coefficient '{item}'"));
        let p: f64 = p.trim().parse::<i64>().map_err(|_| err())? as f64;
        let q: i64 = q.trim().parse::<i64>().map_err(|_| err())?;
        if q == 0 {
            return Err(err());
        }
        Ok(Complex64::new(p / q as f64, 0.0))
    } else {
        parse_complex(item)
    }
}

/// Value of `μ_q(x)` together with the bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuEvaluation {
    pub value: Complex64,
    /// Number of digits actually unfolded.
    pub depth_used: usize,
    pub error_bound: f64,
}

/// Evaluates the `depth`-th iterate `μ_depth(x)` of the defining recursion.
///
/// The unfolding stops early when the remainder hits zero (then every later
/// iterate agrees) or when the accumulated product of coefficients vanishes
/// (finite support); in both cases the reported bound only covers roundoff.
pub fn mu_eval(q: &QSequence, x: f64, depth: usize) -> Result<MuEvaluation> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("x = {x} lies outside [0, 1]"));
    }
    let exact = |value: Complex64, used: usize| MuEvaluation {
        value,
        depth_used: used,
        error_bound: 4.0 * f64::EPSILON * (1.0 + used as f64),
    };
    if x == 0.0 {
        return Ok(exact(ZERO, 0));
    }
    if x == 1.0 {
        return Ok(exact(ONE, 0));
    }
    let mut acc = ZERO;
    let mut weight = ONE;
    let mut r = x;
    for step in 0..depth {
        let inv = 1.0 / r;
        let nearest = inv.round();
        if nearest >= 2.0 && (inv - nearest).abs() < FLOAT_STOP * inv {
            // r = 1/ℓ: one more affine step lands on μ(0) = 0
            acc += weight * q.tail(nearest as i64);
            return Ok(exact(acc, step + 1));
        }
        let b = inv.ceil().max(2.0);
        let l = b as i64;
        acc += weight * q.tail(l);
        weight *= q.q(l);
        r = (b - inv).min(1.0);
        if weight == ZERO || r < FLOAT_STOP {
            return Ok(exact(acc, step + 1));
        }
    }
    Ok(MuEvaluation {
        value: acc + weight * r,
        depth_used: depth,
        error_bound: weight.norm() * q.contraction_constant(),
    })
}

/// Minkowski's `?(x)` from the regular continued fraction of `x`:
/// `?(x) = 2 Σ (−1)^(ℓ+1) 2^(−(a₁+…+a_ℓ))`, summed until the next term is
/// below `tol`.
pub fn question_mark(x: f64, tol: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("x = {x} lies outside [0, 1]"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut exponent: i64 = 0;
    let mut sign = 1.0;
    let mut r = x;
    loop {
        let inv = 1.0 / r;
        let mut a = inv.floor();
        let mut frac = inv - a;
        if 1.0 - frac < FLOAT_STOP * inv {
            a += 1.0;
            frac = 0.0;
        }
        exponent += a as i64;
        let term = pow2(1 - exponent);
        sum += sign * term;
        sign = -sign;
        if frac < FLOAT_STOP || term < tol {
            return Ok(sum);
        }
        r = frac;
    }
}

/// `?(x)` for a rational argument, using its exact regular expansion.
pub fn question_mark_rational(x: crate::Rational) -> Result<f64> {
    let cf = crate::cfcodec::to_regular_cf(x, 4096)?;
    let mut sum = 0.0;
    let mut exponent: i64 = 0;
    for (l, &a) in cf.digits.iter().enumerate() {
        exponent += a;
        let term = pow2(1 - exponent);
        sum += if l % 2 == 0 { term } else { -term };
        if exponent > 1100 {
            break;
        }
    }
    Ok(sum)
}

fn pow2(e: i64) -> f64 {
    if e < -1074 {
        0.0
    } else {
        2f64.powi(e as i32)
    }
}

/// `?([[b₁, b₂, …]]) = Σ_ℓ 2^(ℓ − (b₁+…+b_ℓ))` over the given (possibly
/// truncated) digit word.
pub fn question_mark_semiregular(cf: &SemiRegularCF) -> f64 {
    let mut sum = 0.0;
    let mut digit_sum: i64 = 0;
    for (l, &b) in cf.digits.iter().enumerate() {
        digit_sum += b;
        sum += pow2(l as i64 + 1 - digit_sum);
    }
    sum
}

/// Closed form of `μ_κ` on a semi-regular digit word:
/// `Σ_ℓ (1 − κ)^(ℓ−1) κ^(b₁+…+b_ℓ − 2ℓ + 1)`.
///
/// Defined on the closure of `{|κ| < 1, |1 − κ| ≤ 1}`.
pub fn mu_kappa_closed_form(kappa: Complex64, cf: &SemiRegularCF) -> Result<Complex64> {
    if kappa.norm() > 1.0 + 1e-12 || (ONE - kappa).norm() > 1.0 + 1e-12 {
        return domain(format!("kappa = {kappa} lies outside the closed domain"));
    }
    let mut sum = ZERO;
    let mut digit_sum: i64 = 0;
    let mut prefactor = ONE;
    for (l, &b) in cf.digits.iter().enumerate() {
        let l = l as i64 + 1;
        digit_sum += b;
        sum += prefactor * cpow(kappa, digit_sum - 2 * l + 1);
        prefactor *= ONE - kappa;
    }
    Ok(sum)
}

/// `μ_q` tabulated on a dyadic grid, for Riemann–Stieltjes sums.
#[derive(Debug, Clone)]
pub struct MuGrid {
    values: Vec<Complex64>,
    max_error: f64,
}

/// A Stieltjes integral with the difference between two partition levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesValue {
    pub value: Complex64,
    pub error_estimate: f64,
}

impl MuGrid {
    pub fn new(q: &QSequence, quad: &QuadratureSpec) -> Result<Self> {
        let n = quad.cells;
        let mut values = Vec::with_capacity(n + 1);
        let mut max_error: f64 = 0.0;
        for i in 0..=n {
            let e = mu_eval(q, i as f64 / n as f64, quad.depth)?;
            max_error = max_error.max(e.error_bound);
            values.push(e.value);
        }
        Ok(MuGrid { values, max_error })
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Midpoint sum `Σ f(mᵢ)(μ(xᵢ₊₁) − μ(xᵢ))` on the partition with
    /// `cells / stride` cells.
    fn midpoint_sum(&self, f: &impl Fn(f64) -> Complex64, stride: usize) -> Complex64 {
        let n = self.cells();
        let h = stride as f64 / n as f64;
        (0..n / stride)
            .map(|i| {
                let mid = (i as f64 + 0.5) * h;
                f(mid) * (self.values[(i + 1) * stride] - self.values[i * stride])
            })
            .sum()
    }

    /// `∫₀¹ f dμ` by midpoint sums on the full and the half-resolution
    /// partition with one Richardson step. The midpoint error against a
    /// singular measure has no clean power law, so the estimate adds the gap
    /// to the extrapolant one level down to the size of the correction and
    /// the accumulated truncation error of `μ`.
    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> StieltjesValue {
        let fine = self.midpoint_sum(&f, 1);
        let coarse = self.midpoint_sum(&f, 2);
        let coarser = self.midpoint_sum(&f, 4);
        let value = fine * 2.0 - coarse;
        let below = coarse * 2.0 - coarser;
        let sup_f = (0..=self.cells())
            .map(|i| f(i as f64 / self.cells() as f64).norm())
            .fold(0.0, f64::max);
        StieltjesValue {
            value,
            error_estimate: (fine - coarse).norm() + (value - below).norm() + 2.0 * sup_f * self.max_error,
        }
    }
}

/// `𝔪_q(s) = ∫₀¹ e^(xs) dμ_q(x)`.
pub fn laplace_transform(q: &QSequence, s: Complex64, quad: &QuadratureSpec) -> Result<StieltjesValue> {
    let grid = MuGrid::new(q, quad)?;
    Ok(grid.integrate(|x| (s * x).exp()))
}

/// `|𝔪_q(iσ)|` along a list of `σ`. Exploratory only: whether these decay is
/// open even for Minkowski's function.
pub fn salem_scan(q: &QSequence, sigmas: &[f64], quad: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    let grid = MuGrid::new(q, quad)?;
    Ok(sigmas
        .iter()
        .map(|&sigma| {
            let s = Complex64::new(0.0, sigma);
            (sigma, grid.integrate(|x| (s * x).exp()).value.norm())
        })
        .collect())
}

/// `p_q(s) = Σ_ℓ q_ℓ e^(−iℓs)`, summed in closed form for geometric `q`.
pub fn p_series(q: &QSequence, s: Complex64) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    match q {
        QSequence::Finite { values, .. } => Ok(values
            .iter()
            .enumerate()
            .map(|(idx, &ql)| ql * (-i * (idx as f64 + 2.0) * s).exp())
            .sum()),
        QSequence::Geometric { kappa } => {
            let ratio = kappa * (-i * s).exp();
            if ratio.norm() >= 1.0 {
                return domain(format!("|kappa e^(-is)| = {} ≥ 1, series diverges", ratio.norm()));
            }
            Ok((ONE - kappa) * (-i * 2.0 * s).exp() / (ONE - ratio))
        }
    }
}
