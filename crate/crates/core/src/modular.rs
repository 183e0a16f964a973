//! The quasi-modular Eisenstein series `G₂`, the classical `E₄`, `E₆`, and
//! theta constants with rational characteristics.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{config, domain, QmarkError, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point `z` with `Im z > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint(Complex64);

impl UpperHalfPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return domain(format!("z = {z} is not in the upper half plane"));
        }
        Ok(UpperHalfPoint(z))
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub tol: f64,
    pub max_terms: usize,
}

impl TruncationSpec {
    pub fn new(tol: f64, max_terms: usize) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return config(format!("truncation tol {tol} must lie in (0, 1)"));
        }
        if max_terms < 8 {
            return config(format!("max_terms {max_terms} must be at least 8"));
        }
        Ok(TruncationSpec { tol, max_terms })
    }
}

impl Default for TruncationSpec {
    fn default() -> Self {
        TruncationSpec {
            tol: 1e-15,
            max_terms: 100_000,
        }
    }
}

// ---------------------------------------------------------------------------
// divisor sums

const SIEVE_LIMIT: usize = 1 << 17;

struct DivisorSums {
    sigma1: Vec<u64>,
    sigma3: Vec<f64>,
    sigma5: Vec<f64>,
}

fn divisor_sums() -> &'static DivisorSums {
    static CACHE: OnceLock<DivisorSums> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut sigma1 = vec![0u64; SIEVE_LIMIT + 1];
        let mut sigma3 = vec![0f64; SIEVE_LIMIT + 1];
        let mut sigma5 = vec![0f64; SIEVE_LIMIT + 1];
        for d in 1..=SIEVE_LIMIT {
            let df = d as f64;
            let (d3, d5) = (df.powi(3), df.powi(5));
            for m in (d..=SIEVE_LIMIT).step_by(d) {
                sigma1[m] += d as u64;
                sigma3[m] += d3;
                sigma5[m] += d5;
            }
        }
        DivisorSums { sigma1, sigma3, sigma5 }
    })
}

/// `σ_p(n) = Σ_{d | n} d^p` for `p ∈ {1, 3, 5}`.
pub fn divisor_sigma(p: u32, n: usize) -> Result<f64> {
    if n == 0 {
        return domain("sigma(0) is undefined");
    }
    if n <= SIEVE_LIMIT {
        let s = divisor_sums();
        return match p {
            1 => Ok(s.sigma1[n] as f64),
            3 => Ok(s.sigma3[n]),
            5 => Ok(s.sigma5[n]),
            _ => config(format!("divisor sums are tabulated for p in {{1, 3, 5}}, not {p}")),
        };
    }
    let mut acc = 0.0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            acc += (d as f64).powi(p as i32);
            if d * d != n {
                acc += ((n / d) as f64).powi(p as i32);
            }
        }
        d += 1;
    }
    Ok(acc)
}

/// `Σ_{n ≥ 1} σ_p(n) qⁿ`, truncated once the tail bound
/// `Σ_{n > N} n^(p+1) |q|ⁿ` drops below `tol / scale`.
fn lambert(p: u32, z: UpperHalfPoint, trunc: &TruncationSpec, scale: f64) -> Result<Complex64> {
    let r = (-2.0 * PI * z.z().im).exp();
    let q = (2.0 * PI * I * z.z()).exp();
    let power = (p + 1) as i32;
    let mut n_max = 1usize;
    loop {
        let n1 = (n_max + 1) as f64;
        let rho = ((n1 + 1.0) / n1).powi(power) * r;
        if rho < 1.0 {
            let tail = n1.powi(power) * r.powf(n1) / (1.0 - rho);
            if tail * scale < trunc.tol {
                break;
            }
        }
        n_max += 1;
        if n_max > trunc.max_terms {
            return Err(QmarkError::Precision(format!(
                "q-series at z = {} needs more than {} terms",
                z.z(),
                trunc.max_terms
            )));
        }
    }
    // Horner in q keeps the rounding error proportional to the largest term
    let mut acc = Complex64::new(0.0, 0.0);
    for n in (1..=n_max).rev() {
        acc = (acc + divisor_sigma(p, n)?) * q;
    }
    Ok(acc)
}

/// `G₂(z) = π²/3 − 8π² Σ σ₁(n) e^{2πinz}`.
pub fn eisenstein_g2(z: UpperHalfPoint, trunc: &TruncationSpec) -> Result<Complex64> {
    let scale = 8.0 * PI * PI;
    Ok(PI * PI / 3.0 - lambert(1, z, trunc, scale)? * scale)
}

/// `E₄(z) = 1 + 240 Σ σ₃(n) qⁿ`, modular of weight 4 for the full group.
pub fn eisenstein_e4(z: UpperHalfPoint, trunc: &TruncationSpec) -> Result<Complex64> {
    Ok(1.0 + lambert(3, z, trunc, 240.0)? * 240.0)
}

/// `E₆(z) = 1 − 504 Σ σ₅(n) qⁿ`.
pub fn eisenstein_e6(z: UpperHalfPoint, trunc: &TruncationSpec) -> Result<Complex64> {
    Ok(1.0 - lambert(5, z, trunc, 504.0)? * 504.0)
}

/// `|G₂(−1/z) − z²G₂(z) + 2πiz|`.
pub fn residual_quasimodular(z: UpperHalfPoint) -> Result<f64> {
    let trunc = TruncationSpec::default();
    let w = z.z();
    let inv = UpperHalfPoint::new(-1.0 / w)?;
    let lhs = eisenstein_g2(inv, &trunc)?;
    let rhs = w * w * eisenstein_g2(z, &trunc)? - 2.0 * PI * I * w;
    Ok((lhs - rhs).norm())
}

// ---------------------------------------------------------------------------
// theta constants

/// Characteristic `(a, b)` and level `k` of `ϑ(a, b; z)_k`.
///
/// Stored as given: shifting `b` changes the function by a phase (rule 2), so
/// reduction is explicit, see [`ThetaChar::reduced`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThetaChar {
    pub a: Rational64,
    pub b: Rational64,
    pub k: u32,
}

impl ThetaChar {
    pub fn new(a: Rational64, b: Rational64, k: u32) -> Result<Self> {
        if k == 0 {
            return config("theta level k must be positive");
        }
        Ok(ThetaChar { a, b, k })
    }

    pub fn level_one(a: Rational64, b: Rational64) -> Self {
        ThetaChar { a, b, k: 1 }
    }

    /// Reduces `a` mod 1 (rule 1, no phase) and then `b` mod `1/k` (rule 2),
    /// returning the reduced characteristic and the phase `φ` with
    /// `ϑ(self) = φ · ϑ(reduced)`. The same phase applies to `ϑ′`.
    pub fn reduced(&self) -> (ThetaChar, Complex64) {
        let a = self.a - self.a.floor();
        let step = Rational64::new(1, self.k as i64);
        let shifts = (self.b / step).floor();
        let b = self.b - shifts * step;
        // ϑ(a, b + m/k) = e^{2πiam} ϑ(a, b)
        let phase = cis(2.0 * PI * ratf(a * shifts));
        (ThetaChar { a, b, k: self.k }, phase)
    }

    fn af(&self) -> f64 {
        ratf(self.a)
    }

    fn bf(&self) -> f64 {
        ratf(self.b)
    }
}

fn ratf(r: Rational64) -> f64 {
    r.to_f64().expect("rational fits in f64")
}

fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Range of `n` with `|a + n| ≤ m_max`, where the Gaussian tail beyond
/// `m_max` (weighted by `(1 + weight·|m|)`) is below `tol·e^{-5}`.
fn theta_range(ch: &ThetaChar, z: UpperHalfPoint, trunc: &TruncationSpec, weight: f64) -> Result<(i64, i64)> {
    let decay = ch.k as f64 * PI * z.z().im;
    let target = -trunc.tol.ln() + 5.0;
    let mut m = 1.0f64;
    while decay * m * m < target + (1.0 + weight * (m + 1.0)).ln() {
        m += 1.0;
    }
    let a = ch.af();
    let lo = (-m - a).ceil() as i64;
    let hi = (m - a).floor() as i64;
    if (hi - lo + 1) as usize > trunc.max_terms {
        return Err(QmarkError::Precision(format!(
            "theta series at z = {} needs more than {} terms",
            z.z(),
            trunc.max_terms
        )));
    }
    Ok((lo, hi))
}

/// Sums `Σ c(m) e^{kπi[m²z + 2bm]}` over `m = a + n`, symmetric in `n`.
fn theta_sum(ch: &ThetaChar, z: UpperHalfPoint, trunc: &TruncationSpec, derivative: bool) -> Result<Complex64> {
    let kf = ch.k as f64;
    let weight = if derivative { 2.0 * kf * PI } else { 0.0 };
    let (lo, hi) = theta_range(ch, z, trunc, weight)?;
    let (a, b) = (ch.af(), ch.bf());
    let zz = z.z();
    let term = |n: i64| {
        let m = a + n as f64;
        let e = (I * (kf * PI) * (zz * (m * m) + 2.0 * b * m)).exp();
        if derivative {
            e * m
        } else {
            e
        }
    };
    // smallest |m| first
    let centre = (-a).round() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    let span = (centre - lo).max(hi - centre);
    for j in (0..=span).rev() {
        for n in if j == 0 { vec![centre] } else { vec![centre - j, centre + j] } {
            if (lo..=hi).contains(&n) {
                acc += term(n);
            }
        }
    }
    Ok(if derivative { acc * (2.0 * kf * PI) * I } else { acc })
}

/// `ϑ(a, b; z)_k = Σ_n e^{kπi[(a+n)²z + 2b(a+n)]}`.
pub fn theta(ch: &ThetaChar, z: UpperHalfPoint, trunc: &TruncationSpec) -> Result<Complex64> {
    theta_sum(ch, z, trunc, false)
}

/// `ϑ(a, b; z)′_k = 2kπi Σ_n (a+n) e^{kπi[(a+n)²z + 2b(a+n)]}`.
pub fn theta_prime(ch: &ThetaChar, z: UpperHalfPoint, trunc: &TruncationSpec) -> Result<Complex64> {
    theta_sum(ch, z, trunc, true)
}

/// The transformation rules of `ϑ` and `ϑ′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prop5Rule {
    /// `ϑ(a+1, b) = ϑ(a, b)`
    R1,
    R1Prime,
    /// `ϑ(a, b + 1/k) = e^{2πia} ϑ(a, b)`
    R2,
    R2Prime,
    /// `ϑ(a, b; z+1) = e^{−kπi(a²+a)} ϑ(a, b+a+1/2; z)`
    R3,
    R3Prime,
    /// `ϑ(−a, −b) = ϑ(a, b)`
    R4,
    /// `ϑ′(−a, −b) = −ϑ′(a, b)`
    R4Prime,
    /// inversion `z ↦ −1/z`
    R5,
    R5Prime,
}

impl Prop5Rule {
    pub const ALL: [Prop5Rule; 10] = [
        Prop5Rule::R1,
        Prop5Rule::R1Prime,
        Prop5Rule::R2,
        Prop5Rule::R2Prime,
        Prop5Rule::R3,
        Prop5Rule::R3Prime,
        Prop5Rule::R4,
        Prop5Rule::R4Prime,
        Prop5Rule::R5,
        Prop5Rule::R5Prime,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Prop5Rule::R1 => "1",
            Prop5Rule::R1Prime => "1'",
            Prop5Rule::R2 => "2",
            Prop5Rule::R2Prime => "2'",
            Prop5Rule::R3 => "3",
            Prop5Rule::R3Prime => "3'",
            Prop5Rule::R4 => "4",
            Prop5Rule::R4Prime => "4'",
            Prop5Rule::R5 => "5",
            Prop5Rule::R5Prime => "5'",
        }
    }

    pub fn is_prime(&self) -> bool {
        matches!(
            self,
            Prop5Rule::R1Prime | Prop5Rule::R2Prime | Prop5Rule::R3Prime | Prop5Rule::R4Prime | Prop5Rule::R5Prime
        )
    }
}

impl std::str::FromStr for Prop5Rule {
    type Err = QmarkError;
    fn from_str(s: &str) -> Result<Self> {
        Prop5Rule::ALL
            .into_iter()
            .find(|r| r.label() == s.trim())
            .ok_or_else(|| QmarkError::Parse(format!("unknown rule '{s}', expected 1..5 or 1'..5'")))
    }
}

/// Absolute residual of one transformation rule at `(ch, z)`.
pub fn residual_prop5(rule: Prop5Rule, ch: &ThetaChar, z: UpperHalfPoint) -> Result<f64> {
    let trunc = TruncationSpec::default();
    let prime = rule.is_prime();
    let f = |c: &ThetaChar, w: UpperHalfPoint| {
        if prime {
            theta_prime(c, w, &trunc)
        } else {
            theta(c, w, &trunc)
        }
    };
    let (a, b, k) = (ch.a, ch.b, ch.k);
    let kf = k as f64;
    let lhs_rhs: (Complex64, Complex64) = match rule {
        Prop5Rule::R1 | Prop5Rule::R1Prime => (f(&ThetaChar { a: a + 1, ..*ch }, z)?, f(ch, z)?),
        Prop5Rule::R2 | Prop5Rule::R2Prime => {
            let shifted = ThetaChar {
                b: b + Rational64::new(1, k as i64),
                ..*ch
            };
            (f(&shifted, z)?, cis(2.0 * PI * ratf(a)) * f(ch, z)?)
        }
        Prop5Rule::R3 | Prop5Rule::R3Prime => {
            let moved = UpperHalfPoint::new(z.z() + 1.0)?;
            let half = Rational64::new(1, 2);
            let target = ThetaChar { b: b + a + half, ..*ch };
            let af = ratf(a);
            (f(ch, moved)?, cis(-kf * PI * (af * af + af)) * f(&target, z)?)
        }
        Prop5Rule::R4 => (f(&ThetaChar { a: -a, b: -b, k }, z)?, f(ch, z)?),
        Prop5Rule::R4Prime => (f(&ThetaChar { a: -a, b: -b, k }, z)?, -f(ch, z)?),
        Prop5Rule::R5 | Prop5Rule::R5Prime => {
            let inv = UpperHalfPoint::new(-1.0 / z.z())?;
            let mut sum = Complex64::new(0.0, 0.0);
            for s in 0..k as i64 {
                let c = ThetaChar {
                    a: b + Rational64::new(s, k as i64),
                    b: -a,
                    k,
                };
                sum += f(&c, z)?;
            }
            let root = (-I * z.z()).sqrt();
            let factor = if prime { I * root * root * root } else { root };
            let phase = cis(2.0 * kf * PI * ratf(a * b));
            (f(ch, inv)?, factor * phase * sum / kf.sqrt())
        }
    };
    Ok((lhs_rhs.0 - lhs_rhs.1).norm())
}

/// `|ϑ⁴(0,0;z) − ϑ⁴(1/2,0;z) − ϑ⁴(0,1/2;z)|`.
pub fn residual_jacobi(z: UpperHalfPoint) -> Result<f64> {
    let trunc = TruncationSpec::default();
    let (zero, half) = (Rational64::zero(), Rational64::new(1, 2));
    let t = |a, b| theta(&ThetaChar::level_one(a, b), z, &trunc).map(|v| v.powu(4));
    Ok((t(zero, zero)? - t(half, zero)? - t(zero, half)?).norm())
}

/// `|ϑ(a,b;z)_k − ϑ(a,kb;kz)₁|`.
pub fn residual_level_reduction(ch: &ThetaChar, z: UpperHalfPoint) -> Result<f64> {
    let trunc = TruncationSpec::default();
    let kz = UpperHalfPoint::new(z.z() * ch.k as f64)?;
    let lifted = ThetaChar::level_one(ch.a, ch.b * Rational64::from_integer(ch.k as i64));
    Ok((theta(ch, z, &trunc)? - theta(&lifted, kz, &trunc)?).norm())
}

/// Parses `"a,b"` or `"a,b,k"` with rational entries such as `1/4`.
pub fn parse_theta_char(s: &str) -> Result<ThetaChar> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let rat = |t: &str| -> Result<Rational64> {
        let r: std::result::Result<Rational64, _> = t.parse();
        r.or_else(|_| t.parse::<i64>().map(Rational64::from_integer))
            .map_err(|_| QmarkError::Parse(format!("'{t}' is not a rational number")))
    };
    match parts.as_slice() {
        [a, b] => Ok(ThetaChar::level_one(rat(a)?, rat(b)?)),
        [a, b, k] => {
            let k: u32 = k
                .parse()
                .map_err(|_| QmarkError::Parse(format!("'{k}' is not a positive level")))?;
            ThetaChar::new(rat(a)?, rat(b)?, k)
        }
        _ => Err(QmarkError::Parse(format!("expected 'a,b' or 'a,b,k', got '{s}'"))),
    }
}

/// True when `ϑ(a, b; ·)_k` vanishes identically: `a ≡ 1/2` and `kb ≡ 1/2` mod 1.
pub fn is_odd_characteristic(ch: &ThetaChar) -> bool {
    let half = Rational64::new(1, 2);
    let kb = ch.b * Rational64::from_integer(ch.k as i64);
    (ch.a - half).is_integer() && (kb - half).is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    fn h(re: f64, im: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn g2_values() {
        let t = TruncationSpec::default();
        assert!((eisenstein_g2(h(0.0, 1.0), &t).unwrap() - PI).norm() < 1e-12);
        assert!((eisenstein_g2(h(1.0, 1.0), &t).unwrap() - PI).norm() < 1e-12);
        assert!((eisenstein_g2(h(0.2, 30.0), &t).unwrap() - PI * PI / 3.0).norm() < 1e-12);
    }

    #[test]
    fn sigma_matches_trial_division() {
        for n in [1usize, 2, 12, 97, 360, 4096] {
            let brute: u64 = (1..=n).filter(|d| n % d == 0).map(|d| d as u64).sum();
            assert_eq!(divisor_sigma(1, n).unwrap(), brute as f64);
        }
        assert_eq!(divisor_sigma(3, 6).unwrap(), 1.0 + 8.0 + 27.0 + 216.0);
        assert!(divisor_sigma(2, 6).is_err());
    }

    #[test]
    fn e4_e6_are_modular() {
        let t = TruncationSpec::default();
        for z in [h(0.1, 0.9), h(-0.3, 1.2), h(0.45, 0.6)] {
            let w = z.z();
            let inv = UpperHalfPoint::new(-1.0 / w).unwrap();
            let e4 = eisenstein_e4(inv, &t).unwrap() - w.powu(4) * eisenstein_e4(z, &t).unwrap();
            let e6 = eisenstein_e6(inv, &t).unwrap() - w.powu(6) * eisenstein_e6(z, &t).unwrap();
            assert!(e4.norm() < 1e-9, "{e4}");
            assert!(e6.norm() < 1e-8, "{e6}");
        }
        // E₆(i) = 0
        assert!(eisenstein_e6(h(0.0, 1.0), &t).unwrap().norm() < 1e-12);
    }

    #[test]
    fn quasimodular_residuals() {
        for z in [h(0.0, 1.0), h(0.0, 2.0), h(-0.5, 0.5), h(0.3, 0.7), h(2.0, 0.5)] {
            assert!(residual_quasimodular(z).unwrap() < 1e-9, "{:?}", z);
        }
    }

    #[test]
    fn theta_null_values() {
        let t = TruncationSpec::default();
        let v = theta(&ThetaChar::level_one(r(0, 1), r(0, 1)), h(0.0, 1.0), &t).unwrap();
        // π^{1/4} / Γ(3/4)
        assert!((v.re - 1.086_434_811_213_308).abs() < 1e-14 && v.im.abs() < 1e-15);
        let odd = ThetaChar::level_one(r(1, 2), r(1, 2));
        assert!(theta(&odd, h(0.3, 0.8), &t).unwrap().norm() < 1e-12);
        assert!(theta_prime(&odd, h(0.0, 1.0), &t).unwrap().norm() > 0.1);
        let even = ThetaChar::level_one(r(0, 1), r(0, 1));
        assert!(theta_prime(&even, h(0.2, 1.0), &t).unwrap().norm() < 1e-14);
    }

    #[test]
    fn named_rule_examples() {
        let i = h(0.0, 1.0);
        let quarter = ThetaChar::level_one(r(1, 4), r(0, 1));
        assert!(residual_prop5(Prop5Rule::R1, &quarter, i).unwrap() < 1e-12);
        assert!(residual_prop5(Prop5Rule::R3, &quarter, i).unwrap() < 1e-9);
        assert!(residual_prop5(Prop5Rule::R4Prime, &quarter, i).unwrap() < 1e-9);
        let ch = ThetaChar::level_one(r(0, 1), r(1, 2));
        assert!(residual_prop5(Prop5Rule::R5, &ch, i).unwrap() < 1e-9);
    }

    #[test]
    fn all_rules_at_level_two_and_three() {
        for (a, b, k) in [(r(1, 3), r(1, 6), 2), (r(-2, 5), r(3, 4), 3), (r(1, 2), r(0, 1), 2)] {
            let ch = ThetaChar::new(a, b, k).unwrap();
            for rule in Prop5Rule::ALL {
                let res = residual_prop5(rule, &ch, h(0.25, 0.75)).unwrap();
                assert!(res < 1e-9, "rule {} at {:?}: {res:e}", rule.label(), ch);
            }
        }
    }

    #[test]
    fn reduction_phase_is_consistent() {
        let t = TruncationSpec::default();
        let z = h(0.1, 0.9);
        let ch = ThetaChar::new(r(7, 4), r(-5, 3), 2).unwrap();
        let (red, phase) = ch.reduced();
        assert!(red.a >= r(0, 1) && red.a < r(1, 1));
        assert!(red.b >= r(0, 1) && red.b < r(1, 2));
        let diff = theta(&ch, z, &t).unwrap() - phase * theta(&red, z, &t).unwrap();
        assert!(diff.norm() < 1e-12);
    }

    #[test]
    fn jacobi_identity() {
        for z in [h(0.0, 1.0), h(0.3, 0.6), h(-0.4, 1.5)] {
            assert!(residual_jacobi(z).unwrap() < 1e-10);
        }
    }

    #[test]
    fn parses_characteristics() {
        assert_eq!(parse_theta_char("1/4, 0").unwrap(), ThetaChar::level_one(r(1, 4), r(0, 1)));
        assert_eq!(parse_theta_char("1/2,1/3,3").unwrap().k, 3);
        assert!(parse_theta_char("x,1").is_err());
        assert!(parse_theta_char("1,2,0").is_err());
    }

    #[test]
    fn odd_characteristics() {
        assert!(is_odd_characteristic(&ThetaChar::level_one(r(1, 2), r(-1, 2))));
        assert!(is_odd_characteristic(&ThetaChar::new(r(3, 2), r(1, 4), 2).unwrap()));
        assert!(!is_odd_characteristic(&ThetaChar::level_one(r(1, 2), r(0, 1))));
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(UpperHalfPoint::new(Complex64::new(0.0, 0.0)).is_err());
        assert!(UpperHalfPoint::new(Complex64::new(1.0, -1.0)).is_err());
        assert!(TruncationSpec::new(1.0, 10).is_err());
        assert!(TruncationSpec::new(1e-10, 4).is_err());
    }
}
