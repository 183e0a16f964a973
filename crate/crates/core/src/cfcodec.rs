//! Regular and semi-regular continued fractions of numbers in `[0, 1]`, and
//! paths in the Calkin–Wilf tree.
//!
//! Regular: `x = 1/(a₁ + 1/(a₂ + …))` with `aᵢ ≥ 1`.
//! Semi-regular: `x = [[b₁, b₂, …]] = 1/(b₁ − 1/(b₂ − …))` with `bᵢ ≥ 2`.
//!
//! Rational inputs are expanded in exact arithmetic. Floating-point inputs go
//! through the Gauss map and stop once the remainder is within
//! [`FLOAT_STOP`] of zero.

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedDiv, CheckedSub, One, Zero};

use crate::error::{domain, QmarkError, Result};
use crate::matrix::Mat2;
use crate::Rational;

/// Remainders below this are treated as zero by the floating-point expansions.
pub const FLOAT_STOP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularCF {
    pub digits: Vec<i64>,
    /// `true` when the digit word represents the input exactly.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiRegularCF {
    pub digits: Vec<i64>,
    pub exact: bool,
}

/// Common evaluation of finite continued-fraction words.
pub trait ContinuedFraction {
    fn digits(&self) -> &[i64];

    /// Exact value of the finite word.
    fn eval(&self) -> Result<Rational>;
}

fn overflow() -> QmarkError {
    QmarkError::Precision("continued fraction value overflows 64-bit rationals".into())
}

impl ContinuedFraction for RegularCF {
    fn digits(&self) -> &[i64] {
        &self.digits
    }

    fn eval(&self) -> Result<Rational> {
        // x = 1/(a₁ + 1/(a₂ + … + 1/aₙ)), folded from the tail
        let (&last, rest) = self
            .digits
            .split_last()
            .ok_or_else(|| QmarkError::Domain("empty continued fraction word".into()))?;
        let mut tail = Rational::from_integer(last);
        for &a in rest.iter().rev() {
            let inv = Rational::one().checked_div(&tail).ok_or_else(overflow)?;
            tail = Rational::from_integer(a).checked_add(&inv).ok_or_else(overflow)?;
        }
        Rational::one().checked_div(&tail).ok_or_else(overflow)
    }
}

impl ContinuedFraction for SemiRegularCF {
    fn digits(&self) -> &[i64] {
        &self.digits
    }

    fn eval(&self) -> Result<Rational> {
        let (&last, rest) = self
            .digits
            .split_last()
            .ok_or_else(|| QmarkError::Domain("empty continued fraction word".into()))?;
        let mut tail = Rational::from_integer(last);
        for &b in rest.iter().rev() {
            let inv = Rational::one().checked_div(&tail).ok_or_else(overflow)?;
            tail = Rational::from_integer(b).checked_sub(&inv).ok_or_else(overflow)?;
        }
        Rational::one().checked_div(&tail).ok_or_else(overflow)
    }
}

/// Exact value of a finite continued-fraction word.
pub fn cf_eval<C: ContinuedFraction>(cf: &C) -> Result<Rational> {
    cf.eval()
}

fn check_unit_interval(x: Rational) -> Result<()> {
    if x < Rational::zero() || x > Rational::one() {
        return domain(format!("{x} lies outside [0, 1]"));
    }
    Ok(())
}

fn check_max_digits(max_digits: usize) -> Result<()> {
    if max_digits == 0 {
        return Err(QmarkError::Config("max_digits must be at least 1".into()));
    }
    Ok(())
}

/// Merges a trailing digit 1 into its predecessor, `[…, a, 1] → […, a + 1]`.
fn canonicalize_regular(digits: &mut Vec<i64>) {
    if digits.len() >= 2 && *digits.last().unwrap() == 1 {
        digits.pop();
        *digits.last_mut().unwrap() += 1;
    }
}

/// Regular continued fraction of a rational `x ∈ [0, 1]`.
///
/// `0` maps to the empty word and `1` to the one-digit word `[1]`; every
/// other terminating word ends in a digit `≥ 2`.
pub fn to_regular_cf(x: Rational, max_digits: usize) -> Result<RegularCF> {
    check_unit_interval(x)?;
    check_max_digits(max_digits)?;
    if x.is_zero() {
        return Ok(RegularCF { digits: vec![], exact: true });
    }
    let (mut p, mut q) = (*x.numer(), *x.denom());
    let mut digits = Vec::new();
    // x = p/q, 1/x = q/p = a + r/p
    while p != 0 && digits.len() < max_digits {
        let (a, r) = q.div_rem(&p);
        digits.push(a);
        q = p;
        p = r;
    }
    let exact = p == 0;
    if exact {
        canonicalize_regular(&mut digits);
    }
    Ok(RegularCF { digits, exact })
}

/// Regular continued fraction of a real `x ∈ [0, 1]` by the Gauss map.
pub fn to_regular_cf_f64(x: f64, max_digits: usize) -> Result<RegularCF> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("{x} lies outside [0, 1]"));
    }
    check_max_digits(max_digits)?;
    let mut digits = Vec::new();
    let mut r = x;
    let mut exact = r == 0.0;
    while !exact && digits.len() < max_digits {
        let inv = 1.0 / r;
        let a = inv.floor();
        let mut frac = inv - a;
        let mut a = a as i64;
        // 1/r just below an integer: the remainder is roundoff
        if 1.0 - frac < FLOAT_STOP * inv {
            a += 1;
            frac = 0.0;
        }
        digits.push(a.max(1));
        if frac < FLOAT_STOP {
            exact = true;
            break;
        }
        r = frac;
    }
    if exact {
        canonicalize_regular(&mut digits);
    }
    Ok(RegularCF { digits, exact })
}

/// Semi-regular continued fraction of a rational `x ∈ (0, 1]`.
///
/// Uses the backward map `x ↦ b − 1/x` with `b = ⌈1/x⌉`, which keeps the
/// remainder in `[0, 1)` and every digit `≥ 2`. The value `1` has only the
/// infinite expansion `[[2, 2, …]]`, returned truncated with `exact = false`.
pub fn to_semiregular_cf(x: Rational, max_digits: usize) -> Result<SemiRegularCF> {
    if x <= Rational::zero() || x > Rational::one() {
        return domain(format!("{x} lies outside (0, 1]"));
    }
    check_max_digits(max_digits)?;
    if x.is_one() {
        return Ok(SemiRegularCF {
            digits: vec![2; max_digits],
            exact: false,
        });
    }
    let (mut p, mut q) = (*x.numer(), *x.denom());
    let mut digits = Vec::new();
    // 1/x = q/p; b = ⌈q/p⌉, next remainder (b·p − q)/p
    while p != 0 && digits.len() < max_digits {
        let b = (q + p - 1) / p;
        digits.push(b);
        let r = b * p - q;
        q = p;
        p = r;
    }
    Ok(SemiRegularCF { digits, exact: p == 0 })
}

/// Semi-regular continued fraction of a real `x ∈ (0, 1]`.
pub fn to_semiregular_cf_f64(x: f64, max_digits: usize) -> Result<SemiRegularCF> {
    if !(x > 0.0 && x <= 1.0) {
        return domain(format!("{x} lies outside (0, 1]"));
    }
    check_max_digits(max_digits)?;
    if x == 1.0 {
        return Ok(SemiRegularCF {
            digits: vec![2; max_digits],
            exact: false,
        });
    }
    let mut digits = Vec::new();
    let mut r = x;
    let mut exact = false;
    while digits.len() < max_digits {
        let inv = 1.0 / r;
        let nearest = inv.round();
        if (inv - nearest).abs() < FLOAT_STOP * inv && nearest >= 2.0 {
            digits.push(nearest as i64);
            exact = true;
            break;
        }
        let b = inv.ceil().max(2.0);
        digits.push(b as i64);
        r = b - inv;
        if r < FLOAT_STOP {
            exact = true;
            break;
        }
        if r >= 1.0 {
            r = 1.0 - f64::EPSILON;
        }
    }
    Ok(SemiRegularCF { digits, exact })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CwLetter {
    /// `x ↦ x + 1`
    T,
    /// `x ↦ x / (x + 1)`
    R,
}

impl CwLetter {
    pub fn apply(self, x: Rational) -> Rational {
        match self {
            CwLetter::T => x + Rational::one(),
            CwLetter::R => x / (x + Rational::one()),
        }
    }

    pub fn matrix(self) -> Mat2 {
        match self {
            CwLetter::T => Mat2::T,
            CwLetter::R => Mat2::R,
        }
    }
}

/// Path from the root `1/1` of the Calkin–Wilf tree; letters are listed in
/// the order they are applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CWPath {
    pub word: Vec<CwLetter>,
    /// Number of `T` letters.
    pub iota: usize,
    /// Number of `R` letters.
    pub jota: usize,
}

impl CWPath {
    /// Applies the word to `1/1`.
    pub fn endpoint(&self) -> Rational {
        self.word
            .iter()
            .fold(Rational::one(), |x, letter| letter.apply(x))
    }
}

/// Calkin–Wilf path of a positive rational, by reverse Euclidean descent.
pub fn calkin_wilf_path(r: Rational) -> Result<CWPath> {
    if r <= Rational::zero() {
        return domain(format!("{r} is not a positive rational"));
    }
    let (mut p, mut q) = (*r.numer(), *r.denom());
    let mut reversed = Vec::new();
    while (p, q) != (1, 1) {
        if p > q {
            // undo a run of T: p/q ← (p − kq)/q
            let k = if q == 1 { p - 1 } else { p / q };
            reversed.extend(std::iter::repeat_n(CwLetter::T, k as usize));
            p -= k * q;
        } else {
            // undo a run of R: p/q ← p/(q − kp)
            let k = if p == 1 { q - 1 } else { q / p };
            reversed.extend(std::iter::repeat_n(CwLetter::R, k as usize));
            q -= k * p;
        }
    }
    reversed.reverse();
    let iota = reversed.iter().filter(|&&l| l == CwLetter::T).count();
    let jota = reversed.len() - iota;
    Ok(CWPath {
        word: reversed,
        iota,
        jota,
    })
}

/// A product of `T` and `R` matrices together with its letter counts.
///
/// For `M = [[a, b], [c, d]]` the Calkin–Wilf path of `(a + c)/(b + d)` has
/// `r_letters` steps `T` and `t_letters` steps `R`, since transposition swaps
/// the two generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CwMatrix {
    pub matrix: Mat2,
    pub t_letters: u32,
    pub r_letters: u32,
}

/// Iterator over all words of length `≤ depth` in `{T, R}`, depth first.
pub struct CwMatrices {
    stack: Vec<(CwMatrix, u32)>,
    depth: u32,
}

impl Iterator for CwMatrices {
    type Item = CwMatrix;

    fn next(&mut self) -> Option<CwMatrix> {
        let (node, level) = self.stack.pop()?;
        if level < self.depth {
            let m = node.matrix;
            self.stack.push((
                CwMatrix {
                    matrix: m * Mat2::R,
                    t_letters: node.t_letters,
                    r_letters: node.r_letters + 1,
                },
                level + 1,
            ));
            self.stack.push((
                CwMatrix {
                    matrix: m * Mat2::T,
                    t_letters: node.t_letters + 1,
                    r_letters: node.r_letters,
                },
                level + 1,
            ));
        }
        Some(node)
    }
}

/// All `2^(depth+1) − 1` products of at most `depth` letters from `{T, R}`.
///
/// These are exactly the nonnegative integer matrices of determinant one
/// whose word length is bounded by `depth`.
pub fn enumerate_cw_matrices(depth: u32) -> CwMatrices {
    CwMatrices {
        stack: vec![(
            CwMatrix {
                matrix: Mat2::IDENTITY,
                t_letters: 0,
                r_letters: 0,
            },
            0,
        )],
        depth,
    }
}
