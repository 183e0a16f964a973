//! Integer 2×2 matrices acting by Möbius transformations, and formal
//! linear combinations of them (elements of the group ring).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Integer matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1, 0, 0, 1);
    /// `z ↦ z + 1`.
    pub const T: Mat2 = Mat2::new(1, 1, 0, 1);
    /// `z ↦ z / (z + 1)`.
    pub const R: Mat2 = Mat2::new(1, 0, 1, 1);
    /// `z ↦ −1/z`.
    pub const S: Mat2 = Mat2::new(0, 1, -1, 0);
    /// Order-three element, `z ↦ 1/(1 − z)`.
    pub const U: Mat2 = Mat2::new(0, 1, -1, 1);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse of a unimodular matrix. Panics if `det ∉ {±1}`.
    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        assert!(det == 1 || det == -1, "matrix {self} is not unimodular");
        Mat2::new(self.d * det, -self.b * det, -self.c * det, self.a * det)
    }

    pub fn pow(&self, exp: i64) -> Mat2 {
        let base = if exp < 0 { self.inverse() } else { *self };
        let mut acc = Mat2::IDENTITY;
        for _ in 0..exp.unsigned_abs() {
            acc = acc * base;
        }
        acc
    }

    /// Equality in `PSL₂`, i.e. modulo `±I`.
    pub fn eq_projective(&self, other: &Mat2) -> bool {
        self == other || *self == -*other
    }

    /// Representative with the first nonzero entry of `(c, d)` positive.
    pub fn projective_normal(&self) -> Mat2 {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            -*self
        } else {
            *self
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.a >= 0 && self.b >= 0 && self.c >= 0 && self.d >= 0
    }

    /// Möbius action `(az + b)/(cz + d)`.
    pub fn act(&self, z: Complex64) -> Complex64 {
        (z * self.a as f64 + self.b as f64) / self.automorphy(z)
    }

    /// The factor `cz + d`.
    pub fn automorphy(&self, z: Complex64) -> Complex64 {
        z * self.c as f64 + self.d as f64
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A finite formal sum `Σ cᵢ γᵢ` of matrices with complex coefficients.
///
/// The slash action extends linearly, `f|(Σ cᵢγᵢ) = Σ cᵢ f|γᵢ`, and products
/// multiply out in order so that `f|(XY) = (f|X)|Y`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatSum {
    pub terms: Vec<(Complex64, Mat2)>,
}

impl MatSum {
    pub fn zero() -> Self {
        MatSum { terms: Vec::new() }
    }

    pub fn single(m: Mat2) -> Self {
        MatSum {
            terms: vec![(Complex64::new(1.0, 0.0), m)],
        }
    }

    pub fn identity() -> Self {
        Self::single(Mat2::IDENTITY)
    }

    /// Merges terms with projectively equal matrices. Only valid for even
    /// weights, where `−γ` and `γ` act identically.
    pub fn collect_projective(&self) -> MatSum {
        let mut out: Vec<(Complex64, Mat2)> = Vec::new();
        for &(c, m) in &self.terms {
            let key = m.projective_normal();
            match out.iter_mut().find(|(_, k)| *k == key) {
                Some(slot) => slot.0 += c,
                None => out.push((c, key)),
            }
        }
        out.retain(|(c, _)| c.norm() > 0.0);
        MatSum { terms: out }
    }
}

impl From<Mat2> for MatSum {
    fn from(m: Mat2) -> Self {
        MatSum::single(m)
    }
}

impl Add for MatSum {
    type Output = MatSum;
    fn add(mut self, o: MatSum) -> MatSum {
        self.terms.extend(o.terms);
        self
    }
}

impl Sub for MatSum {
    type Output = MatSum;
    fn sub(mut self, o: MatSum) -> MatSum {
        self.terms.extend(o.terms.into_iter().map(|(c, m)| (-c, m)));
        self
    }
}

impl Mul for MatSum {
    type Output = MatSum;
    fn mul(self, o: MatSum) -> MatSum {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for &(c1, m1) in &self.terms {
            for &(c2, m2) in &o.terms {
                terms.push((c1 * c2, m1 * m2));
            }
        }
        MatSum { terms }
    }
}

impl Mul<Complex64> for MatSum {
    type Output = MatSum;
    fn mul(mut self, s: Complex64) -> MatSum {
        for t in &mut self.terms {
            t.0 *= s;
        }
        self
    }
}
