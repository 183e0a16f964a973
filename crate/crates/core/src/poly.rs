//! Dense complex polynomials and their roots by Aberth iteration.

use std::fmt;

use num_complex::Complex64;

use crate::error::{domain, QmarkError, Result};

/// Coefficients below this magnitude are trimmed from the top.
pub const TRIM: f64 = 1e-12;


/// Polynomial `Σ cᵢ κⁱ` with ascending coefficients. The zero polynomial has
/// no coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CPoly {
    coeffs: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

impl CPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() < TRIM) {
            coeffs.pop();
        }
        CPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        CPoly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `Π (κ − rᵢ)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        CPoly::new(coeffs)
    }

    /// Drops leading coefficients below `rel` times the largest one.
    pub fn truncate_relative(&self, rel: f64) -> CPoly {
        let biggest = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= rel * biggest) {
            coeffs.pop();
        }
        CPoly::new(coeffs)
    }

    /// Largest coefficient difference relative to the largest coefficient of
    /// `self`.
    pub fn relative_distance(&self, other: &CPoly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &CPoly, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        let diff = (0..n).map(|i| (get(self, i) - get(other, i)).norm()).fold(0.0, f64::max);
        let biggest = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if biggest == 0.0 { diff } else { diff / biggest }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> CPoly {
        CPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// All roots, by Aberth iteration to relative step size 1e-10, with
    /// coincident approximations merged and counted.
    pub fn roots(&self) -> Result<Vec<Root>> {
        self.roots_with_noise(1e-12)
    }

    /// As [`CPoly::roots`], for coefficients only known to relative accuracy
    /// `noise`. A root of multiplicity `m` splits into a ring of radius about
    /// `noise^(1/m)`; those are merged and refined.
    pub fn roots_with_noise(&self, noise: f64) -> Result<Vec<Root>> {
        let biggest = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let n = self.coeffs.len();
        self.roots_with(|x| {
            let size = (0..n).fold(0.0, |acc, _| acc * x.norm() + 1.0);
            self.eval(x).norm() <= noise * biggest * size
        })
    }

    /// As [`CPoly::roots`], merging two approximations when `pseudo_zero`
    /// holds along the segment between them, i.e. `p` there is
    /// indistinguishable from zero.
    pub fn roots_with(&self, pseudo_zero: impl Fn(Complex64) -> bool) -> Result<Vec<Root>> {
        let n = match self.degree() {
            None => return domain("the zero polynomial has no isolated roots"),
            Some(0) => return Ok(Vec::new()),
            Some(n) => n,
        };
        let lead = self.coeffs[n];
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let p = CPoly { coeffs: monic };
        let dp = p.derivative();
        // Cauchy bound for the initial circle
        let radius = 1.0 + p.coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|i| Complex64::from_polar(radius * 0.5, 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / n as f64 + 0.4))
            .collect();
        let mut converged = false;
        for _ in 0..2000 {
            let mut worst = 0.0f64;
            for i in 0..n {
                let pz = p.eval(z[i]);
                if pz.norm() == 0.0 {
                    continue;
                }
                let ratio = pz / dp.eval(z[i]);
                let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
                let step = ratio / (1.0 - ratio * repulsion);
                if !step.re.is_finite() || !step.im.is_finite() {
                    continue;
                }
                z[i] -= step;
                worst = worst.max(step.norm() / z[i].norm().max(1.0));
            }
            if worst < 1e-10 {
                converged = true;
                break;
            }
        }
        if !converged {
            // clusters of a multiple root converge only linearly; accept if
            // the residual is at rounding level
            let ok = z.iter().all(|&r| p.eval(r).norm() < 1e-9 * radius.powi(n as i32));
            if !ok {
                return Err(QmarkError::Precision(format!("root iteration for a degree-{n} polynomial did not converge")));
            }
        }
        let mut roots = cluster(z, pseudo_zero);
        for root in roots.iter_mut().filter(|r| r.multiplicity > 1) {
            root.value = polish(&p, *root);
        }
        Ok(roots)
    }
}

/// Union of approximations joined by a segment of pseudo-zeros (tested at
/// its quarter points).
fn cluster(z: Vec<Complex64>, pseudo_zero: impl Fn(Complex64) -> bool) -> Vec<Root> {
    let mut group: Vec<usize> = (0..z.len()).collect();
    fn find(g: &mut [usize], mut i: usize) -> usize {
        while g[i] != i {
            g[i] = g[g[i]];
            i = g[i];
        }
        i
    }
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let along = |t: f64| z[i] + (z[j] - z[i]) * t;
            if [0.25, 0.5, 0.75].iter().all(|&t| pseudo_zero(along(t))) {
                let (a, b) = (find(&mut group, i), find(&mut group, j));
                group[a.max(b)] = a.min(b);
            }
        }
    }
    let mut roots: Vec<(usize, Root)> = Vec::new();
    for i in 0..z.len() {
        let g = find(&mut group, i);
        match roots.iter_mut().find(|(h, _)| *h == g) {
            Some((_, r)) => {
                r.value += z[i];
                r.multiplicity += 1;
            }
            None => roots.push((g, Root { value: z[i], multiplicity: 1 })),
        }
    }
    let mut out: Vec<Root> = roots
        .into_iter()
        .map(|(_, r)| Root {
            value: r.value / r.multiplicity as f64,
            multiplicity: r.multiplicity,
        })
        .collect();
    out.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    out
}

/// A root of multiplicity `m` is a simple root of the `(m − 1)`-th
/// derivative; a few Newton steps there recover the accuracy lost to the
/// cluster.
fn polish(p: &CPoly, root: Root) -> Complex64 {
    let mut q = p.clone();
    for _ in 1..root.multiplicity {
        q = q.derivative();
    }
    let dq = q.derivative();
    let mut x = root.value;
    for _ in 0..8 {
        let step = q.eval(x) / dq.eval(x);
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        x -= step;
        if step.norm() < 1e-15 * x.norm().max(1.0) {
            break;
        }
    }
    // keep the cluster mean if Newton wandered off
    if (x - root.value).norm() < 1e-2 * root.value.norm().max(1.0) {
        x
    } else {
        root.value
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})·κ"),
                _ => format!("({c})·κ^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
