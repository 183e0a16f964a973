//! The Stieltjes transform `G(κ, z) = ∫₀¹ x/(1 − xz) dμ_κ(x)` and its
//! three-term functional equations.
//!
//! Two independent evaluation routes are provided:
//!
//! * [`g_series`] sums over the nonnegative determinant-one matrices
//!   `[[a, b], [c, d]]` (the Calkin–Wilf monoid generated by `T` and `R`):
//!
//!   ```text
//!   G(κ, w + 1) = (1 − κ) Σ κ^t (1 − κ)^r / [((a + c)w − (b + d))(cw − d)]
//!   ```
//!
//!   where `t` and `r` count the `T` and `R` letters of the matrix word.
//! * [`g_stieltjes`] integrates against `μ_κ` with Riemann–Stieltjes sums.
//!
//! The endpoints `κ = 0` and `κ = 1` are handled by their closed forms
//! `G(0, z) = 1/(1 − z)` and `G(1, z) = 0`.

use num_complex::Complex64;

use crate::error::{config, domain, Result};
use crate::measures::{MuGrid, QSequence};
use crate::quadrature::QuadratureSpec;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Distance below which `z` counts as lying on the cut `[1, ∞)`.
pub const CUT_MARGIN: f64 = 1e-9;

/// Default depth of the tree series.
pub const DEFAULT_SERIES_DEPTH: u32 = 24;

/// Relative size below which whole subtrees of the series are dropped.
const PRUNE_TOL: f64 = 1e-16;

/// A parameter `κ` with `|κ| < 1` and `|1 − κ| ≤ 1`, or the limiting endpoint
/// `κ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainD {
    kappa: Complex64,
}

impl DomainD {
    pub fn new(kappa: Complex64) -> Result<Self> {
        if kappa.norm() >= 1.0 || (ONE - kappa).norm() > 1.0 + 1e-12 {
            return domain(format!("kappa = {kappa} is outside {{|k| < 1, |1 - k| <= 1}}"));
        }
        Ok(DomainD { kappa })
    }

    pub fn real(kappa: f64) -> Result<Self> {
        Self::new(Complex64::new(kappa, 0.0))
    }

    /// The endpoint `κ = 1`, where `μ_κ` degenerates and `G ≡ 0`.
    pub fn limit_one() -> Self {
        DomainD { kappa: ONE }
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    fn endpoint(&self) -> Option<Complex64> {
        if self.kappa == ZERO {
            Some(ZERO)
        } else if self.kappa == ONE {
            Some(ONE)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GMethod {
    Series { depth: u32 },
    Stieltjes { cells: usize },
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GEvaluation {
    pub value: Complex64,
    pub method: GMethod,
    pub residual_estimate: f64,
}

/// Rejects `z` on (or within [`CUT_MARGIN`] of) the ray `[1, ∞)`.
pub fn check_off_cut(z: Complex64) -> Result<()> {
    let dist = if z.re >= 1.0 { z.im.abs() } else { (z - ONE).norm() };
    if dist < CUT_MARGIN || !z.re.is_finite() || !z.im.is_finite() {
        return domain(format!("z = {z} lies on the cut [1, inf)"));
    }
    Ok(())
}

fn closed_form(endpoint: Complex64, z: Complex64) -> GEvaluation {
    let value = if endpoint == ZERO { ONE / (ONE - z) } else { ZERO };
    GEvaluation {
        value,
        method: GMethod::ClosedForm,
        residual_estimate: 0.0,
    }
}

/// `G(κ, z)` by Riemann–Stieltjes sums against `μ_κ`.
///
/// Needs `|1 − κ| < 1` away from the endpoints, since the measure is built
/// by a contraction with rate `|1 − κ|`.
pub fn g_stieltjes(kappa: &DomainD, z: Complex64, quad: &QuadratureSpec) -> Result<GEvaluation> {
    check_off_cut(z)?;
    if let Some(e) = kappa.endpoint() {
        return Ok(closed_form(e, z));
    }
    let q = QSequence::geometric(kappa.kappa())?;
    let grid = MuGrid::new(&q, quad)?;
    Ok(stieltjes_on_grid(&grid, z))
}

/// `G(κ, z)` from a precomputed grid of `μ_κ`.
pub fn stieltjes_on_grid(grid: &MuGrid, z: Complex64) -> GEvaluation {
    let v = grid.integrate(|x| Complex64::new(x, 0.0) / (ONE - z * x));
    GEvaluation {
        value: v.value,
        method: GMethod::Stieltjes { cells: grid.cells() },
        residual_estimate: v.error_estimate,
    }
}

/// `G(κ, z)` by the Calkin–Wilf tree series truncated at word length `depth`.
///
/// The residual estimate extrapolates the absolute size of the last two
/// levels geometrically, doubled because the level ratio is still creeping
/// up at practical depths, and adds the bound on every pruned subtree.
pub fn g_series(kappa: &DomainD, z: Complex64, depth: u32) -> Result<GEvaluation> {
    check_off_cut(z)?;
    if depth > 40 {
        return config(format!("series depth {depth} exceeds 40"));
    }
    if let Some(e) = kappa.endpoint() {
        return Ok(closed_form(e, z));
    }
    let k = kappa.kappa();
    let sum = tree_sum(k, z - ONE, depth);
    let last = sum.level_abs[depth as usize];
    let tail = if depth == 0 {
        last
    } else {
        let prev = sum.level_abs[depth as usize - 1];
        let ratio = if prev > 0.0 { last / prev } else { 0.0 };
        if ratio < 0.95 {
            2.0 * last * ratio / (1.0 - ratio)
        } else {
            last * 20.0
        }
    };
    let scale = (ONE - k).norm();
    Ok(GEvaluation {
        value: sum.value * (ONE - k),
        method: GMethod::Series { depth },
        residual_estimate: scale * (tail + sum.pruned_bound) + 1e-15 * sum.value.norm(),
    })
}

struct TreeSum {
    value: Complex64,
    level_abs: Vec<f64>,
    pruned_bound: f64,
}

/// Level at which the tree is cut into independent subtrees. Fixed, so the
/// reduction order (and hence every bit of the result) does not depend on
/// the number of worker threads.
const SPLIT_LEVEL: u32 = 4;

type Node = (f64, f64, f64, f64, Complex64, u32);

/// Sum of `Σ κ^t (1−κ)^r / [((a+c)w − (b+d))(cw − d)]` over words of length
/// `≤ depth`.
fn tree_sum(kappa: Complex64, w: Complex64, depth: u32) -> TreeSum {
    let root: Node = (1.0, 0.0, 0.0, 1.0, ONE, 0);
    let split = SPLIT_LEVEL.min(depth);
    // nodes above the split level are summed here, the rest per subtree
    let mut head = TreeSum::empty(depth);
    let mut frontier = vec![root];
    for _ in 0..split {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for &node in &frontier {
            head.visit(w, node);
            next.extend(children(kappa, node));
        }
        frontier = next;
    }
    let parts = crate::par_map(&frontier, |&n| subtree_sum(kappa, w, depth, n));
    for part in parts {
        head.absorb(part);
    }
    head
}

fn children(kappa: Complex64, (a, b, c, d, coef, level): Node) -> [Node; 2] {
    // right multiplication: M·T then M·R
    [
        (a, a + b, c, c + d, coef * kappa, level + 1),
        (a + b, b, c + d, d, coef * (ONE - kappa), level + 1),
    ]
}

fn subtree_sum(kappa: Complex64, w: Complex64, depth: u32, root: Node) -> TreeSum {
    let growth = kappa.norm() + (ONE - kappa).norm();
    // every descendant of a node has entries at least as large, and for
    // w ∉ [0, ∞): |cw − d| ≥ c·dist, |(a + c)w − (b + d)| ≥ (a + c)·dist
    let dist = if w.re >= 0.0 { w.im.abs() } else { w.norm() };
    let growth_pows: Vec<f64> = (0..=depth).map(|m| growth.powi(m as i32)).collect();

    let mut sum = TreeSum::empty(depth);
    let mut stack: Vec<Node> = Vec::with_capacity(2 * depth as usize + 4);
    stack.push(root);
    while let Some(node) = stack.pop() {
        sum.visit(w, node);
        let (a, _, c, _, coef, level) = node;
        if level == depth {
            continue;
        }
        let lower = (a + c) * dist * if c > 0.0 { c * dist } else { dist.min(1.0) };
        let subtree = coef.norm() * (growth_pows[(depth - level) as usize] * 2.0) / lower;
        if subtree < PRUNE_TOL * (sum.value.norm() + 1e-300) {
            sum.pruned_bound += subtree;
            continue;
        }
        let [t, r] = children(kappa, node);
        stack.push(r);
        stack.push(t);
    }
    sum
}

impl TreeSum {
    fn empty(depth: u32) -> Self {
        TreeSum {
            value: ZERO,
            level_abs: vec![0.0; depth as usize + 1],
            pruned_bound: 0.0,
        }
    }

    fn visit(&mut self, w: Complex64, (a, b, c, d, coef, level): Node) {
        let term = coef / ((w * (a + c) - (b + d)) * (w * c - d));
        self.value += term;
        self.level_abs[level as usize] += term.norm();
    }

    fn absorb(&mut self, o: TreeSum) {
        self.value += o.value;
        for (x, y) in self.level_abs.iter_mut().zip(o.level_abs) {
            *x += y;
        }
        self.pruned_bound += o.pruned_bound;
    }
}

/// Signed residual of the three-term equation
/// `G(z+1) − κG(z) − (1−κ)(1−z)^(−2) G(1/(1−z)) − (1−κ)/(1−z)` for an arbitrary
/// evaluator `g` of `G(κ, ·)`.
pub fn centr_defect(
    kappa: Complex64,
    z: Complex64,
    mut g: impl FnMut(Complex64) -> Result<Complex64>,
) -> Result<Complex64> {
    let w = ONE / (ONE - z);
    Ok(g(z + ONE)? - kappa * g(z)? - (ONE - kappa) * w * w * g(w)? - (ONE - kappa) * w)
}

/// `|G(κ, z+1) − κG(κ, z) − (1−κ)/(1−z)² · G(κ, 1/(1−z)) − (1−κ)/(1−z)|`
/// with `G` from the tree series.
pub fn residual_centr(kappa: &DomainD, z: Complex64, depth: u32) -> Result<f64> {
    for arg in [z, z + ONE, ONE / (ONE - z)] {
        check_off_cut(arg)?;
    }
    let defect = centr_defect(kappa.kappa(), z, |u| Ok(g_series(kappa, u, depth)?.value))?;
    Ok(defect.norm())
}

/// Signed residual of `1/z + z^(−2) G(1/z) + 2G(z+1) − G(z)` for an evaluator
/// of `G(1/2, ·)`.
pub fn dyadic_defect(
    z: Complex64,
    mut g: impl FnMut(Complex64) -> Result<Complex64>,
) -> Result<Complex64> {
    let inv = ONE / z;
    Ok(inv + inv * inv * g(inv)? + g(z + ONE)? * 2.0 - g(z)?)
}

/// The dyadic equation of Minkowski's period function at `κ = 1/2`.
pub fn residual_dyadic(z: Complex64, depth: u32) -> Result<f64> {
    if z == ZERO {
        return domain("z = 0 has no reciprocal");
    }
    for arg in [z, ONE / z, z + ONE] {
        check_off_cut(arg)?;
    }
    let half = DomainD::real(0.5)?;
    Ok(dyadic_defect(z, |u| Ok(g_series(&half, u, depth)?.value))?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn domain_membership() {
        assert!(DomainD::real(0.5).is_ok());
        assert!(DomainD::real(0.0).is_ok());
        assert!(DomainD::real(1.0).is_err());
        assert!(DomainD::new(c(0.5, 0.9)).is_err());
        assert!(DomainD::new(c(-0.1, 0.0)).is_err());
        // |1 − κ| = 1 boundary is inside
        let theta: f64 = 0.4;
        assert!(DomainD::new(ONE - c(theta.cos(), theta.sin())).is_ok());
    }

    #[test]
    fn cut_is_rejected() {
        let k = DomainD::real(0.5).unwrap();
        assert!(g_series(&k, c(2.0, 0.0), 5).is_err());
        assert!(g_series(&k, c(1.0, 1e-12), 5).is_err());
        assert!(g_series(&k, c(2.0, 1e-3), 5).is_ok());
        let quad = QuadratureSpec::new(256, 40).unwrap();
        assert!(g_stieltjes(&k, c(3.0, 0.0), &quad).is_err());
    }

    #[test]
    fn endpoint_closed_forms() {
        let z = c(-1.0, 0.0);
        let zero = DomainD::real(0.0).unwrap();
        assert_eq!(g_series(&zero, z, 10).unwrap().value, c(0.5, 0.0));
        let one = DomainD::limit_one();
        assert_eq!(g_series(&one, c(0.3, 2.0), 10).unwrap().value, ZERO);
        assert_eq!(residual_centr(&one, c(-0.5, 0.5), 10).unwrap(), 0.0);
        // κ = 0, z = −2: closed form satisfies the three-term equation
        assert!(residual_centr(&zero, c(-2.0, 0.0), 10).unwrap() < 1e-15);
    }

    #[test]
    fn series_at_small_kappa_approaches_closed_form() {
        // the R-chain telescopes to 1/(1 − z) as κ → 0
        let z = c(-1.0, 0.5);
        let exact = ONE / (ONE - z);
        let mut prev = f64::INFINITY;
        for k in [0.3, 0.2, 0.1] {
            let v = g_series(&DomainD::real(k).unwrap(), z, 18).unwrap().value;
            let err = (v - exact).norm();
            assert!(err < prev);
            prev = err;
        }
    }

    #[test]
    fn minkowski_period_at_minus_one() {
        // G(1/2, −1) = ∫ x/(1 + x) d?; both routes agree
        let k = DomainD::real(0.5).unwrap();
        let s = g_series(&k, c(-1.0, 0.0), 20).unwrap();
        let q = g_stieltjes(&k, c(-1.0, 0.0), &QuadratureSpec::new(1 << 12, 60).unwrap()).unwrap();
        assert!((s.value - q.value).norm() <= s.residual_estimate + q.residual_estimate);
    }

    #[test]
    fn dyadic_and_centr_small() {
        assert!(residual_dyadic(c(-1.0, 0.0), 20).unwrap() < 1e-5);
        assert!(residual_dyadic(c(0.0, 2.0), 20).unwrap() < 1e-5);
        let half = DomainD::real(0.5).unwrap();
        assert!(residual_centr(&half, c(-1.0, 1.0), 20).unwrap() < 1e-5);
    }
}
