//! Quadrature helpers: Gauss–Legendre rules and Riemann–Stieltjes partition
//! settings.

use std::f64::consts::PI;

use crate::error::{config, Result};

/// Settings for Riemann–Stieltjes sums on dyadic partitions of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Number of cells of the finer partition; a power of two.
    pub cells: usize,
    /// Digit-unfolding depth used for every evaluation of the measure.
    pub depth: usize,
}

impl QuadratureSpec {
    pub fn new(cells: usize, depth: usize) -> Result<Self> {
        if cells < 4 || !cells.is_power_of_two() {
            return config(format!("quadrature cells must be a power of two ≥ 4, got {cells}"));
        }
        if depth == 0 {
            return config("quadrature depth must be positive");
        }
        Ok(QuadratureSpec { cells, depth })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            cells: 1 << 14,
            depth: 200,
        }
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on Pₙ
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}
