//! Numerics for the Minkowski question mark function and its relatives.
//!
//! The crate is organised bottom-up:
//!
//! * [`cfcodec`]: exact regular and semi-regular continued fractions, and
//!   Calkin–Wilf paths.
//! * [`measures`]: the q-question-mark functions `μ_q`, the classical `?(x)`
//!   and their Laplace–Stieltjes transforms.
//! * [`period`]: the Stieltjes transform `G(κ, z)` of `μ_κ`, evaluated by a
//!   Calkin–Wilf tree series and independently by Riemann–Stieltjes quadrature,
//!   together with its three-term functional equations.
//! * [`modular`]: the quasi-modular Eisenstein series `G₂`, theta constants
//!   with rational characteristics and their transformation rules.
//! * [`mmf`]: 2×2 matrix words, weight-k slash operators and the residual
//!   checks of the mean-modular form equations.
//! * [`sporadic`]: theta-characteristic orbits, transformation matrices and
//!   the determinant polynomial whose roots give isolated modular solutions.

pub mod cfcodec;
pub mod complex_parse;
pub mod error;
pub mod matrix;
pub mod measures;
pub mod mmf;
pub mod modular;
pub mod period;
pub mod poly;
pub mod quadrature;
pub mod sporadic;

pub use error::{QmarkError, Result};
pub use num_complex::Complex64;
pub use num_rational::Rational64;

/// Exact rational number used throughout the continued-fraction code.
pub type Rational = Rational64;

/// Worker threads for parallel summations: `QMARK_THREADS` if set to a
/// positive integer, otherwise the available hardware parallelism.
pub fn parallelism() -> usize {
    std::env::var("QMARK_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Maps `f` over `items` on up to [`parallelism`] threads; output order (and
/// hence any later reduction) matches input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = parallelism().min(items.len()).max(1);
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}
