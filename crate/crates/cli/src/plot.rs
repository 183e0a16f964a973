use std::fmt::Write;

use qmark_core::measures::{mu_eval, MuEvaluation, QSequence};
use qmark_core::par_map;
use serde::Serialize;

use crate::config::{CliError, Format, RunConfig};

/// Upper limit on digits unfolded per point.
const MAX_UNFOLD: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlotRow {
    pub x: f64,
    pub re_mu: f64,
    pub im_mu: f64,
    pub err_bound: f64,
}

/// `μ_q` on `grid + 1` equally spaced points of `[0, 1]`, unfolded deep
/// enough for the a-priori bound to reach the configured tolerance.
pub fn plot_rows(spec: &str, grid: usize, cfg: &RunConfig) -> Result<Vec<PlotRow>, CliError> {
    if grid == 0 {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    let q: QSequence = spec.parse()?;
    let depth = q.depth_for(cfg.tolerance).min(MAX_UNFOLD);
    let xs: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    let evals: Vec<qmark_core::Result<MuEvaluation>> = par_map(&xs, |&x| mu_eval(&q, x, depth));
    xs.iter()
        .zip(evals)
        .map(|(&x, e)| {
            let e = e?;
            Ok(PlotRow {
                x,
                re_mu: e.value.re,
                im_mu: e.value.im,
                err_bound: e.error_bound,
            })
        })
        .collect()
}

pub fn render(rows: &[PlotRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("x,re_mu,im_mu,err_bound\n");
            for r in rows {
                writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r.x, r.re_mu, r.im_mu, r.err_bound).unwrap();
            }
            out
        }
        Format::Json => crate::json::render(&rows),
    }
}
