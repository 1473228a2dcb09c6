use rayon::prelude::*;
use serde::Serialize;

use super::converse::rate_converse;
use super::rates::{rate_basestation_reference, rate_det_formula, rate_rand_formula, t_of};
use crate::decentral::solve_rho_star;
use crate::error::Result;
use crate::rational::{int, to_f64, Rational};

/// One point of a rate-versus-cache sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "M")]
    pub cache: f64,
    pub rate_det: f64,
    pub rate_rand_exact: f64,
    pub rate_rand_approx: f64,
    pub rate_converse: f64,
    pub rate_bs_reference: f64,
    #[serde(skip)]
    pub t: Rational,
    #[serde(skip)]
    pub det_exact: Rational,
    #[serde(skip)]
    pub converse_exact: Rational,
    #[serde(skip)]
    pub rho: Option<f64>,
}

/// Rates at each cache size; the decentralized columns use
/// `rho = (1 - epsilon) rho*(t)`, and the hashing rate at `t = 1`.
pub fn sweep(n: u64, m: u64, caches: &[Rational], epsilon: f64) -> Result<Vec<SweepRow>> {
    caches
        .par_iter()
        .map(|&cache| {
            let t = t_of(n, m, cache);
            let det = rate_det_formula(n, m, cache)?;
            let converse = rate_converse(n, m, cache);
            let rho = if t > int(1) {
                Some(solve_rho_star(to_f64(&t), epsilon)?.rho)
            } else {
                None
            };
            let rand = rate_rand_formula(n, m, to_f64(&cache), rho.unwrap_or(1.0))?;
            Ok(SweepRow {
                cache: to_f64(&cache),
                rate_det: to_f64(&det),
                rate_rand_exact: rand.exact,
                rate_rand_approx: rand.upper,
                rate_converse: to_f64(&converse),
                rate_bs_reference: to_f64(&rate_basestation_reference(n, m, cache)),
                t,
                det_exact: det,
                converse_exact: converse,
                rho,
            })
        })
        .collect()
}

/// `from, from + step, ..., <= to`.
pub fn cache_axis(from: Rational, to: Rational, step: Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut x = from;
    while x <= to {
        out.push(x);
        x += step;
    }
    out
}
