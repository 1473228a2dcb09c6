use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::decode::{collect_symbols, decode_collected};
use super::delivery::{deliver_random, rate_random_measured};
use super::placement::{check_library_cached, place_random};
use crate::error::{Error, Result};
use crate::model::{gen_library, Demand, SystemParams};
use crate::rational::{to_f64, Rational};

/// One Monte-Carlo sample of the decentralized scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRow {
    pub seed: u64,
    #[serde(rename = "K")]
    pub k: usize,
    pub rho: f64,
    /// Fewest distinct symbols available at any node.
    pub distinct_symbols: usize,
    pub decoded: bool,
    pub measured_rate: f64,
    #[serde(skip)]
    pub rate_exact: Rational,
    #[serde(skip)]
    pub library_cached: bool,
}

/// Place, deliver and decode at every node; decode failures are recorded,
/// wrong bytes are errors.
pub fn run_random(params: &SystemParams, demand: &Demand, k: usize, rho: f64, seed: u64) -> Result<McRow> {
    let library = gen_library(params, seed);
    let placement = place_random(params, &library, k, rho, seed)?;
    let tx = deliver_random(params, &placement, demand)?;
    let mut decoded = true;
    let mut distinct_symbols = usize::MAX;
    for node in 0..params.n() {
        let rounds = collect_symbols(params, &placement, node, &tx, demand)?;
        let distinct = rounds.iter().map(|r| r.len()).min().unwrap_or(0);
        distinct_symbols = distinct_symbols.min(distinct);
        match decode_collected(params, &placement, node, &rounds) {
            Ok(packets) => {
                for (r, got) in packets.iter().enumerate() {
                    let packet = demand.packet(node, r);
                    if got.as_slice() != library.packet(demand.files[node], packet) {
                        return Err(Error::DecodeMismatch { node, packet });
                    }
                }
            }
            Err(Error::DecodeFailure { .. }) => decoded = false,
            Err(e) => return Err(e),
        }
    }
    let rate_exact = rate_random_measured(&tx, params);
    Ok(McRow {
        seed,
        k,
        rho,
        distinct_symbols,
        decoded,
        measured_rate: to_f64(&rate_exact),
        rate_exact,
        library_cached: check_library_cached(&placement, params.m()).per_file.iter().all(|&b| b),
    })
}

/// Independent runs over `seeds`, returned in seed order.
pub fn monte_carlo(params: &SystemParams, demand: &Demand, k: usize, rho: f64, seeds: &[u64]) -> Result<Vec<McRow>> {
    seeds
        .par_iter()
        .map(|&s| run_random(params, demand, k, rho, s))
        .collect()
}

/// Rate of the delivery loop with every exclusivity class replaced by its
/// expected size `(K / rho) p^(b-1) (1-p)^(n-b+1)`, `p = M rho / m`.
pub fn rate_expected_counts(n: usize, m: usize, cache: f64, rho: f64) -> f64 {
    let p = cache * rho / m as f64;
    let mut symbols_over_k = 0.0;
    for b in (2..=n).rev() {
        let class = p.powi(b as i32 - 1) * (1.0 - p).powi((n - b + 1) as i32) / rho;
        for _group in (0..n).combinations(b) {
            // b senders, each carrying Jmax / (b - 1)
            symbols_over_k += b as f64 * class / (b - 1) as f64;
        }
    }
    symbols_over_k
}
