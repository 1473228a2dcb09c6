use num_traits::Zero;
use serde::Serialize;

use super::converse::{max_l_term, rate_converse};
use super::rates::rate_det_formula;
use crate::error::Result;
use crate::geometry::{build_clusters, concurrency_cap, reuse_factor};
use crate::model::SystemParams;
use crate::rational::{int, to_f64, Rational, RationalValue};

#[derive(Debug, Clone, Serialize)]
pub struct ThroughputBounds {
    pub link_rate: RationalValue,
    pub full_range: bool,
    pub reuse_factor: u64,
    pub concurrency_cap: u64,
    /// Cluster size when `r < sqrt(2)`.
    pub gc: Option<usize>,
    /// Users a receiver can hear from, `min(m, ceil(pi r^2 n))`.
    pub l_max: u64,
    /// `None` when the rate is zero.
    pub achievable: Option<RationalValue>,
    pub upper: Option<RationalValue>,
    #[serde(skip)]
    pub achievable_exact: Option<Rational>,
    #[serde(skip)]
    pub upper_exact: Option<Rational>,
}

fn over(num: Rational, den: Rational) -> Option<Rational> {
    (!den.is_zero()).then(|| num / den)
}

/// Achievable throughput `C_r / R(M)` with full range, `(C_r / K) / R_c(M)`
/// with clustering; upper bound `C_r / R*` with full range, otherwise
/// `C_r ceil(4 (2 + delta)^2 / delta^2) / max_l (l - l M / floor(m/l))`
/// over `l <= min(m, ceil(pi r^2 n))`.
pub fn throughput_bounds(params: &SystemParams) -> Result<ThroughputBounds> {
    let (n, m, cache) = (params.n() as u64, params.m() as u64, params.cache_size());
    let cr = params.link_rate();
    let reuse = reuse_factor(params.delta());
    let cap = concurrency_cap(params.delta());
    let r2 = to_f64(&(params.range() * params.range()));
    let l_max = ((std::f64::consts::PI * r2 * n as f64).ceil() as u64).min(m).max(1);
    let (gc, achievable, upper) = if params.full_range() {
        let det = rate_det_formula(n, m, cache)?;
        (None, over(cr, det), over(cr, rate_converse(n, m, cache)))
    } else {
        let (_, layout) = build_clusters(params)?;
        let rc = rate_det_formula(layout.gc as u64, m, cache)?;
        let (best, _) = max_l_term(m, cache, l_max);
        (
            Some(layout.gc),
            over(cr / int(reuse as i128), rc),
            over(cr * int(cap as i128), best),
        )
    };
    Ok(ThroughputBounds {
        link_rate: cr.into(),
        full_range: params.full_range(),
        reuse_factor: reuse,
        concurrency_cap: cap,
        gc,
        l_max,
        achievable: achievable.map(Into::into),
        upper: upper.map(Into::into),
        achievable_exact: achievable,
        upper_exact: upper,
    })
}
